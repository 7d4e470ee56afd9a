#include "rankcond/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "rankcond/algorithms.hpp"
#include "rankcond/corpus.hpp"
#include "rankcond/errors.hpp"
#include "rankcond/sysdsl.hpp"

namespace rankcond::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Loaded {
  SystemDocument doc;
  SystemSpec sys;
  std::vector<AnnihilatorFixture> fixtures;
};

Loaded load(const CliConfig& c) {
  if (c.system_path.has_value() == c.corpus_name.has_value())
    throw InvalidArgument("give exactly one of --system or --corpus");
  Loaded l;
  l.doc = c.system_path ? load_system_file(*c.system_path) : corpus_entry(*c.corpus_name).document;
  l.sys = lower(l.doc, c.params);
  l.fixtures = lower_annihilators(l.doc, c.params);
  for (const auto& path : c.annihilator_files) {
    SystemDocument extra = l.doc;
    try {
      extra.annihilators = parse_annihilators(read_text_file(path), l.doc);
    } catch (const ParseError& e) {
      throw ParseError(e.message(), e.line(), e.column(), path);
    }
    for (auto& f : lower_annihilators(extra, c.params)) l.fixtures.push_back(std::move(f));
  }
  return l;
}

SamplePlan plan_of(const CliConfig& c) {
  SamplePlan p;
  p.seed = c.seed;
  p.samples = c.samples;
  p.max_attempts = std::max<std::size_t>(50, c.samples);
  p.arithmetic = c.arithmetic;
  return p;
}

std::vector<AnalysisKind> kinds_for(const CliConfig& c, const SystemSpec& sys) {
  switch (c.kind) {
    case KindSelection::Observability: return {AnalysisKind::Observability};
    case KindSelection::Controllability: return {AnalysisKind::Controllability};
    case KindSelection::Both: break;
  }
  std::vector<AnalysisKind> out;
  if (sys.p() > 0) out.push_back(AnalysisKind::Observability);
  if (sys.m() > 0) out.push_back(AnalysisKind::Controllability);
  if (out.empty()) throw InvalidArgument("system has neither outputs nor input fields");
  return out;
}

AnalysisReport analyze(const Loaded& l, AnalysisKind kind, const CliConfig& c) {
  AnalysisOptions opts;
  opts.max_steps = c.max_steps;
  const SamplePlan plan = plan_of(c);
  const bool tv = l.sys.time_varying();
  AnalysisReport r = kind == AnalysisKind::Observability
                         ? (tv ? observability_tv(l.sys, plan, opts) : observability_ti(l.sys, plan, opts))
                         : (tv ? controllability_tv(l.sys, plan, opts) : controllability_ti(l.sys, plan, opts));
  check_annihilators(r, l.fixtures);
  return r;
}

std::string verdict(const AnalysisReport& r) {
  const bool obs = r.kind == AnalysisKind::Observability;
  if (r.holds) return obs ? "observable" : "controllable";
  return obs ? "not-observable" : "not-controllable";
}

std::vector<std::string> structural_names(const AnalysisReport& r) {
  std::vector<std::string> out;
  for (const auto& a : r.annihilators)
    if (a.verified && a.expectation == "structural") out.push_back(a.name);
  return out;
}

std::string verdict_text(const AnalysisReport& r) {
  const std::string what = r.kind == AnalysisKind::Observability ? "observable" : "controllable";
  if (r.holds) return "condition holds: weakly locally " + what + " at generic points";
  std::string s = "condition fails at generic points; codimension " + std::to_string(r.codimension);
  const auto structural = structural_names(r);
  if (!structural.empty() && structural.size() == r.codimension) {
    s += "; weakly locally " + what + " modulo the ";
    for (std::size_t i = 0; i < structural.size(); ++i)
      s += (i == 0 ? "" : i + 1 == structural.size() ? " and " : ", ") + structural[i];
    s += " directions";
  }
  return s;
}

std::vector<std::vector<std::string>> annihilator_values(const AnalysisReport& r) {
  std::vector<std::vector<std::string>> out;
  if (r.holds) return out;
  for (const auto& v : numeric_annihilator(*r.basis, r.basis->plan())) {
    std::vector<std::string> row;
    for (const auto& q : v) row.push_back(to_string(q));
    out.push_back(std::move(row));
  }
  return out;
}

std::string dims_list(const std::vector<std::size_t>& d) {
  std::string s = "[";
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? ", " : "") + std::to_string(d[i]);
  return s + "]";
}

Json report_json(const AnalysisReport& r, const SystemDocument& doc) {
  Json j;
  j["system"] = r.system;
  j["kind"] = std::string(to_string(r.kind));
  j["algorithm"] = r.algorithm;
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    Json added = Json::array();
    for (std::size_t idx : s.added) {
      const Provenance& p = r.basis->generators()[idx].provenance;
      Json a;
      a["operator"] = p.op;
      a["source_generator"] = p.source ? Json(*p.source) : Json(nullptr);
      a["index"] = idx;
      a["label"] = p.label;
      added.push_back(std::move(a));
    }
    steps.push_back(Json{{"step", s.step}, {"dim", s.dim}, {"added", std::move(added)}});
  }
  j["steps"] = std::move(steps);
  j["converged_at"] = r.converged_at;
  j["rank"] = r.rank;
  j["n"] = r.n;
  j["verdict"] = verdict(r);
  j["codimension"] = r.codimension;
  j["verdict_text"] = verdict_text(r);
  if (auto e = doc.expected_dims(r.kind)) {
    j["expected_dims"] = *e;
    j["matches_expected"] = *e == r.dims();
  }
  Json ann = Json::array();
  for (const auto& a : r.annihilators)
    ann.push_back(Json{{"name", a.name}, {"verified", a.verified}, {"symbolic", a.symbolic}, {"expectation", a.expectation}});
  j["annihilators"] = std::move(ann);
  j["structural_directions"] = structural_names(r);
  j["numeric_annihilator"] = annihilator_values(r);
  j["seed"] = r.plan.seed;
  j["samples"] = r.plan.samples;
  j["arithmetic"] = std::string(to_string(r.plan.arithmetic));
  return j;
}

void report_text(std::ostream& out, const AnalysisReport& r, const SystemDocument& doc) {
  out << r.system << ": " << to_string(r.kind) << " (algorithm " << r.algorithm << "), n = " << r.n << ", seed "
      << r.plan.seed << ", " << r.plan.samples << " samples\n";
  out << "  step  dim  new generators\n";
  for (const auto& s : r.steps) {
    out << "  " << std::setw(4) << s.step << "  " << std::setw(3) << s.dim << "  ";
    for (std::size_t i = 0; i < s.added.size(); ++i)
      out << (i ? "; " : "") << r.basis->generators()[s.added[i]].provenance.label;
    out << "\n";
  }
  out << "  trace: dim";
  const auto d = r.dims();
  for (std::size_t i = 0; i < d.size(); ++i) out << (i ? " -> " : " ") << d[i];
  out << "\n";
  out << "  converged at step " << r.converged_at;
  if (r.confirmed) out << " (no growth at " << r.plan.samples << " fresh points)";
  out << "\n";
  out << "  rank " << r.rank << " of " << r.n << ": " << verdict_text(r) << "\n";
  if (auto e = doc.expected_dims(r.kind))
    out << "  expected dims " << dims_list(*e) << ": " << (*e == r.dims() ? "match" : "MISMATCH") << "\n";
  for (const auto& a : r.annihilators) {
    out << "  annihilator " << a.name << ": "
        << (a.verified ? (a.symbolic ? "verified symbolically" : "verified at sample points") : "not an annihilator");
    if (!a.expectation.empty()) out << " (expected: " << a.expectation << ")";
    out << "\n";
  }
  const auto null = annihilator_values(r);
  if (!null.empty()) out << "  numeric annihilator at the sample point of highest rank:\n";
  for (const auto& v : null) {
    out << "    (";
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
    out << ")\n";
  }
}

void explain_text(std::ostream& out, const AnalysisReport& r) {
  const auto& gens = r.basis->generators();
  out << r.system << ": " << to_string(r.kind) << " generators\n";
  std::function<void(std::size_t, int)> walk = [&](std::size_t i, int depth) {
    const Provenance& p = gens[i].provenance;
    out << std::string(2 + 2 * depth, ' ') << "[" << i << "] " << p.label << "  (step " << p.step << ")\n";
    for (std::size_t k = 0; k < gens.size(); ++k)
      if (gens[k].provenance.source == i) walk(k, depth + 1);
  };
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (!gens[i].provenance.source) walk(i, 0);
}

Json explain_json(const AnalysisReport& r) {
  Json gens = Json::array();
  for (std::size_t i = 0; i < r.basis->generators().size(); ++i) {
    const Provenance& p = r.basis->generators()[i].provenance;
    gens.push_back(Json{{"index", i},
                        {"step", p.step},
                        {"operator", p.op},
                        {"source_generator", p.source ? Json(*p.source) : Json(nullptr)},
                        {"label", p.label}});
  }
  return Json{{"system", r.system}, {"kind", std::string(to_string(r.kind))}, {"generators", std::move(gens)}};
}

Json findings_json(const std::vector<Finding>& f) {
  Json arr = Json::array();
  for (const auto& x : f) arr.push_back(Json{{"name", x.name}, {"passed", x.passed}, {"detail", x.detail}});
  return arr;
}

void findings_text(std::ostream& out, const std::vector<Finding>& f) {
  for (const auto& x : f) out << "  " << (x.passed ? "PASS" : "FAIL") << "  " << x.name << ": " << x.detail << "\n";
}

int corpus_list(const CliConfig& c, std::ostream& out) {
  if (c.format == Format::Json) {
    Json arr = Json::array();
    for (const auto& e : corpus_entries()) {
      Json j{{"name", e.name},
             {"n", e.document.states.size()},
             {"m", e.document.inputs.size()},
             {"p", e.document.outputs.size()}};
      j["observability_dims"] = e.observability_dims ? Json(*e.observability_dims) : Json(nullptr);
      j["controllability_dims"] = e.controllability_dims ? Json(*e.controllability_dims) : Json(nullptr);
      j["note"] = e.note;
      arr.push_back(std::move(j));
    }
    out << arr.dump(2) << "\n";
    return kExitOk;
  }
  for (const auto& e : corpus_entries()) {
    out << std::left << std::setw(26) << e.name << std::right << " n=" << e.document.states.size()
        << " m=" << e.document.inputs.size() << " p=" << e.document.outputs.size();
    if (e.observability_dims) out << "  obs " << dims_list(*e.observability_dims);
    if (e.controllability_dims) out << "  ctrl " << dims_list(*e.controllability_dims);
    out << "\n";
  }
  return kExitOk;
}

int dispatch(const CliConfig& c, std::ostream& out) {
  if (c.command == Command::CorpusList) return corpus_list(c, out);
  if (c.samples == 0) throw InvalidArgument("--samples must be at least 1");
  const Loaded l = load(c);
  const bool json = c.format == Format::Json;

  if (c.command == Command::Check) {
    const auto f = consistency_check(l.sys, plan_of(c));
    if (json) {
      out << Json{{"system", l.sys.name}, {"seed", c.seed}, {"samples", c.samples}, {"findings", findings_json(f)}}.dump(2)
          << "\n";
    } else {
      out << l.sys.name << ": consistency checks\n";
      findings_text(out, f);
    }
    return kExitOk;
  }

  std::vector<AnalysisReport> reports;
  for (AnalysisKind k : kinds_for(c, l.sys)) reports.push_back(analyze(l, k, c));

  if (c.command == Command::Explain) {
    if (json) {
      Json arr = Json::array();
      for (const auto& r : reports) arr.push_back(explain_json(r));
      out << (arr.size() == 1 ? arr[0] : arr).dump(2) << "\n";
    } else {
      for (const auto& r : reports) explain_text(out, r);
    }
    return kExitOk;
  }

  std::optional<std::vector<Finding>> findings;
  if (c.check) findings = consistency_check(l.sys, plan_of(c));
  if (json) {
    Json doc;
    if (reports.size() == 1 && !findings) {
      doc = report_json(reports[0], l.doc);
    } else {
      doc["system"] = l.sys.name;
      doc["reports"] = Json::array();
      for (const auto& r : reports) doc["reports"].push_back(report_json(r, l.doc));
      if (findings) doc["findings"] = findings_json(*findings);
    }
    out << doc.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (i) out << "\n";
      report_text(out, reports[i], l.doc);
    }
    if (findings) {
      out << "\nconsistency checks\n";
      findings_text(out, *findings);
    }
  }
  return kExitOk;
}

}  // namespace

int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(config, out);
  } catch (const SamplingError& e) {
    err << "sampling failure: " << e.what() << "\n";
    return kExitSamplingError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliConfig c;
  if (const char* env = std::getenv("RANKCOND_SEED")) {
    try {
      c.seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "error: RANKCOND_SEED must be a non-negative integer\n";
      return kExitInputError;
    }
  }

  CLI::App app{"Rank-condition analysis of input-affine time-varying nonlinear systems", "rankcond"};
  app.require_subcommand(1);
  std::string kind = "both";
  std::string format = "text";
  std::string arithmetic = "rational";
  std::vector<std::string> params;
  std::string system_path, corpus_name;
  std::size_t max_steps = 0;

  auto add_common = [&](CLI::App* sub, bool with_kind) {
    auto* sys = sub->add_option("--system", system_path, "system file");
    auto* cor = sub->add_option("--corpus", corpus_name, "built-in corpus entry");
    sys->excludes(cor);
    if (with_kind)
      sub->add_option("--kind", kind, "observability, controllability or both")
          ->check(CLI::IsMember({"observability", "controllability", "both"}));
    sub->add_option("--seed", c.seed, "sampling seed (default 42 or $RANKCOND_SEED)");
    sub->add_option("--samples", c.samples, "sample points per rank test (default 5)")->check(CLI::PositiveNumber);
    sub->add_option("--max-steps", max_steps, "recursion step cap (default n-1)");
    sub->add_option("--param", params, "parameter binding name=rational");
    sub->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--annihilator", c.annihilator_files, "file of annihilator statements");
    sub->add_option("--arithmetic", arithmetic, "rational or modular")->check(CLI::IsMember({"rational", "modular"}));
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "run the rank-condition algorithms");
  add_common(analyze_cmd, true);
  analyze_cmd->add_flag("--check", c.check, "also run the consistency checks");
  auto* check_cmd = app.add_subcommand("check", "cross-check algorithms, oracles and linear recursions");
  add_common(check_cmd, false);
  auto* explain_cmd = app.add_subcommand("explain", "print the generator provenance tree");
  add_common(explain_cmd, true);
  auto* corpus_cmd = app.add_subcommand("corpus", "built-in systems");
  corpus_cmd->require_subcommand(1);
  auto* list_cmd = corpus_cmd->add_subcommand("list", "list corpus entries");
  list_cmd->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (analyze_cmd->parsed()) c.command = Command::Analyze;
  if (check_cmd->parsed()) c.command = Command::Check;
  if (explain_cmd->parsed()) c.command = Command::Explain;
  if (list_cmd->parsed()) c.command = Command::CorpusList;
  if (!system_path.empty()) c.system_path = system_path;
  if (!corpus_name.empty()) c.corpus_name = corpus_name;
  for (const CLI::App* sub : {analyze_cmd, check_cmd, explain_cmd})
    if (sub->parsed() && sub->count("--max-steps")) c.max_steps = max_steps;
  c.kind = kind == "observability"     ? KindSelection::Observability
           : kind == "controllability" ? KindSelection::Controllability
                                       : KindSelection::Both;
  c.format = format == "json" ? Format::Json : Format::Text;
  c.arithmetic = arithmetic == "modular" ? Arithmetic::Modular : Arithmetic::Rational;
  for (const auto& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) {
      err << "error: --param expects name=rational, got '" << p << "'\n";
      return kExitInputError;
    }
    try {
      c.params[p.substr(0, eq)] = parse_rational(p.substr(eq + 1));
    } catch (const Error& e) {
      err << "error: --param " << p << ": " << e.what() << "\n";
      return kExitInputError;
    }
  }
  return run(c, out, err);
}

}  // namespace rankcond::cli
