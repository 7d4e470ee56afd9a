#include "rankcond/algorithms.hpp"

#include <algorithm>
#include <functional>

#include "rankcond/errors.hpp"

namespace rankcond {

namespace {

constexpr const char* kCompose = " ∘ ";

bool mentions(const Expr& e, const std::string& symbol) { return e.depends_on(symbol); }

std::string control_tag(const char* prefix, std::size_t i) { return std::string(prefix) + std::to_string(i); }

// Candidate factory: builds the images of one generator under one operator.
using ImageFn = std::function<Generator(const Generator& source, std::size_t source_index)>;

struct Recursion {
  SpanKind kind;
  std::vector<ImageFn> operators;  // drift first, then controls
  std::vector<Generator> seeds;
};

AnalysisReport run(const SystemSpec& sys, const SamplePlan& base, const AnalysisOptions& opts, AnalysisKind kind,
                   int algorithm, const std::function<Recursion(FieldCalculus&)>& setup) {
  const SamplePlan plan = plan_for(sys, base);
  auto calc = std::make_shared<FieldCalculus>(sys.table, opts.form);
  Recursion rec = setup(*calc);
  auto basis = std::make_shared<SpanBasis>(rec.kind, sys.table, plan);

  AnalysisReport report;
  report.system = sys.name;
  report.kind = kind;
  report.algorithm = algorithm;
  report.n = sys.n();
  report.plan = plan;

  const std::size_t max_steps = opts.max_steps.value_or(sys.n() > 0 ? sys.n() - 1 : 0);

  StepRecord seed_step;
  seed_step.step = 0;
  seed_step.candidates = rec.seeds.size();
  for (auto& g : rec.seeds) {
    if (basis->try_add(std::move(g))) seed_step.added.push_back(basis->rank() - 1);
  }
  seed_step.dim = basis->rank();
  std::vector<std::size_t> frontier = seed_step.added;
  report.steps.push_back(std::move(seed_step));

  for (std::size_t step = 1; step <= max_steps && basis->rank() < sys.n() && !frontier.empty(); ++step) {
    std::vector<Generator> candidates;
    for (const auto& op : rec.operators) {
      for (std::size_t idx : frontier) {
        Generator g = op(basis->generators()[idx], idx);
        g.provenance.step = step;
        candidates.push_back(std::move(g));
      }
    }
    auto attempt = [&](const std::vector<Generator>& cands) {
      std::vector<std::size_t> added;
      for (const auto& c : cands) {
        if (basis->rank() == sys.n()) break;
        if (basis->try_add(c)) added.push_back(basis->rank() - 1);
      }
      return added;
    };
    std::vector<std::size_t> added = attempt(candidates);
    if (added.empty()) {
      // Confirm the fixed point at fresh sample points before stopping.
      basis->add_fresh_points(plan.samples);
      report.confirmed = true;
      added = attempt(candidates);
      if (added.empty()) break;
    }
    StepRecord rec_step;
    rec_step.step = step;
    rec_step.candidates = candidates.size();
    rec_step.added = added;
    rec_step.dim = basis->rank();
    report.steps.push_back(std::move(rec_step));
    report.converged_at = step;
    frontier = std::move(added);
  }

  report.rank = basis->rank();
  report.codimension = sys.n() - report.rank;
  report.holds = report.rank == sys.n();
  report.basis = basis;
  return report;
}

Recursion observability_recursion(const SystemSpec& sys, FieldCalculus& calc, bool tilde) {
  if (sys.p() == 0) throw InvalidArgument("observability analysis needs at least one output");
  Recursion rec;
  rec.kind = SpanKind::Codistribution;
  for (std::size_t j = 0; j < sys.p(); ++j) {
    Generator g;
    g.components = calc.differential(sys.outputs[j]).components;
    g.potential = simplify(sys.outputs[j].value);
    g.provenance = {0, "seed", std::nullopt, "d " + sys.output_names[j]};
    rec.seeds.push_back(std::move(g));
  }
  auto image = [&calc](const std::string& op, std::function<ScalarField(const ScalarField&)> lie) -> ImageFn {
    return [&calc, op, lie](const Generator& src, std::size_t idx) {
      Generator g;
      const ScalarField phi = lie(ScalarField{*src.potential});
      g.components = calc.differential(phi).components;
      g.potential = phi.value;
      g.provenance = {0, op, idx, op + kCompose + src.provenance.label};
      return g;
    };
  };
  const VectorField f0 = sys.drift;
  if (tilde) {
    rec.operators.push_back(image("tilde_f0", [&calc, f0](const ScalarField& h) { return calc.tilde_lie_scalar(f0, h); }));
  } else {
    rec.operators.push_back(image("lie_f0", [&calc, f0](const ScalarField& h) { return calc.lie_scalar(f0, h); }));
  }
  for (std::size_t i = 0; i < sys.m(); ++i) {
    const VectorField fi = sys.inputs[i];
    rec.operators.push_back(
        image(control_tag("lie_f", i + 1), [&calc, fi](const ScalarField& h) { return calc.lie_scalar(fi, h); }));
  }
  return rec;
}

Recursion controllability_recursion(const SystemSpec& sys, FieldCalculus& calc, bool tv) {
  if (sys.m() == 0) throw InvalidArgument("controllability analysis needs at least one input field");
  Recursion rec;
  rec.kind = SpanKind::Distribution;
  for (std::size_t i = 0; i < sys.m(); ++i) {
    Generator g;
    for (const Expr& c : sys.inputs[i].components) g.components.push_back(simplify(c));
    g.provenance = {0, "seed", std::nullopt, sys.input_names[i]};
    rec.seeds.push_back(std::move(g));
  }
  auto image = [](const std::string& op, std::function<VectorField(const VectorField&)> br) -> ImageFn {
    return [op, br](const Generator& src, std::size_t idx) {
      Generator g;
      g.components = br(VectorField{src.components}).components;
      g.provenance = {0, op, idx, op + kCompose + src.provenance.label};
      return g;
    };
  };
  const VectorField f0 = sys.drift;
  if (tv) {
    rec.operators.push_back(image("tv_f0", [&calc, f0](const VectorField& d) { return calc.tv_bracket(d, f0); }));
  } else {
    rec.operators.push_back(image("bracket_f0", [&calc, f0](const VectorField& d) { return calc.lie_bracket(d, f0); }));
  }
  for (std::size_t i = 0; i < sys.m(); ++i) {
    const VectorField fi = sys.inputs[i];
    rec.operators.push_back(
        image(control_tag("bracket_f", i + 1), [&calc, fi](const VectorField& d) { return calc.lie_bracket(d, fi); }));
  }
  return rec;
}

void require_time_invariant(const SystemSpec& sys, const char* alternative) {
  if (sys.time_varying())
    throw InvalidArgument("system '" + sys.name + "' depends on " + sys.table.time() + "; use " + alternative);
}

std::string fresh_name(const SymbolTable& table, const std::string& base) {
  std::string name = base;
  for (int k = 1; table.contains(name); ++k) name = base + "_" + std::to_string(k);
  return name;
}

}  // namespace

bool identically_zero(const Expr& e) {
  if (e.is_zero()) return true;
  if (e.is_canonical() || e.node_count() > kSimplifyNodeLimit) return false;
  return simplify(e).is_zero();
}

std::string_view to_string(AnalysisKind kind) {
  return kind == AnalysisKind::Observability ? "observability" : "controllability";
}

bool SystemSpec::time_varying() const {
  const std::string& t = table.time();
  auto any = [&](const std::vector<Expr>& v) { return std::any_of(v.begin(), v.end(), [&](const Expr& e) { return mentions(e, t); }); };
  if (any(drift.components)) return true;
  for (const auto& f : inputs)
    if (any(f.components)) return true;
  for (const auto& h : outputs)
    if (mentions(h.value, t)) return true;
  return false;
}

void SystemSpec::validate() const {
  FieldCalculus calc(table);
  calc.check(drift);
  for (const auto& f : inputs) calc.check(f);
  for (const auto& h : outputs) calc.check(h);
  for (const auto& a : avoid) table.check(a);
  if (input_names.size() != inputs.size()) throw InvalidArgument("input names and fields differ in count");
  if (output_names.size() != outputs.size()) throw InvalidArgument("output names and fields differ in count");
}

std::vector<std::size_t> AnalysisReport::dims() const {
  std::vector<std::size_t> out;
  for (const auto& s : steps) out.push_back(s.dim);
  return out;
}

SamplePlan plan_for(const SystemSpec& sys, const SamplePlan& base) {
  SamplePlan plan = base;
  plan.symbols = sys.table.sampled_symbols();
  plan.time = sys.table.time();
  plan.avoid = base.avoid;
  for (const Expr& a : sys.avoid) plan.avoid.push_back(a);
  return plan;
}

AnalysisReport observability_ti(const SystemSpec& sys, const SamplePlan& plan, const AnalysisOptions& opts) {
  require_time_invariant(sys, "observability_tv");
  return run(sys, plan, opts, AnalysisKind::Observability, 1,
             [&](FieldCalculus& c) { return observability_recursion(sys, c, false); });
}

AnalysisReport observability_tv(const SystemSpec& sys, const SamplePlan& plan, const AnalysisOptions& opts) {
  return run(sys, plan, opts, AnalysisKind::Observability, 2,
             [&](FieldCalculus& c) { return observability_recursion(sys, c, true); });
}

AnalysisReport controllability_ti(const SystemSpec& sys, const SamplePlan& plan, const AnalysisOptions& opts) {
  require_time_invariant(sys, "controllability_tv");
  return run(sys, plan, opts, AnalysisKind::Controllability, 3,
             [&](FieldCalculus& c) { return controllability_recursion(sys, c, false); });
}

AnalysisReport controllability_tv(const SystemSpec& sys, const SamplePlan& plan, const AnalysisOptions& opts) {
  return run(sys, plan, opts, AnalysisKind::Controllability, 4,
             [&](FieldCalculus& c) { return controllability_recursion(sys, c, true); });
}

SystemSpec extend_state(const SystemSpec& sys) {
  const std::string tau = fresh_name(sys.table, "tau");
  std::vector<std::string> states{tau};
  for (const auto& s : sys.table.states()) states.push_back(s);
  SystemSpec ext;
  ext.name = sys.name;
  ext.table = SymbolTable(states, sys.table.time(), sys.table.parameters());
  const std::map<std::string, Expr, std::less<>> sub{{sys.table.time(), Expr::symbol(tau)}};
  auto lift = [&](const VectorField& f, const Expr& head) {
    VectorField out;
    out.components.push_back(head);
    for (const Expr& e : f.components) out.components.push_back(substitute(e, sub));
    return out;
  };
  ext.drift = lift(sys.drift, Expr(1L));
  ext.input_names = sys.input_names;
  for (const auto& f : sys.inputs) ext.inputs.push_back(lift(f, Expr()));
  std::string h0 = "h0";
  for (int k = 1; std::find(sys.output_names.begin(), sys.output_names.end(), h0) != sys.output_names.end(); ++k)
    h0 = "h0_" + std::to_string(k);
  ext.output_names.push_back(h0);
  ext.outputs.push_back(ScalarField{Expr::symbol(tau)});
  for (std::size_t j = 0; j < sys.p(); ++j) {
    ext.output_names.push_back(sys.output_names[j]);
    ext.outputs.push_back(ScalarField{substitute(sys.outputs[j].value, sub)});
  }
  for (const Expr& a : sys.avoid) ext.avoid.push_back(substitute(a, sub));
  return ext;
}

AnalysisReport oracle_observability(const SystemSpec& sys, const SamplePlan& plan, const AnalysisOptions& opts) {
  const SystemSpec ext = extend_state(sys);
  AnalysisOptions o = opts;
  if (!o.max_steps) o.max_steps = sys.n();
  AnalysisReport r = run(ext, plan, o, AnalysisKind::Observability, 5,
                         [&](FieldCalculus& c) { return observability_recursion(ext, c, false); });
  return r;
}

AnalysisReport oracle_controllability(const SystemSpec& sys, const SamplePlan& plan, const AnalysisOptions& opts) {
  const SystemSpec ext = extend_state(sys);
  AnalysisOptions o = opts;
  if (!o.max_steps) o.max_steps = sys.n();
  return run(ext, plan, o, AnalysisKind::Controllability, 6,
             [&](FieldCalculus& c) { return controllability_recursion(ext, c, false); });
}

void check_annihilators(AnalysisReport& report, const std::vector<AnnihilatorFixture>& fixtures) {
  if (!report.basis) throw InvalidArgument("report has no basis");
  for (const auto& f : fixtures) {
    if (f.kind != report.kind) continue;
    const AnnihilatorResult r = verify_annihilator(*report.basis, f.components, report.plan);
    report.annihilators.push_back({f.name, r.verified, r.symbolic, f.expectation});
  }
}

// ---------------------------------------------------------------------------
// Linear time-varying recursions

namespace {

using Matrix = std::vector<std::vector<Expr>>;

Matrix matmul(const Matrix& a, const Matrix& b) {
  const std::size_t rows = a.size();
  const std::size_t inner = b.size();
  const std::size_t cols = inner ? b[0].size() : 0;
  Matrix out(rows, std::vector<Expr>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      std::vector<Expr> terms;
      for (std::size_t k = 0; k < inner; ++k) terms.push_back(a[i][k] * b[k][j]);
      out[i][j] = add(terms);
    }
  return out;
}

Matrix time_derivative(const Matrix& m, const std::string& t) {
  Matrix out = m;
  for (auto& row : out)
    for (auto& e : row) e = differentiate(e, t);
  return out;
}

Matrix combine(const Matrix& a, const Matrix& b, int sign) {
  Matrix out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) out[i][j] = sign > 0 ? a[i][j] + b[i][j] : a[i][j] - b[i][j];
  return out;
}

Matrix transpose(const Matrix& m) {
  if (m.empty()) return {};
  Matrix out(m[0].size(), std::vector<Expr>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) out[j][i] = m[i][j];
  return out;
}

SamplePlan linear_plan(const LinearTVSystem& sys, SamplePlan plan) {
  plan.time = sys.time;
  auto note = [&](const Matrix& m) {
    for (const auto& row : m)
      for (const auto& e : row)
        for (const auto& s : free_symbols(e))
          if (s != sys.time && std::find(plan.symbols.begin(), plan.symbols.end(), s) == plan.symbols.end())
            plan.symbols.push_back(s);
  };
  note(sys.A);
  note(sys.B);
  note(sys.C);
  std::sort(plan.symbols.begin(), plan.symbols.end());
  return plan;
}

void check_shape(const LinearTVSystem& sys) {
  if (sys.A.size() != sys.n) throw InvalidArgument("A must have n rows");
  for (const auto& r : sys.A)
    if (r.size() != sys.n) throw InvalidArgument("A must be n x n");
  for (const auto& r : sys.B)
    if (r.size() != (sys.B.empty() ? 0 : sys.B[0].size())) throw InvalidArgument("B rows differ in length");
  if (!sys.B.empty() && sys.B.size() != sys.n) throw InvalidArgument("B must have n rows");
  for (const auto& r : sys.C)
    if (r.size() != sys.n) throw InvalidArgument("C must have n columns");
}

LinearReport profile_of(const std::vector<Matrix>& blocks, std::size_t n, const SamplePlan& plan) {
  LinearReport rep;
  rep.n = n;
  std::vector<std::vector<Expr>> rows;
  for (const auto& b : blocks) {
    for (const auto& r : b) rows.push_back(r);
    rep.profile.push_back(generic_rank(rows, plan));
  }
  rep.rank = rep.profile.empty() ? 0 : rep.profile.back();
  rep.holds = rep.rank == n;
  return rep;
}

}  // namespace

LinearReport linear_observability(const LinearTVSystem& sys, std::optional<std::size_t> k_max, const SamplePlan& plan) {
  check_shape(sys);
  const std::size_t k = k_max.value_or(sys.n > 0 ? sys.n - 1 : 0);
  std::vector<Matrix> blocks;
  Matrix N = sys.C;
  for (auto& r : N)
    for (auto& e : r) e = simplify(e);
  blocks.push_back(N);
  for (std::size_t i = 1; i <= k; ++i) {
    N = combine(matmul(N, sys.A), time_derivative(N, sys.time), +1);
    blocks.push_back(N);
  }
  return profile_of(blocks, sys.n, linear_plan(sys, plan));
}

LinearReport linear_controllability(const LinearTVSystem& sys, std::optional<std::size_t> k_max,
                                    const SamplePlan& plan) {
  check_shape(sys);
  const std::size_t k = k_max.value_or(sys.n > 0 ? sys.n - 1 : 0);
  std::vector<Matrix> blocks;
  Matrix M = sys.B;
  for (auto& r : M)
    for (auto& e : r) e = simplify(e);
  blocks.push_back(transpose(M));
  for (std::size_t i = 1; i <= k; ++i) {
    M = combine(matmul(sys.A, M), time_derivative(M, sys.time), -1);
    blocks.push_back(transpose(M));
  }
  return profile_of(blocks, sys.n, linear_plan(sys, plan));
}

std::optional<LinearTVSystem> as_linear(const SystemSpec& sys) {
  const std::size_t n = sys.n();
  FieldCalculus calc(sys.table);
  auto state_free = [&](const Expr& e) {
    for (const auto& s : sys.table.states())
      if (e.depends_on(s)) return false;
    return true;
  };
  // Row of coefficients of a linear form in the state, or nothing.
  auto linear_row = [&](const Expr& e) -> std::optional<std::vector<Expr>> {
    std::vector<Expr> row;
    std::vector<Expr> terms{simplify(e)};
    for (std::size_t j = 0; j < n; ++j) {
      Expr c = calc.partial(e, j);
      if (!state_free(c)) return std::nullopt;
      terms.push_back(-(c * sys.table.state_symbol(j)));
      row.push_back(c);
    }
    if (!add(terms).is_zero()) return std::nullopt;
    return row;
  };
  LinearTVSystem lin;
  lin.n = n;
  lin.time = sys.table.time();
  for (std::size_t i = 0; i < n; ++i) {
    auto row = linear_row(sys.drift[i]);
    if (!row) return std::nullopt;
    lin.A.push_back(std::move(*row));
  }
  if (sys.m() > 0) {
    lin.B.assign(n, std::vector<Expr>(sys.m()));
    for (std::size_t i = 0; i < sys.m(); ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const Expr e = simplify(sys.inputs[i][k]);
        if (!state_free(e)) return std::nullopt;
        lin.B[k][i] = e;
      }
  }
  for (const auto& h : sys.outputs) {
    auto row = linear_row(h.value);
    if (!row) return std::nullopt;
    lin.C.push_back(std::move(*row));
  }
  return lin;
}

// ---------------------------------------------------------------------------

std::vector<Finding> consistency_check(const SystemSpec& sys, const SamplePlan& plan) {
  std::vector<Finding> out;
  auto dims_text = [](const std::vector<std::size_t>& d) {
    std::string s = "[";
    for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
    return s + "]";
  };
  auto guarded = [&](const std::string& name, const std::function<Finding()>& fn) {
    try {
      out.push_back(fn());
    } catch (const Error& e) {
      out.push_back({name, false, e.what()});
    }
  };
  const bool tv = sys.time_varying();
  std::optional<AnalysisReport> obs, ctrl;
  if (sys.p() > 0) obs = observability_tv(sys, plan);
  if (sys.m() > 0) ctrl = controllability_tv(sys, plan);

  if (!tv && obs) {
    guarded("algorithm 2 reduces to algorithm 1", [&] {
      const auto ti = observability_ti(sys, plan);
      return Finding{"algorithm 2 reduces to algorithm 1", ti.dims() == obs->dims(),
                     dims_text(ti.dims()) + " vs " + dims_text(obs->dims())};
    });
  }
  if (!tv && ctrl) {
    guarded("algorithm 4 reduces to algorithm 3", [&] {
      const auto ti = controllability_ti(sys, plan);
      return Finding{"algorithm 4 reduces to algorithm 3", ti.dims() == ctrl->dims(),
                     dims_text(ti.dims()) + " vs " + dims_text(ctrl->dims())};
    });
  }
  if (auto lin = as_linear(sys)) {
    if (obs && !lin->C.empty()) {
      guarded("observability matches linear recursion", [&] {
        const auto lr = linear_observability(*lin, std::nullopt, plan);
        return Finding{"observability matches linear recursion", lr.rank == obs->rank,
                       std::to_string(obs->rank) + " vs " + std::to_string(lr.rank)};
      });
    }
    if (ctrl && !lin->B.empty()) {
      guarded("controllability matches linear recursion", [&] {
        const auto lr = linear_controllability(*lin, std::nullopt, plan);
        return Finding{"controllability matches linear recursion", lr.rank == ctrl->rank,
                       std::to_string(ctrl->rank) + " vs " + std::to_string(lr.rank)};
      });
    }
  }
  if (obs) {
    guarded("extended observable rank is one more", [&] {
      const auto ext = oracle_observability(sys, plan);
      return Finding{"extended observable rank is one more", ext.rank == obs->rank + 1,
                     std::to_string(ext.rank) + " vs 1 + " + std::to_string(obs->rank)};
    });
  }
  if (ctrl) {
    std::optional<AnalysisReport> ext;
    guarded("extended controllable rank is equal", [&] {
      ext = oracle_controllability(sys, plan);
      return Finding{"extended controllable rank is equal", ext->rank == ctrl->rank,
                     std::to_string(ext->rank) + " vs " + std::to_string(ctrl->rank)};
    });
    if (ext) {
      guarded("extended distribution has zero time component", [&] {
        bool zero = true;
        for (const auto& g : ext->basis->generators()) zero = zero && identically_zero(g.components[0]);
        return Finding{"extended distribution has zero time component", zero,
                       std::to_string(ext->basis->generators().size()) + " generators"};
      });
    }
  }
  return out;
}

}  // namespace rankcond
