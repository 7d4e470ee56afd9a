#include "rankcond/corpus.hpp"

#include <map>
#include <sstream>

#include "rankcond/errors.hpp"

namespace rankcond {

// Defined in the generated corpus_data.cpp: (name, text) pairs of the
// shipped corpus/*.sys files.
namespace detail {
extern const std::vector<std::pair<std::string_view, std::string_view>> kCorpusFiles;
}

namespace {

std::string state_list(std::size_t n) {
  std::string s;
  for (std::size_t i = 1; i <= n; ++i) s += (i > 1 ? " x" : "x") + std::to_string(i);
  return s;
}

std::string vector_text(std::size_t n, auto&& component) {
  std::string s = "[";
  for (std::size_t i = 1; i <= n; ++i) s += (i > 1 ? ", " : "") + component(i);
  return s + "]";
}

std::string dims_text(std::size_t n) {
  return vector_text(n, [](std::size_t i) { return std::to_string(i); });
}

const std::map<std::string, std::string, std::less<>>& notes() {
  static const std::map<std::string, std::string, std::less<>> m = {
      {"lunar_full",
       "Lunar module with fuel consumption. Observability trace 3,5,7,12,13 (rank 13 of 14, yaw unobservable); "
       "controllability trace 3,6,8,10,12 (gravity and quaternion norm unreachable)."},
      {"lunar_takeoff_const_mass",
       "Take-off with constant mass and inertia: time-invariant, trace 3,5,7,9; yaw and absolute scale unobservable."},
      {"lunar_takeoff_var_mass",
       "Take-off with fuel consumption: trace 3,5,7,9,10; absolute scale becomes observable, yaw stays unobservable."},
      {"ltv_linear_demo", "Linear time-varying system checked against the linear recursions."},
  };
  return m;
}

CorpusEntry make_entry(std::string name, std::string_view text, std::string note) {
  CorpusEntry e;
  e.name = std::move(name);
  e.document = parse_system(text);
  e.observability_dims = e.document.expected_dims(AnalysisKind::Observability);
  e.controllability_dims = e.document.expected_dims(AnalysisKind::Controllability);
  e.annihilators = e.document.annihilators;
  e.note = std::move(note);
  return e;
}

std::vector<CorpusEntry> build() {
  std::vector<CorpusEntry> out;
  for (std::size_t n = 2; n <= 6; ++n)
    out.push_back(make_entry("poly_obs_n" + std::to_string(n), poly_observability_text(n),
                             "Output sum x_i t^i weights each component by a different power of time; "
                             "observable with trace 1..n."));
  for (std::size_t n = 2; n <= 6; ++n)
    out.push_back(make_entry("poly_ctrl_n" + std::to_string(n), poly_controllability_text(n),
                             "Drift (t, ..., t^n) with time derivatives spanning the state space; "
                             "controllable with trace 1..n."));
  for (const auto& [name, text] : detail::kCorpusFiles) {
    auto it = notes().find(name);
    out.push_back(make_entry(std::string(name), text, it == notes().end() ? "" : it->second));
  }
  return out;
}

}  // namespace

std::string poly_observability_text(std::size_t n) {
  std::ostringstream s;
  s << "system poly_obs_n" << n << "\n";
  s << "state " << state_list(n) << "\n";
  s << "time t\n";
  s << "input f1 = " << vector_text(n, [](std::size_t i) { return "x" + std::to_string(i); }) << "\n";
  s << "output h1 = ";
  for (std::size_t i = 1; i <= n; ++i) s << (i > 1 ? " + " : "") << "x" << i << "*t^" << i;
  s << "\n";
  s << "expect observability dims = " << dims_text(n) << "\n";
  return s.str();
}

std::string poly_controllability_text(std::size_t n) {
  std::ostringstream s;
  s << "system poly_ctrl_n" << n << "\n";
  s << "state " << state_list(n) << "\n";
  s << "time t\n";
  s << "drift = " << vector_text(n, [](std::size_t i) { return "t^" + std::to_string(i); }) << "\n";
  s << "input f1 = " << vector_text(n, [](std::size_t i) { return "x" + std::to_string(i); }) << "\n";
  s << "expect controllability dims = " << dims_text(n) << "\n";
  return s.str();
}

const std::vector<CorpusEntry>& corpus_entries() {
  static const std::vector<CorpusEntry> entries = build();
  return entries;
}

const CorpusEntry& corpus_entry(std::string_view name) {
  for (const auto& e : corpus_entries())
    if (e.name == name) return e;
  throw InvalidArgument("unknown corpus entry '" + std::string(name) + "'");
}

}  // namespace rankcond
