#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rankcond/fields.hpp"
#include "rankcond/sampling.hpp"
#include "rankcond/span.hpp"
#include "rankcond/symbols.hpp"

namespace rankcond {

/// Input-affine system dx/dt = f0(x,t) + sum_i f_i(x,t) u_i, y_j = h_j(x,t).
struct SystemSpec {
  std::string name;
  SymbolTable table;
  VectorField drift;
  std::vector<std::string> input_names;
  std::vector<VectorField> inputs;
  std::vector<std::string> output_names;
  std::vector<ScalarField> outputs;
  std::vector<Expr> avoid;

  std::size_t n() const { return table.dimension(); }
  std::size_t m() const { return inputs.size(); }
  std::size_t p() const { return outputs.size(); }
  /// True if the time symbol occurs in any field.
  bool time_varying() const;
  /// Checks arities, name counts and symbol membership; throws.
  void validate() const;
};

enum class AnalysisKind { Observability, Controllability };

std::string_view to_string(AnalysisKind kind);

struct StepRecord {
  std::size_t step = 0;
  std::size_t candidates = 0;
  /// Indices into the basis generators.
  std::vector<std::size_t> added;
  std::size_t dim = 0;
};

struct AnnihilatorCheck {
  std::string name;
  bool verified = false;
  bool symbolic = false;
  /// Expected outcome from the fixture, if any ("structural" or "fails").
  std::string expectation;
};

struct AnalysisReport {
  std::string system;
  AnalysisKind kind = AnalysisKind::Observability;
  /// 1..6 following the algorithm numbering of the recursions.
  int algorithm = 0;
  std::size_t n = 0;
  std::vector<StepRecord> steps;
  std::size_t converged_at = 0;
  std::size_t rank = 0;
  std::size_t codimension = 0;
  bool holds = false;
  /// A no-growth step was confirmed at fresh sample points.
  bool confirmed = false;
  std::vector<AnnihilatorCheck> annihilators;
  SamplePlan plan;
  std::shared_ptr<const SpanBasis> basis;

  std::vector<std::size_t> dims() const;
};

struct AnalysisOptions {
  /// Recursion step cap; defaults to n - 1.
  std::optional<std::size_t> max_steps;
  FieldForm form = FieldForm::Graph;
};

/// The system's sampled symbols, time symbol and avoid predicates merged
/// into `base` (seed, sample count and attempt budget are kept).
SamplePlan plan_for(const SystemSpec& sys, const SamplePlan& base = {});

AnalysisReport observability_ti(const SystemSpec& sys, const SamplePlan& plan, const AnalysisOptions& opts = {});
AnalysisReport observability_tv(const SystemSpec& sys, const SamplePlan& plan, const AnalysisOptions& opts = {});
AnalysisReport controllability_ti(const SystemSpec& sys, const SamplePlan& plan, const AnalysisOptions& opts = {});
AnalysisReport controllability_tv(const SystemSpec& sys, const SamplePlan& plan, const AnalysisOptions& opts = {});

/// Autonomous (n+1)-state system with time as the first state.
SystemSpec extend_state(const SystemSpec& sys);
AnalysisReport oracle_observability(const SystemSpec& sys, const SamplePlan& plan, const AnalysisOptions& opts = {});
AnalysisReport oracle_controllability(const SystemSpec& sys, const SamplePlan& plan, const AnalysisOptions& opts = {});

/// Verifies each named candidate against the converged basis and records
/// the results in the report.
struct AnnihilatorFixture {
  std::string name;
  AnalysisKind kind = AnalysisKind::Observability;
  std::vector<Expr> components;
  std::string expectation;
};
void check_annihilators(AnalysisReport& report, const std::vector<AnnihilatorFixture>& fixtures);

/// dx/dt = A(t) x + B(t) u, y = C(t) x.
struct LinearTVSystem {
  std::size_t n = 0;
  std::vector<std::vector<Expr>> A;
  std::vector<std::vector<Expr>> B;
  std::vector<std::vector<Expr>> C;
  std::string time = "t";
};

struct LinearReport {
  std::size_t n = 0;
  std::size_t rank = 0;
  /// Rank after including blocks 0..k.
  std::vector<std::size_t> profile;
  bool holds = false;
};

/// N_0 = C, N_i = N_{i-1} A + dN_{i-1}/dt, stacked for i <= k_max.
LinearReport linear_observability(const LinearTVSystem& sys, std::optional<std::size_t> k_max = std::nullopt,
                                  const SamplePlan& plan = {});
/// M_0 = B, M_i = A M_{i-1} - dM_{i-1}/dt, concatenated for i <= k_max.
LinearReport linear_controllability(const LinearTVSystem& sys, std::optional<std::size_t> k_max = std::nullopt,
                                    const SamplePlan& plan = {});

/// The linear form of a system whose drift is linear in the state, whose
/// inputs are state-independent and whose outputs are linear in the state.
std::optional<LinearTVSystem> as_linear(const SystemSpec& sys);

/// Structural zero test: the zero constant, or a small raw expression
/// that simplifies to zero. Never samples.
bool identically_zero(const Expr& e);

struct Finding {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<Finding> consistency_check(const SystemSpec& sys, const SamplePlan& plan);

}  // namespace rankcond
