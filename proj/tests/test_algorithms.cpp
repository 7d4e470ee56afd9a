#include <gtest/gtest.h>

#include "random_systems.hpp"
#include "rankcond/algorithms.hpp"
#include "rankcond/corpus.hpp"
#include "rankcond/errors.hpp"
#include "rankcond/span.hpp"
#include "rankcond/sysdsl.hpp"

using namespace rankcond;
using testsupport::random_system;

namespace {

Expr P(std::string_view s) { return simplify(parse_expr(s)); }

std::vector<Expr> V(std::initializer_list<std::string_view> xs) {
  std::vector<Expr> out;
  for (auto x : xs) out.push_back(P(x));
  return out;
}

SystemSpec sys_of(std::string_view text) { return lower(parse_system(text)); }

std::vector<std::size_t> iota_dims(std::size_t n) {
  std::vector<std::size_t> d;
  for (std::size_t i = 1; i <= n; ++i) d.push_back(i);
  return d;
}

bool strictly_increasing(const std::vector<std::size_t>& d) {
  for (std::size_t i = 1; i < d.size(); ++i)
    if (d[i] <= d[i - 1]) return false;
  return true;
}

}  // namespace

TEST(ObservabilityTI, UnobservedSecondState) {
  const auto r = observability_ti(sys_of("state x1 x2\noutput h1 = x1\n"), {});
  EXPECT_EQ(r.dims(), (std::vector<std::size_t>{1}));
  EXPECT_FALSE(r.holds);
  EXPECT_EQ(r.codimension, 1u);
  EXPECT_EQ(r.algorithm, 1);
}

TEST(ObservabilityTI, IntegratorChainMatchesKalman) {
  const auto r = observability_ti(sys_of("state x1 x2\ndrift = [x2, 0]\noutput h1 = x1\n"), {});
  // Oracle: rank [C; CA] with C = (1, 0), A = [[0, 1], [0, 0]].
  EXPECT_EQ(r.rank, exact_rank({{1, 0}, {0, 1}}));
  EXPECT_EQ(r.dims(), (std::vector<std::size_t>{1, 2}));
  EXPECT_TRUE(r.holds);
}

TEST(ControllabilityTI, UnicycleBracketCompletesRank) {
  const auto sys = sys_of("state x1 x2 x3\ninput f1 = [cos(x3), sin(x3), 0]\ninput f2 = [0, 0, 1]\n");
  const auto br = lie_bracket(sys.table, sys.inputs[0], sys.inputs[1]);
  EXPECT_EQ(br.components, V({"sin(x3)", "-cos(x3)", "0"}));
  const auto r = controllability_ti(sys, {});
  EXPECT_EQ(r.rank, 3u);
  EXPECT_TRUE(r.holds);
}

TEST(ControllabilityTI, ConstantFieldAlone) {
  const auto r = controllability_ti(sys_of("state x1 x2\ninput f1 = [1, 0]\n"), {});
  EXPECT_EQ(r.rank, 1u);
  EXPECT_FALSE(r.holds);
}

TEST(ControllabilityTI, ScalingFieldAlone) {
  const auto r = controllability_ti(sys_of("state x1 x2 x3\ninput f1 = [x1, x2, x3]\n"), {});
  EXPECT_EQ(r.rank, 1u);
  EXPECT_FALSE(r.holds);
}

TEST(ObservabilityTV, TimeWeightedOutput) {
  const auto r = observability_tv(lower(corpus_entry("poly_obs_n5").document), {});
  EXPECT_EQ(r.dims(), iota_dims(5));
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.algorithm, 2);
  EXPECT_EQ(r.converged_at, 4u);
}

TEST(ControllabilityTV, TimePowerDrift) {
  const auto r = controllability_tv(lower(corpus_entry("poly_ctrl_n4").document), {});
  EXPECT_EQ(r.dims(), iota_dims(4));
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.algorithm, 4);
}

TEST(Algorithms, Preconditions) {
  const auto no_outputs = sys_of("state x1\ninput f1 = [1]\n");
  EXPECT_THROW(observability_tv(no_outputs, {}), InvalidArgument);
  const auto no_inputs = sys_of("state x1\noutput h1 = x1\n");
  EXPECT_THROW(controllability_tv(no_inputs, {}), InvalidArgument);
  EXPECT_THROW(observability_ti(sys_of("state x1\noutput h1 = t*x1\n"), {}), InvalidArgument);
}

TEST(Algorithms, SingleStateAllowed) {
  const auto r = observability_tv(sys_of("state x1\noutput h1 = x1\n"), {});
  EXPECT_EQ(r.rank, 1u);
  EXPECT_TRUE(r.holds);
}

TEST(Algorithms, ProvenanceStepsNonDecreasing) {
  const auto r = observability_tv(lower(corpus_entry("poly_obs_n4").document), {});
  std::size_t last = 0;
  for (const auto& g : r.basis->generators()) {
    EXPECT_GE(g.provenance.step, last);
    last = g.provenance.step;
  }
  EXPECT_EQ(r.basis->generators()[3].provenance.label, "tilde_f0 ∘ tilde_f0 ∘ tilde_f0 ∘ d h1");
}

TEST(ExtendState, ZeroDriftSingleState) {
  const auto ext = extend_state(sys_of("state x1\ninput f1 = [x1^2]\noutput h1 = x1\n"));
  EXPECT_EQ(ext.n(), 2u);
  EXPECT_EQ(ext.drift.components, V({"1", "0"}));
  EXPECT_EQ(ext.inputs[0].components, V({"0", "x1^2"}));
}

TEST(ExtendState, TimeInvariantDriftGainsLeadingOne) {
  const auto ext = extend_state(sys_of("state x1 x2\ndrift = [x2, -x1]\noutput h1 = x1\n"));
  EXPECT_EQ(ext.drift.components, V({"1", "x2", "-x1"}));
}

TEST(ExtendState, TimeBecomesState) {
  const auto ext = extend_state(lower(corpus_entry("poly_ctrl_n3").document));
  EXPECT_EQ(ext.table.states().front(), "tau");
  EXPECT_EQ(ext.drift.components, V({"1", "tau", "tau^2", "tau^3"}));
}

TEST(Oracle, ObservableRankIsOneMore) {
  const auto sys = lower(corpus_entry("poly_obs_n3").document);
  EXPECT_EQ(oracle_observability(sys, {}).rank, 4u);
}

TEST(Oracle, ControllableGeneratorsHaveZeroTimeComponent) {
  const auto sys = lower(corpus_entry("poly_ctrl_n3").document);
  const auto r = oracle_controllability(sys, {});
  EXPECT_EQ(r.rank, 3u);
  for (const auto& g : r.basis->generators()) EXPECT_TRUE(identically_zero(g.components[0])) << g.provenance.label;
}

TEST(LinearRecursion, TimeWeightedOutputRow) {
  LinearTVSystem l;
  l.n = 2;
  l.A = {{Expr(), Expr()}, {Expr(), Expr()}};
  l.C = {V({"t", "t^2"})};
  const auto r = linear_observability(l);
  EXPECT_EQ(r.rank, 2u);
  EXPECT_EQ(r.profile, (std::vector<std::size_t>{1, 2}));
  EXPECT_TRUE(r.holds);
}

TEST(LinearRecursion, ConstantInputColumn) {
  LinearTVSystem l;
  l.n = 2;
  l.A = {{Expr(), Expr()}, {Expr(), Expr()}};
  l.B = {V({"1"}), V({"0"})};
  const auto r = linear_controllability(l);
  EXPECT_EQ(r.rank, 1u);
  EXPECT_FALSE(r.holds);
}

TEST(LinearRecursion, DoubleIntegratorMatchesKalman) {
  LinearTVSystem l;
  l.n = 2;
  l.A = {V({"0", "1"}), V({"0", "0"})};
  l.B = {V({"0"}), V({"1"})};
  // Oracle: Kalman matrix [B, AB] written out by hand.
  const std::vector<std::vector<Rational>> kalman{{0, 1}, {1, 0}};
  const auto r = linear_controllability(l);
  EXPECT_EQ(r.rank, exact_rank(kalman));
  EXPECT_EQ(r.rank, 2u);
}

TEST(LinearRecursion, DetectsLinearForm) {
  const auto l = as_linear(lower(corpus_entry("ltv_linear_demo").document));
  ASSERT_TRUE(l.has_value());
  EXPECT_EQ(l->n, 2u);
  EXPECT_EQ(l->C[0], V({"t", "t^2"}));
  EXPECT_FALSE(as_linear(sys_of("state x1\ndrift = [x1^2]\noutput h1 = x1\n")).has_value());
}

TEST(LinearRecursion, AgreesWithCalculusOnRandomLTV) {
  // Random A(t), B(t), C(t) with polynomial entries in t: the linear
  // recursions and the nonlinear algorithms must give the same ranks.
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    testsupport::PolyGen gen(500 + seed, {"t"});
    const std::size_t n = 2 + seed % 3;
    std::string text = "state";
    for (std::size_t i = 1; i <= n; ++i) text += " x" + std::to_string(i);
    text += "\ndrift = [";
    for (std::size_t i = 0; i < n; ++i) {
      text += i ? ", " : "";
      std::string row = "0";
      for (std::size_t j = 0; j < n; ++j)
        if (gen.small(0, 2) == 0) row += " + (" + to_string(gen.poly(1, 1)) + ")*x" + std::to_string(j + 1);
      text += row;
    }
    text += "]\ninput f1 = [";
    for (std::size_t i = 0; i < n; ++i) text += (i ? ", " : "") + to_string(gen.poly(2, 1));
    text += "]\noutput h1 = 0";
    for (std::size_t j = 0; j < n; ++j)
      if (gen.small(0, 1) == 0) text += " + (" + to_string(gen.poly(2, 1)) + ")*x" + std::to_string(j + 1);
    text += "\n";
    const auto sys = sys_of(text);
    const auto l = as_linear(sys);
    ASSERT_TRUE(l.has_value()) << text;
    EXPECT_EQ(linear_observability(*l).rank, observability_tv(sys, {}).rank) << text;
    EXPECT_EQ(linear_controllability(*l).rank, controllability_tv(sys, {}).rank) << text;
  }
}

TEST(ConsistencyCheck, TimeInvariantSystemPasses) {
  const auto sys = sys_of("state x1 x2\ndrift = [x2, -x1^3]\ninput f1 = [0, 1]\noutput h1 = x1\n");
  const auto f = consistency_check(sys, {});
  EXPECT_GE(f.size(), 4u);
  for (const auto& x : f) EXPECT_TRUE(x.passed) << x.name << ": " << x.detail;
}

class AlgorithmsProperty : public ::testing::TestWithParam<int> {};

TEST_P(AlgorithmsProperty, DimsIncreaseWithinBound) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  const std::size_t n = 1 + seed % 5;
  const auto sys = random_system(700 + seed, n, 1, 1, true);
  for (const auto& r : {observability_tv(sys, {}), controllability_tv(sys, {})}) {
    EXPECT_TRUE(strictly_increasing(r.dims())) << to_string(r.kind);
    EXPECT_LE(r.dims().size(), n);
    EXPECT_LE(r.converged_at, n - 1);
    EXPECT_EQ(r.rank, r.dims().back());
    EXPECT_EQ(r.codimension, n - r.rank);
    EXPECT_EQ(r.holds, r.rank == n);
  }
}

TEST_P(AlgorithmsProperty, TimeVaryingReducesOnTimeInvariant) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  const auto sys = random_system(900 + seed, 2 + seed % 3, 1 + seed % 2, 1, false);
  AnalysisOptions canonical;
  canonical.form = FieldForm::Canonical;
  const auto o1 = observability_ti(sys, {}, canonical), o2 = observability_tv(sys, {}, canonical);
  const auto c3 = controllability_ti(sys, {}, canonical), c4 = controllability_tv(sys, {}, canonical);
  EXPECT_EQ(o1.dims(), o2.dims());
  EXPECT_EQ(c3.dims(), c4.dims());
  auto same_generators = [](const AnalysisReport& a, const AnalysisReport& b) {
    ASSERT_EQ(a.basis->generators().size(), b.basis->generators().size());
    for (std::size_t i = 0; i < a.basis->generators().size(); ++i)
      EXPECT_EQ(a.basis->generators()[i].components, b.basis->generators()[i].components) << "generator " << i;
  };
  same_generators(o1, o2);
  same_generators(c3, c4);
}

TEST_P(AlgorithmsProperty, GraphFormGivesSameTrace) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  const auto sys = random_system(1100 + seed, 2 + seed % 3, 1, 1, true);
  AnalysisOptions canonical;
  canonical.form = FieldForm::Canonical;
  EXPECT_EQ(observability_tv(sys, {}).dims(), observability_tv(sys, {}, canonical).dims());
  EXPECT_EQ(controllability_tv(sys, {}).dims(), controllability_tv(sys, {}, canonical).dims());
}

TEST_P(AlgorithmsProperty, ExtraOutputOrFieldNeverLowersRank) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  auto sys = random_system(1300 + seed, 2 + seed % 3, 1, 1, true);
  const auto more = random_system(1500 + seed, sys.n(), 1, 1, true);
  const std::size_t obs = observability_tv(sys, {}).rank, ctrl = controllability_tv(sys, {}).rank;
  auto with_output = sys;
  with_output.output_names.push_back("h2");
  with_output.outputs.push_back(more.outputs[0]);
  EXPECT_GE(observability_tv(with_output, {}).rank, obs);
  auto with_field = sys;
  with_field.input_names.push_back("f2");
  with_field.inputs.push_back(more.inputs[0]);
  EXPECT_GE(controllability_tv(with_field, {}).rank, ctrl);
}

TEST_P(AlgorithmsProperty, OracleRelations) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  const auto sys = random_system(1700 + seed, 1 + seed % 3, 1, 1, true);
  EXPECT_EQ(oracle_observability(sys, {}).rank, observability_tv(sys, {}).rank + 1);
  const auto ext = oracle_controllability(sys, {});
  EXPECT_EQ(ext.rank, controllability_tv(sys, {}).rank);
  for (const auto& g : ext.basis->generators()) EXPECT_TRUE(identically_zero(g.components[0]));
}

TEST_P(AlgorithmsProperty, ModularArithmeticGivesSameTrace) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  const auto sys = random_system(1900 + seed, 2 + seed % 3, 1, 1, true);
  SamplePlan mod;
  mod.arithmetic = Arithmetic::Modular;
  EXPECT_EQ(observability_tv(sys, {}).dims(), observability_tv(sys, mod).dims());
  EXPECT_EQ(controllability_tv(sys, {}).dims(), controllability_tv(sys, mod).dims());
}

INSTANTIATE_TEST_SUITE_P(Random, AlgorithmsProperty, ::testing::Range(0, 50));

TEST(AlgorithmsDeterminism, SameSeedSameReport) {
  const auto sys = random_system(4242, 3, 2, 2, true);
  const auto a = controllability_tv(sys, {}), b = controllability_tv(sys, {});
  EXPECT_EQ(a.dims(), b.dims());
  for (std::size_t i = 0; i < a.basis->generators().size(); ++i)
    EXPECT_EQ(a.basis->generators()[i].provenance.label, b.basis->generators()[i].provenance.label);
}
