#include <gtest/gtest.h>

#include "random_systems.hpp"
#include "rankcond/errors.hpp"
#include "rankcond/fields.hpp"
#include "rankcond/span.hpp"
#include "span_properties.hpp"

using namespace rankcond;
using testsupport::PolyGen;

namespace {

Expr P(std::string_view s) { return simplify(parse_expr(s)); }

std::vector<Expr> V(std::initializer_list<std::string_view> xs) {
  std::vector<Expr> out;
  for (auto x : xs) out.push_back(P(x));
  return out;
}

SamplePlan plan_over(std::vector<std::string> symbols) {
  SamplePlan p;
  p.symbols = std::move(symbols);
  return p;
}

Generator gen_of(std::vector<Expr> c, std::string label = "g") {
  return Generator{std::move(c), Provenance{0, "seed", std::nullopt, std::move(label)}, std::nullopt};
}

}  // namespace

TEST(GenericRank, TimeWeightedRows) {
  // det [[t, t^2], [1, 2t]] = t^2
  EXPECT_EQ(generic_rank({V({"t", "t^2"}), V({"1", "2*t"})}, plan_over({"x1", "x2"})), 2u);
}

TEST(GenericRank, ZeroRow) { EXPECT_EQ(generic_rank({V({"0", "0", "0"})}, plan_over({"x1", "x2", "x3"})), 0u); }

TEST(GenericRank, DependentRows) {
  EXPECT_EQ(generic_rank({V({"x1", "x2"}), V({"x1*x2", "x2^2"})}, plan_over({"x1", "x2"})), 1u);
}

TEST(GenericRank, FloatModeForTranscendentals) {
  EXPECT_EQ(generic_rank({V({"cos(x1)", "sin(x1)"}), V({"-sin(x1)", "cos(x1)"})}, plan_over({"x1", "x2"})), 2u);
  EXPECT_EQ(generic_rank({V({"cos(x1)^2 + sin(x1)^2", "0"}), V({"1", "0"})}, plan_over({"x1", "x2"})), 1u);
}

TEST(GenericRank, RejectsBadPlan) {
  SamplePlan p = plan_over({"x1"});
  p.samples = 0;
  EXPECT_THROW(generic_rank({V({"x1"})}, p), InvalidArgument);
  p.samples = 10;
  p.max_attempts = 5;
  EXPECT_THROW(generic_rank({V({"x1"})}, p), InvalidArgument);
}

TEST(SpanBasis, ExtendTimeWeightedObservability) {
  const SymbolTable tab({"x1", "x2", "x3"});
  SpanBasis b(SpanKind::Codistribution, tab, {});
  EXPECT_EQ(b.extend({gen_of(V({"t", "t^2", "t^3"}))}), 1u);
  EXPECT_EQ(b.extend({gen_of(V({"1", "2*t", "3*t^2"}))}), 1u);
  EXPECT_EQ(b.rank(), 2u);
}

TEST(SpanBasis, ExtendIsIdempotent) {
  const SymbolTable tab({"x1", "x2"});
  SpanBasis b(SpanKind::Distribution, tab, {});
  b.extend({gen_of(V({"x1", "x2"})), gen_of(V({"t", "1"}))});
  const auto copy = b.generators();
  EXPECT_EQ(b.extend(copy), 0u);
  EXPECT_EQ(b.rank(), 2u);
}

TEST(SpanBasis, ExtendScalingFieldWithDriftImage) {
  const SymbolTable tab({"x1", "x2", "x3"});
  SpanBasis b(SpanKind::Distribution, tab, {});
  b.extend({gen_of(V({"x1", "x2", "x3"}))});
  EXPECT_EQ(b.extend({gen_of(V({"-t", "-t^2", "-t^3"}))}), 1u);
}

TEST(SpanBasis, RejectsRedundantAndZero) {
  const SymbolTable tab({"x1", "x2"});
  SpanBasis b(SpanKind::Codistribution, tab, {});
  EXPECT_FALSE(b.try_add(gen_of(V({"0", "0"}))));
  EXPECT_TRUE(b.try_add(gen_of(V({"x1", "1"}))));
  EXPECT_FALSE(b.try_add(gen_of(V({"x1*x2", "x2"}))));
  EXPECT_EQ(b.rank(), 1u);
}

TEST(SpanBasis, KeepsOriginalExpressions) {
  const SymbolTable tab({"x1", "x2"});
  SpanBasis b(SpanKind::Codistribution, tab, {});
  b.extend({gen_of(V({"x1", "1"}), "a"), gen_of(V({"x1 + x2", "1 + x2^2"}), "b")});
  ASSERT_EQ(b.rank(), 2u);
  EXPECT_EQ(b.generators()[1].components[0], P("x1 + x2"));
  EXPECT_EQ(b.generators()[1].provenance.label, "b");
}

TEST(SpanBasis, ModularAgreesWithRational) {
  const SymbolTable tab({"x1", "x2", "x3"});
  SamplePlan mod;
  mod.arithmetic = Arithmetic::Modular;
  SpanBasis a(SpanKind::Codistribution, tab, {}), b(SpanKind::Codistribution, tab, mod);
  const std::vector<Generator> cands{gen_of(V({"x1", "x2", "x3"})), gen_of(V({"x1^2", "x1*x2", "x1*x3"})),
                                     gen_of(V({"t", "1/3", "x2"})), gen_of(V({"t + x1", "1/3 + x2", "x2 + x3"})),
                                     gen_of(V({"0", "x1", "1"}))};
  EXPECT_EQ(a.extend(cands), b.extend(cands));
  EXPECT_EQ(a.rank(), 3u);
}

TEST(Annihilator, FullRankHasOnlyTrivial) {
  const SymbolTable tab({"x1", "x2"});
  SpanBasis b(SpanKind::Codistribution, tab, {});
  b.extend({gen_of(V({"1", "0"})), gen_of(V({"x1", "1"}))});
  EXPECT_FALSE(verify_annihilator(b, V({"x2", "1"}), {}).verified);
  EXPECT_TRUE(numeric_annihilator(b, {}).empty());
}

TEST(Annihilator, SymbolicPairing) {
  const SymbolTable tab({"x1", "x2", "x3"});
  SpanBasis b(SpanKind::Codistribution, tab, {});
  b.extend({gen_of(V({"x2", "-x1", "0"})), gen_of(V({"0", "0", "1"}))});
  const auto r = verify_annihilator(b, V({"x1", "x2", "0"}), {});
  EXPECT_TRUE(r.verified);
  EXPECT_TRUE(r.symbolic);
  const auto bad = verify_annihilator(b, V({"x1", "x2", "1"}), {});
  EXPECT_FALSE(bad.verified);
  EXPECT_EQ(bad.failing_generator, std::optional<std::size_t>(1));
}

TEST(Annihilator, NumericNullSpaceOfTimeWeightedRows) {
  const SymbolTable tab({"x1", "x2", "x3"});
  SpanBasis b(SpanKind::Codistribution, tab, {});
  b.extend({gen_of(V({"t", "t^2", "t^3"})), gen_of(V({"1", "2*t", "3*t^2"}))});
  const auto null = numeric_annihilator(b, {});
  ASSERT_EQ(null.size(), 1u);
  // Oracle: the cross product of the two rows is proportional to (tau^2, -2 tau, 1).
  const auto& v = null[0];
  EXPECT_NE(v[2], 0);
  EXPECT_EQ(4 * v[0] * v[2], v[1] * v[1]);
}

TEST(Annihilator, EmptyBasisGivesIdentity) {
  SpanBasis b(SpanKind::Codistribution, SymbolTable({"x1", "x2"}), {});
  EXPECT_EQ(numeric_annihilator(b, {}).size(), 2u);
}

TEST(ExactRank, Basics) {
  EXPECT_EQ(exact_rank({{1, 2}, {2, 4}}), 1u);
  EXPECT_EQ(exact_rank({{1, 2}, {3, 4}}), 2u);
  const auto null = exact_null_space({{1, 1, 0}}, 3);
  EXPECT_EQ(null.size(), 2u);
  for (const auto& v : null) EXPECT_EQ(v[0] + v[1], 0);
}

class SpanProperty : public ::testing::TestWithParam<int> {};

TEST_P(SpanProperty, RankMonotoneAndReduced) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  const std::size_t n = 2 + seed % 3;
  auto names = testsupport::state_names(n);
  SpanBasis b(SpanKind::Codistribution, SymbolTable(names), {});
  SamplePlan plan;
  plan.symbols = names;
  names.push_back("t");
  PolyGen gen(300 + seed, names);
  std::size_t last = 0;
  for (int k = 0; k < 6; ++k) {
    std::vector<Generator> cands;
    for (int j = 0; j < 2; ++j) cands.push_back(gen_of(gen.vec(n, 2, 2)));
    b.extend(cands);
    EXPECT_GE(b.rank(), last);
    EXPECT_LE(b.rank(), n);
    EXPECT_EQ(generic_rank(b, plan), b.rank());
    last = b.rank();
  }
}

TEST_P(SpanProperty, CodistributionImagesOfGeneratorsSuffice) {
  const auto r = testsupport::span_equality_instance(SpanKind::Codistribution, static_cast<std::uint64_t>(GetParam()));
  EXPECT_EQ(r.from_generators, r.from_combinations) << "n=" << r.n << " s=" << r.generators;
}

TEST_P(SpanProperty, DistributionImagesOfGeneratorsSuffice) {
  const auto r = testsupport::span_equality_instance(SpanKind::Distribution, static_cast<std::uint64_t>(GetParam()));
  EXPECT_EQ(r.from_generators, r.from_combinations) << "n=" << r.n << " s=" << r.generators;
}

INSTANTIATE_TEST_SUITE_P(Random, SpanProperty, ::testing::Range(0, 10));
