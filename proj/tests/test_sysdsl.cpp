#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "random_systems.hpp"
#include "rankcond/corpus.hpp"
#include "rankcond/errors.hpp"
#include "rankcond/sysdsl.hpp"

using namespace rankcond;

namespace {

Expr P(std::string_view s) { return simplify(parse_expr(s)); }

ParseError parse_error(std::string_view text) {
  try {
    parse_system(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for:\n" << text;
  return ParseError("none", 0, 0);
}

constexpr std::string_view kSample = R"(# comment
system demo
state x1 x2
time t
param a = 3/2
param b

drift = [a*x2, -b*x1 + t]
input f1 = [0, 1]
output h1 = x1
avoid x1 - 1

expect observability dims = [1, 2]
annihilator controllability w structural = [1, 0]
)";

}  // namespace

TEST(ParseSystem, MinimalDocument) {
  const auto doc = parse_system("state x1\noutput h1 = x1\n");
  EXPECT_EQ(doc.states, std::vector<std::string>{"x1"});
  EXPECT_FALSE(doc.drift.has_value());
  const auto sys = lower(doc);
  EXPECT_EQ(sys.n(), 1u);
  EXPECT_TRUE(sys.drift.components[0].is_zero());
}

TEST(ParseSystem, FullDocument) {
  const auto doc = parse_system(kSample);
  EXPECT_EQ(doc.name, "demo");
  EXPECT_EQ(doc.params.size(), 2u);
  EXPECT_EQ(doc.inputs[0].name, "f1");
  EXPECT_EQ(doc.outputs[0].name, "h1");
  EXPECT_EQ(doc.avoid.size(), 1u);
  EXPECT_EQ(doc.expected_dims(AnalysisKind::Observability), (std::vector<std::size_t>{1, 2}));
  EXPECT_FALSE(doc.expected_dims(AnalysisKind::Controllability).has_value());
  ASSERT_EQ(doc.annihilators.size(), 1u);
  EXPECT_EQ(doc.annihilators[0].expectation, "structural");
}

TEST(ParseSystem, DriftArityNamesTheDrift) {
  const auto e = parse_error("state x1 x2\ndrift = [x1]\noutput h1 = x1\n");
  EXPECT_NE(std::string(e.what()).find("drift"), std::string::npos) << e.what();
  EXPECT_EQ(e.line(), 2u);
}

TEST(ParseSystem, ErrorsCarryPosition) {
  const auto unknown = parse_error("state x1\noutput h1 = x1 + y\n");
  EXPECT_EQ(unknown.line(), 2u);
  // Symbol errors point at the start of the offending expression.
  EXPECT_EQ(unknown.column(), 13u);
  EXPECT_NE(std::string(unknown.what()).find("'y'"), std::string::npos);

  EXPECT_EQ(parse_error("state x1\nfoo x1\n").line(), 2u);
  EXPECT_EQ(parse_error("state x1\noutput h1 = (x1 + )\n").line(), 2u);
  EXPECT_EQ(parse_error("state x1\ninput f1 = [1]\ninput f1 = [2]\n").line(), 3u);
  parse_error("output h1 = 1\n");
  parse_error("state x1 x1\n");
  parse_error("state x1\nexpect observability dims = [1, 1]\n");
  parse_error("state x1\nexpect observability dims = [2]\n");
  parse_error("state x1\nannihilator observability w maybe = [1]\n");
}

TEST(ParseSystem, RoundTrip) {
  for (const auto& entry : corpus_entries()) {
    const auto text = serialize(entry.document);
    EXPECT_EQ(parse_system(text), entry.document) << entry.name;
  }
  const auto doc = parse_system(kSample);
  EXPECT_EQ(parse_system(serialize(doc)), doc);
}

TEST(ParseSystem, RoundTripRandomFields) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sys = testsupport::random_system(seed, 3, 1, 1, true);
    std::string text = "state x1 x2 x3\ndrift = [";
    for (std::size_t i = 0; i < 3; ++i) text += (i ? ", " : "") + to_string(sys.drift[i]);
    text += "]\ninput f1 = [";
    for (std::size_t i = 0; i < 3; ++i) text += (i ? ", " : "") + to_string(sys.inputs[0][i]);
    text += "]\noutput h1 = " + to_string(sys.outputs[0].value) + "\n";
    const auto doc = parse_system(text);
    EXPECT_EQ(parse_system(serialize(doc)), doc) << text;
    const auto lowered = lower(doc);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(lowered.drift[i], sys.drift[i]);
  }
}

TEST(Lower, BoundParameterBecomesConstant) {
  const auto sys = lower(parse_system("state x1\nparam g = 981/100\ndrift = [-g]\noutput h1 = x1\n"));
  EXPECT_EQ(sys.drift[0], P("-981/100"));
}

TEST(Lower, UnboundParameterIsSampled) {
  const auto sys = lower(parse_system(kSample));
  const auto sampled = sys.table.sampled_symbols();
  EXPECT_NE(std::find(sampled.begin(), sampled.end(), "b"), sampled.end());
  EXPECT_EQ(std::find(sampled.begin(), sampled.end(), "a"), sampled.end());
  EXPECT_EQ(sys.drift[0], P("3/2*x2"));
}

TEST(Lower, OverridesReplaceBindings) {
  const auto doc = parse_system(kSample);
  const auto sys = lower(doc, {{"a", Rational(5)}, {"b", Rational(1, 3)}});
  EXPECT_EQ(sys.drift[0], P("5*x2"));
  EXPECT_EQ(sys.drift[1], P("-x1/3 + t"));
  EXPECT_THROW(lower(doc, {{"zz", Rational(1)}}), InvalidArgument);
}

TEST(Lower, AnnihilatorFixtures) {
  const auto f = lower_annihilators(parse_system(kSample));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].kind, AnalysisKind::Controllability);
  EXPECT_EQ(f[0].name, "w");
}

TEST(ParseAnnihilators, OverBaseSymbols) {
  const auto doc = parse_system(kSample);
  const auto a = parse_annihilators("# extra\nannihilator observability v = [x2, a*x1]\n", doc);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].expectation, "holds");
  EXPECT_THROW(parse_annihilators("annihilator observability v = [x2]\n", doc), ParseError);
  EXPECT_THROW(parse_annihilators("annihilator observability v = [q, 1]\n", doc), ParseError);
  EXPECT_THROW(parse_annihilators("state x3\n", doc), ParseError);
}

TEST(LoadSystemFile, MissingFile) {
  try {
    load_system_file("/nonexistent/none.sys");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("cannot open"), std::string::npos);
  }
}

TEST(LoadSystemFile, ErrorNamesFile) {
  const auto path = std::filesystem::temp_directory_path() / "rankcond_bad.sys";
  std::ofstream(path) << "state x1\noutput h1 = y\n";
  try {
    load_system_file(path.string());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("rankcond_bad.sys"), std::string::npos) << e.what();
    EXPECT_EQ(e.line(), 2u);
  }
  std::filesystem::remove(path);
}
