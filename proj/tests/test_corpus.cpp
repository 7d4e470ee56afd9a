#include <gtest/gtest.h>

#include <map>
#include <set>

#include "rankcond/algorithms.hpp"
#include "rankcond/corpus.hpp"
#include "rankcond/errors.hpp"
#include "rankcond/sysdsl.hpp"

using namespace rankcond;

namespace {

AnalysisReport analyze(const SystemSpec& sys, AnalysisKind kind) {
  const bool tv = sys.time_varying();
  if (kind == AnalysisKind::Observability) return tv ? observability_tv(sys, {}) : observability_ti(sys, {});
  return tv ? controllability_tv(sys, {}) : controllability_ti(sys, {});
}

bool annihilator(const AnalysisReport& r, const std::string& name) {
  for (const auto& a : r.annihilators)
    if (a.name == name) return a.verified;
  ADD_FAILURE() << "no fixture " << name;
  return false;
}

// Lunar systems are slow-ish; analyse each once.
const AnalysisReport& cached(const std::string& name, AnalysisKind kind) {
  static std::map<std::pair<std::string, int>, AnalysisReport> cache;
  const auto key = std::make_pair(name, static_cast<int>(kind));
  auto it = cache.find(key);
  if (it == cache.end()) {
    const auto& doc = corpus_entry(name).document;
    AnalysisReport r = analyze(lower(doc), kind);
    check_annihilators(r, lower_annihilators(doc));
    it = cache.emplace(key, std::move(r)).first;
  }
  return it->second;
}

}  // namespace

TEST(Corpus, NamesAreUnique) {
  std::set<std::string> names;
  for (const auto& e : corpus_entries()) EXPECT_TRUE(names.insert(e.name).second) << e.name;
  EXPECT_GE(names.size(), 14u);
  EXPECT_THROW(corpus_entry("no_such_system"), InvalidArgument);
}

TEST(Corpus, ExpectedDimsAreWellFormed) {
  for (const auto& e : corpus_entries()) {
    for (const auto& dims : {e.observability_dims, e.controllability_dims}) {
      if (!dims) continue;
      EXPECT_LE(dims->back(), e.document.states.size()) << e.name;
      EXPECT_LE(dims->size(), e.document.states.size()) << e.name;
      for (std::size_t i = 1; i < dims->size(); ++i) EXPECT_LT((*dims)[i - 1], (*dims)[i]) << e.name;
    }
    EXPECT_FALSE(e.note.empty()) << e.name;
  }
}

TEST(Corpus, ParametricEntries) {
  EXPECT_EQ(corpus_entry("poly_obs_n4").observability_dims, (std::vector<std::size_t>{1, 2, 3, 4}));
  const auto sys = lower(corpus_entry("poly_obs_n3").document);
  EXPECT_EQ(sys.outputs[0].value, simplify(parse_expr("x1*t + x2*t^2 + x3*t^3")));
  EXPECT_EQ(corpus_entry("poly_ctrl_n2").controllability_dims, (std::vector<std::size_t>{1, 2}));
}

TEST(Corpus, LunarShapes) {
  const auto& full = corpus_entry("lunar_full").document;
  EXPECT_EQ(full.states.size(), 14u);
  EXPECT_EQ(full.inputs.size(), 3u);
  EXPECT_EQ(full.outputs.size(), 3u);
  EXPECT_EQ(corpus_entry("lunar_takeoff_const_mass").observability_dims, (std::vector<std::size_t>{3, 5, 7, 9}));
  EXPECT_EQ(corpus_entry("lunar_full").observability_dims, (std::vector<std::size_t>{3, 5, 7, 12, 13}));
  EXPECT_EQ(corpus_entry("lunar_full").controllability_dims, (std::vector<std::size_t>{3, 6, 8, 10, 12}));
}

TEST(Corpus, EveryEntryReproducesItsDims) {
  for (const auto& e : corpus_entries()) {
    if (e.observability_dims)
      EXPECT_EQ(cached(e.name, AnalysisKind::Observability).dims(), *e.observability_dims) << e.name;
    if (e.controllability_dims)
      EXPECT_EQ(cached(e.name, AnalysisKind::Controllability).dims(), *e.controllability_dims) << e.name;
  }
}

TEST(Corpus, AnnihilatorExpectationsHold) {
  for (const auto& e : corpus_entries()) {
    for (const auto& a : e.annihilators) {
      const auto& r = cached(e.name, a.kind);
      EXPECT_EQ(annihilator(r, a.name), a.expectation != "fails") << e.name << " " << a.name;
    }
  }
}

TEST(Corpus, LunarVerdicts) {
  const auto& obs = cached("lunar_full", AnalysisKind::Observability);
  EXPECT_EQ(obs.rank, 13u);
  EXPECT_EQ(obs.codimension, 1u);
  EXPECT_EQ(obs.converged_at, 4u);
  const auto& ctrl = cached("lunar_full", AnalysisKind::Controllability);
  EXPECT_EQ(ctrl.codimension, 2u);
  EXPECT_TRUE(annihilator(ctrl, "gravity"));
  EXPECT_TRUE(annihilator(ctrl, "quaternion_norm"));
}

TEST(Corpus, TakeoffScaleBecomesObservable) {
  EXPECT_TRUE(annihilator(cached("lunar_takeoff_const_mass", AnalysisKind::Observability), "scale"));
  EXPECT_TRUE(annihilator(cached("lunar_takeoff_const_mass", AnalysisKind::Observability), "yaw"));
  EXPECT_TRUE(annihilator(cached("lunar_takeoff_var_mass", AnalysisKind::Observability), "yaw"));
  EXPECT_FALSE(annihilator(cached("lunar_takeoff_var_mass", AnalysisKind::Observability), "scale"));
}

TEST(Corpus, ConvergedLunarRankByGenericRank) {
  const auto& obs = cached("lunar_full", AnalysisKind::Observability);
  EXPECT_EQ(generic_rank(*obs.basis, obs.basis->plan()), 13u);
}

TEST(Corpus, TakeoffNumericAnnihilatorHasTwoVectors) {
  const auto& r = cached("lunar_takeoff_const_mass", AnalysisKind::Observability);
  EXPECT_EQ(numeric_annihilator(*r.basis, r.basis->plan()).size(), 2u);
}

TEST(Corpus, LargerStepCapChangesNothing) {
  for (const auto& e : corpus_entries()) {
    const auto sys = lower(e.document);
    AnalysisOptions more;
    more.max_steps = sys.n() + 1;
    for (AnalysisKind k : {AnalysisKind::Observability, AnalysisKind::Controllability}) {
      if ((k == AnalysisKind::Observability && sys.p() == 0) || (k == AnalysisKind::Controllability && sys.m() == 0))
        continue;
      const auto capped = cached(e.name, k).dims();
      const auto r = k == AnalysisKind::Observability ? observability_tv(sys, {}, more) : controllability_tv(sys, {}, more);
      EXPECT_EQ(r.dims(), capped) << e.name << " " << to_string(k);
    }
  }
}

TEST(Corpus, ConsistencyChecksPass) {
  for (const auto& e : corpus_entries()) {
    for (const auto& f : consistency_check(lower(e.document), {}))
      EXPECT_TRUE(f.passed) << e.name << ": " << f.name << ": " << f.detail;
  }
}

TEST(Corpus, MonotoneUnderExtraOutputs) {
  // Variants with one output dropped never have a larger rank.
  for (const auto& name : {"ltv_linear_demo", "lunar_takeoff_const_mass", "lunar_takeoff_var_mass"}) {
    const auto sys = lower(corpus_entry(name).document);
    const std::size_t full = cached(name, AnalysisKind::Observability).rank;
    for (std::size_t drop = 0; sys.p() > 1 && drop < sys.p(); ++drop) {
      auto fewer = sys;
      fewer.outputs.erase(fewer.outputs.begin() + static_cast<long>(drop));
      fewer.output_names.erase(fewer.output_names.begin() + static_cast<long>(drop));
      EXPECT_LE(observability_tv(fewer, {}).rank, full) << name << " without output " << drop;
    }
  }
}
