#include "rankcond/sampling.hpp"

#include <algorithm>
#include <optional>
#include <random>

#include "rankcond/errors.hpp"

namespace rankcond {

namespace {

// Uniform integer in [0, bound) by rejection, independent of the standard
// library's distribution implementation.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

long uniform_in(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

Rational draw_generic(std::mt19937_64& rng) {
  long num = uniform_in(rng, -998, 999);
  if (num <= 0) --num;  // skip 0: maps [-998, 0] onto [-999, -1]
  const long den = uniform_in(rng, 1, 999);
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational draw_time(std::mt19937_64& rng) {
  const long den = uniform_in(rng, 1, 999);
  const long num = uniform_in(rng, 1, 10 * den - 1);
  Rational q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace

void validate(const SamplePlan& plan) {
  if (plan.samples < 1) throw InvalidArgument("sample count must be at least 1");
  if (plan.max_attempts < plan.samples) throw InvalidArgument("attempt budget must be at least the sample count");
}

Assignment<Rational> draw_point(const SamplePlan& plan, std::size_t index, std::size_t attempt) {
  std::seed_seq seq{static_cast<std::uint32_t>(plan.seed), static_cast<std::uint32_t>(plan.seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(attempt)};
  std::mt19937_64 rng(seq);
  Assignment<Rational> point;
  for (const auto& s : plan.symbols) {
    if (s == plan.time) continue;
    point[s] = draw_generic(rng);
  }
  point[plan.time] = draw_time(rng);
  return point;
}

Assignment<BigFloat> to_float(const Assignment<Rational>& point, mpfr_prec_t precision) {
  Assignment<BigFloat> out;
  for (const auto& [k, v] : point) out.emplace(k, BigFloat(v, precision));
  return out;
}

std::string_view to_string(Arithmetic a) { return a == Arithmetic::Modular ? "modular" : "rational"; }

Assignment<std::uint64_t> to_modular(const Assignment<Rational>& point) {
  Assignment<std::uint64_t> out;
  for (const auto& [k, v] : point) out.emplace(k, modp::from_rational(v));
  return out;
}

bool is_zero_at(const Expr& e, const Assignment<Rational>& point, Arithmetic arithmetic) {
  if (arithmetic == Arithmetic::Modular && !e.has_function()) {
    const auto mp = to_modular(point);
    ModularEvaluator ev(mp);
    return *ev(e) == 0;
  }
  RationalEvaluator ev(point);
  if (auto v = ev(e)) return *v == 0;
  const auto fp = to_float(point);
  const BigFloat v = evaluate_float(e, fp);
  return v.abs().to_double() < kFloatZeroThreshold;
}

Assignment<Rational> regular_point(const SamplePlan& plan, std::size_t index, std::size_t first_attempt,
                                   std::size_t* used_attempt) {
  validate(plan);
  std::vector<Expr> avoid;
  avoid.reserve(plan.avoid.size());
  for (const Expr& a : plan.avoid) avoid.push_back(simplify(a));
  std::optional<std::size_t> first_failure;
  for (std::size_t attempt = first_attempt; attempt < plan.max_attempts; ++attempt) {
    auto point = draw_point(plan, index, attempt);
    bool ok = true;
    for (std::size_t i = 0; i < avoid.size() && ok; ++i) {
      try {
        ok = !is_zero_at(avoid[i], point);
      } catch (const SingularPointError&) {
        ok = false;
      }
      if (!ok && !first_failure) first_failure = i;
    }
    if (ok) {
      if (used_attempt) *used_attempt = attempt;
      return point;
    }
  }
  std::string msg = "could not find regular sample point after " + std::to_string(plan.max_attempts) + " attempts";
  if (first_failure) msg += "; avoid predicate '" + to_string(plan.avoid[*first_failure]) + "' vanished";
  throw SamplingError(msg);
}

bool is_probably_zero(const Expr& e, const SamplePlan& plan_in) {
  SamplePlan plan = plan_in;
  for (const auto& s : free_symbols(e))
    if (s != plan.time && std::find(plan.symbols.begin(), plan.symbols.end(), s) == plan.symbols.end())
      plan.symbols.push_back(s);
  validate(plan);
  const Expr s = e.is_canonical() || e.node_count() > kSimplifyNodeLimit ? e : simplify(e);
  if (s.is_zero()) return true;
  for (std::size_t j = 0; j < plan.samples; ++j) {
    std::size_t attempt = 0;
    for (;;) {
      std::size_t used = 0;
      const auto point = regular_point(plan, j, attempt, &used);
      try {
        if (!is_zero_at(s, point, plan.arithmetic)) return false;
        break;
      } catch (const SingularPointError&) {
        attempt = used + 1;
        if (attempt >= plan.max_attempts) throw SamplingError("could not find regular sample point");
      }
    }
  }
  return true;
}

bool is_probably_zero(const Expr& e, std::size_t samples, std::uint64_t seed) {
  SamplePlan plan;
  plan.samples = samples;
  plan.seed = seed;
  plan.max_attempts = std::max<std::size_t>(50, samples);
  return is_probably_zero(e, plan);
}

}  // namespace rankcond
