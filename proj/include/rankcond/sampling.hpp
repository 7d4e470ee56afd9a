#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rankcond/expr.hpp"

namespace rankcond {

/// How generic points are drawn. Each non-time symbol gets p/q with p in
/// [-999, 999] \ {0} and q in [1, 999]; the time symbol gets p/q in (0, 10).
/// A point is regular when every avoid predicate is nonzero there and every
/// expression evaluated at it is defined; irregular points are redrawn.
/// Exact arithmetic used for rank and zero tests on rational data.
/// Rational evaluates with exact big rationals. Modular evaluates the image
/// of each rational sample point in F_p (p = 2^61 - 1); independence and
/// nonvanishing found there also hold over the rationals. Expressions
/// containing transcendental functions always use float evaluation.
enum class Arithmetic { Rational, Modular };

std::string_view to_string(Arithmetic a);

struct SamplePlan {
  std::uint64_t seed = 42;
  Arithmetic arithmetic = Arithmetic::Rational;
  std::size_t samples = 5;
  std::size_t max_attempts = 50;
  std::vector<std::string> symbols;
  std::string time = "t";
  std::vector<Expr> avoid;
};

/// Zero threshold for float-mode rank and zero tests (absolute, after
/// normalizing each row to unit max-norm).
inline constexpr double kFloatZeroThreshold = 1e-9;

/// Validates K >= 1 and attempts >= K; throws InvalidArgument.
void validate(const SamplePlan& plan);

/// Draws candidate point `index` on attempt `attempt`; a pure function of
/// (seed, index, attempt). Does not check avoid predicates.
Assignment<Rational> draw_point(const SamplePlan& plan, std::size_t index, std::size_t attempt);

/// Draws a regular point for slot `index`, starting from attempt
/// `first_attempt`; returns the attempt number used via `used_attempt`.
/// Throws SamplingError naming the first failing avoid predicate when the
/// attempt budget is exhausted.
Assignment<Rational> regular_point(const SamplePlan& plan, std::size_t index, std::size_t first_attempt,
                                   std::size_t* used_attempt = nullptr);

Assignment<std::uint64_t> to_modular(const Assignment<Rational>& point);
Assignment<BigFloat> to_float(const Assignment<Rational>& point, mpfr_prec_t precision = BigFloat::kDefaultPrecision);

/// Exact-or-float zero test of a single value-expression at one point.
/// Throws SingularPointError if `e` is undefined there.
bool is_zero_at(const Expr& e, const Assignment<Rational>& point, Arithmetic arithmetic = Arithmetic::Rational);

/// One-sided randomized zero test over `samples` regular points drawn for
/// the free symbols of `e` (time symbol "t"). A false answer is definitive.
bool is_probably_zero(const Expr& e, std::size_t samples, std::uint64_t seed);

/// Same, with an explicit plan (its symbols are extended by the free symbols
/// of `e` that the plan does not list).
bool is_probably_zero(const Expr& e, const SamplePlan& plan);

}  // namespace rankcond
