#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rankcond/bigfloat.hpp"

namespace rankcond {

using Rational = mpq_class;

/// Node kinds. Constant, Symbol, Add, Mul, Pow and Function make up the
/// canonical (simplified) form. Sum, Product, Quotient, Negation and Power
/// are the raw forms produced by the parser and by the `raw::` builders;
/// `simplify` maps them to canonical form.
enum class Kind : std::uint8_t {
  Constant,
  Symbol,
  Add,
  Mul,
  Pow,
  Function,
  Sum,
  Product,
  Quotient,
  Negation,
  Power,
};

enum class Func : std::uint8_t { Sin, Cos, Tan, Asin, Atan, Sqrt };

std::string_view function_name(Func f);
std::optional<Func> function_from_name(std::string_view name);

class Expr;

namespace detail {
struct Node;
}

/// Immutable, hash-consed symbolic expression. Two expressions are
/// structurally equal iff they share the same node, so `operator==` is a
/// pointer comparison. Copies are cheap (shared ownership).
class Expr {
 public:
  /// The zero constant.
  Expr();
  explicit Expr(long value);
  explicit Expr(const Rational& value);

  static Expr constant(const Rational& value) { return Expr(value); }
  static Expr symbol(std::string_view name);

  Kind kind() const;
  bool is_canonical() const;
  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_symbol() const { return kind() == Kind::Symbol; }
  bool is_zero() const;
  bool is_one() const;

  /// Constant value, Add constant term or Mul coefficient.
  const Rational& scalar() const;
  const std::string& symbol_name() const;
  Func function() const;
  /// Add terms, Mul bases, Pow/Power base, Function argument, raw operands.
  std::span<const Expr> children() const;
  /// Coefficients of the Add terms (parallel to children()).
  std::span<const Rational> coefficients() const;
  /// Mul exponents (parallel to children()), or the single Pow/Power exponent.
  std::span<const long> exponents() const;

  std::uint64_t hash() const;
  const detail::Node* id() const { return node_.get(); }

  bool has_function() const;
  bool depends_on(std::string_view symbol) const;
  /// Number of distinct nodes reachable from this expression.
  std::size_t node_count() const;

  friend bool operator==(const Expr& a, const Expr& b) { return a.node_ == b.node_; }
  friend bool operator!=(const Expr& a, const Expr& b) { return a.node_ != b.node_; }

 private:
  friend struct detail::Node;
  friend class ExprBuilder;
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const noexcept { return static_cast<std::size_t>(e.hash()); }
};

/// Total order on expressions, deterministic across runs (never depends on
/// addresses). Used to sort the operands of canonical sums and products.
int compare(const Expr& a, const Expr& b);

// Canonical arithmetic. Operands are simplified first if they are raw.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, long exponent);
Expr apply(Func f, const Expr& argument);
Expr add(std::span<const Expr> terms);
Expr mul(std::span<const Expr> factors);

inline Expr sin(const Expr& e) { return apply(Func::Sin, e); }
inline Expr cos(const Expr& e) { return apply(Func::Cos, e); }
inline Expr tan(const Expr& e) { return apply(Func::Tan, e); }
inline Expr asin(const Expr& e) { return apply(Func::Asin, e); }
inline Expr atan(const Expr& e) { return apply(Func::Atan, e); }
inline Expr sqrt(const Expr& e) { return apply(Func::Sqrt, e); }

/// Raw (unsimplified) constructors; they keep exactly the structure given.
namespace raw {
Expr sum(std::vector<Expr> operands);
Expr product(std::vector<Expr> operands);
Expr quotient(const Expr& numerator, const Expr& denominator);
Expr negation(const Expr& operand);
Expr power(const Expr& base, long exponent);
Expr function(Func f, const Expr& argument);
}  // namespace raw

/// Upper bound on the number of terms a product of sums may expand into.
/// Products whose expansion would exceed it are kept factored.
inline constexpr std::size_t kExpansionTermLimit = 2048;

/// Raw expressions up to this many nodes are simplified before zero tests.
inline constexpr std::size_t kSimplifyNodeLimit = 256;

/// Node-count cap for expressions stored by the field operations.
inline constexpr std::size_t kNodeCountCap = 1'000'000;

/// Canonical form: flattened sorted sums and products, merged constants,
/// collected like terms, merged powers, distributed products of sums up to
/// kExpansionTermLimit terms. Idempotent.
Expr simplify(const Expr& e);

/// Partial derivative with respect to the named symbol, in canonical form.
Expr differentiate(const Expr& e, std::string_view symbol);

/// Memoizing differentiator for many derivatives of related expressions
/// with respect to one symbol.
class Differentiator {
 public:
  explicit Differentiator(std::string symbol);
  Expr operator()(const Expr& e);
  const std::string& symbol() const { return symbol_; }

 private:
  std::string symbol_;
  std::uint64_t mask_;
  std::unordered_map<const detail::Node*, Expr> memo_;
  std::vector<Expr> memo_keys_;
};

/// Derivatives kept as shared graphs of raw nodes with light constant
/// folding. Iterated derivatives grow linearly per level instead of
/// expanding, at the price of results that are not canonical.
namespace graph {

/// Drops zeros and folds constants.
Expr sum(std::vector<Expr> terms);
/// Folds constants, drops ones; zero if any factor is zero.
Expr product(std::vector<Expr> factors);
Expr negate(const Expr& e);
Expr power(const Expr& base, long exponent);
Expr quotient(const Expr& numerator, const Expr& denominator);

/// Directional derivative sum_s v[s] * de/ds, forward accumulation.
/// Memoized across calls.
class Tangent {
 public:
  explicit Tangent(std::map<std::string, Expr, std::less<>> direction);
  Expr operator()(const Expr& e);

 private:
  std::map<std::string, Expr, std::less<>> direction_;
  std::uint64_t mask_ = 0;
  std::unordered_map<const detail::Node*, Expr> memo_;
  std::vector<Expr> memo_keys_;
};

/// sum_k seeds[k] * d roots[k] / d s for each s in `symbols`, by reverse
/// accumulation over the shared graph of the roots.
std::vector<Expr> pullback(const std::vector<Expr>& roots, const std::vector<Expr>& seeds,
                           const std::vector<std::string>& symbols);

inline std::vector<Expr> gradient(const Expr& e, const std::vector<std::string>& symbols) {
  return pullback({e}, {Expr(1)}, symbols);
}

}  // namespace graph

/// Replaces symbols by expressions; the result is canonical.
Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacements);

std::vector<std::string> free_symbols(const Expr& e);

/// Throws ExpressionSwellError if `e` has more than kNodeCountCap nodes.
void check_node_cap(const Expr& e, std::string_view context);

template <typename T>
using Assignment = std::map<std::string, T, std::less<>>;

/// Exact evaluation. Returns std::nullopt when a transcendental function is
/// reached (the caller must fall back to float evaluation). Throws
/// SingularPointError on division by zero and UnknownSymbolError for
/// unassigned symbols. Reusing one evaluator across expressions shares the
/// memo of common subexpressions.
class RationalEvaluator {
 public:
  explicit RationalEvaluator(const Assignment<Rational>& assignment) : assignment_(assignment) {}
  std::optional<Rational> operator()(const Expr& e);

 private:
  const Rational& eval(const detail::Node* n);
  const Assignment<Rational>& assignment_;
  std::unordered_map<const detail::Node*, Rational> memo_;
  std::vector<Expr> roots_;
};

/// Float evaluation at a fixed binary precision. Throws SingularPointError on
/// domain errors.
class FloatEvaluator {
 public:
  FloatEvaluator(const Assignment<BigFloat>& assignment, mpfr_prec_t precision)
      : assignment_(assignment), precision_(precision) {}
  BigFloat operator()(const Expr& e);

 private:
  const BigFloat& eval(const detail::Node* n);
  const Assignment<BigFloat>& assignment_;
  mpfr_prec_t precision_;
  std::unordered_map<const detail::Node*, BigFloat> memo_;
  std::vector<Expr> roots_;
};

/// Arithmetic in the prime field F_p, p = 2^61 - 1.
namespace modp {
inline constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;
std::uint64_t add(std::uint64_t a, std::uint64_t b);
std::uint64_t sub(std::uint64_t a, std::uint64_t b);
std::uint64_t mul(std::uint64_t a, std::uint64_t b);
std::uint64_t pow(std::uint64_t a, std::uint64_t e);
/// Throws SingularPointError for zero.
std::uint64_t inv(std::uint64_t a);
/// Image of a rational with denominator prime to p; throws
/// SingularPointError otherwise.
std::uint64_t from_rational(const Rational& q);
}  // namespace modp

/// Exact evaluation of the image in F_p of a rational expression at the
/// image of a rational point. A nonzero result proves the rational value is
/// nonzero. Returns std::nullopt when a transcendental function is reached.
/// Throws SingularPointError when a denominator vanishes mod p.
class ModularEvaluator {
 public:
  explicit ModularEvaluator(const Assignment<std::uint64_t>& assignment) : assignment_(assignment) {}
  std::optional<std::uint64_t> operator()(const Expr& e);

 private:
  std::uint64_t eval(const detail::Node* n);
  const Assignment<std::uint64_t>& assignment_;
  std::unordered_map<const detail::Node*, std::uint64_t> memo_;
  std::vector<Expr> roots_;
};

std::optional<Rational> evaluate_rational(const Expr& e, const Assignment<Rational>& assignment);
BigFloat evaluate_float(const Expr& e, const Assignment<BigFloat>& assignment,
                        mpfr_prec_t precision = BigFloat::kDefaultPrecision);

/// Text form accepted by parse_expr.
std::string to_string(const Expr& e);
std::string to_string(const Rational& q);

/// Parses the expression grammar; identifiers become symbols. The result is
/// raw (unsimplified). Throws ParseError.
Expr parse_expr(std::string_view text);
Rational parse_rational(std::string_view text);

}  // namespace rankcond
