#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rankcond/expr.hpp"
#include "rankcond/sampling.hpp"
#include "rankcond/symbols.hpp"

namespace rankcond {

enum class SpanKind { Codistribution, Distribution };

std::string_view to_string(SpanKind kind);

/// Where a generator came from. `op` is one of seed, tilde_f0, lie_f0,
/// lie_f<i>, tv_f0, bracket_f0, bracket_f<i>; `source` indexes the generator
/// the operator was applied to.
struct Provenance {
  std::size_t step = 0;
  std::string op;
  std::optional<std::size_t> source;
  std::string label;
};

struct Generator {
  std::vector<Expr> components;
  Provenance provenance;
  /// For exact covectors: the scalar whose differential this is.
  std::optional<Expr> potential;
};

/// Generators of a codistribution or distribution, kept generically
/// independent. Each generator is evaluated at the plan's sample points
/// and reduced into a per-point echelon form; a candidate is kept iff it
/// raises the maximum rank over the points.
class SpanBasis {
 public:
  SpanBasis(SpanKind kind, SymbolTable table, SamplePlan plan);
  ~SpanBasis();
  SpanBasis(SpanBasis&&) noexcept;
  SpanBasis& operator=(SpanBasis&&) noexcept;

  SpanKind kind() const { return kind_; }
  const SymbolTable& table() const { return table_; }
  const SamplePlan& plan() const { return plan_; }
  std::size_t dimension() const { return table_.dimension(); }
  const std::vector<Generator>& generators() const { return generators_; }
  /// Generic rank; equals generators().size().
  std::size_t rank() const { return generators_.size(); }
  std::size_t point_count() const;
  bool float_mode() const { return float_mode_; }
  /// Exact elimination is done in F_p rather than over the rationals.
  bool modular() const { return plan_.arithmetic == Arithmetic::Modular; }

  /// Adds `g` if it raises the generic rank. Throws SamplingError when no
  /// regular point can be found for a slot.
  bool try_add(Generator g);
  /// try_add over `candidates` in order; returns the number added.
  std::size_t extend(std::vector<Generator> candidates);

  /// Appends `count` new sample slots (drawn after the existing ones) and
  /// reduces every current generator into them.
  void add_fresh_points(std::size_t count);

  /// Rank of the stacked generator matrix at each sample point.
  std::vector<std::size_t> point_ranks() const;

 private:
  struct Point;
  void rebuild(Point& p);
  void reset_point(Point& p, std::size_t first_attempt);
  void switch_to_float();

  SpanKind kind_;
  SymbolTable table_;
  SamplePlan plan_;
  bool float_mode_ = false;
  std::vector<Generator> generators_;
  std::vector<std::unique_ptr<Point>> points_;
};

/// Max over the plan's sample points of the rank of the stacked rows.
std::size_t generic_rank(const std::vector<std::vector<Expr>>& rows, const SamplePlan& plan);
std::size_t generic_rank(const SpanBasis& basis, const SamplePlan& plan);

struct AnnihilatorResult {
  bool verified = false;
  /// Every pairing simplified to the zero expression.
  bool symbolic = false;
  /// First generator whose pairing was found nonzero.
  std::optional<std::size_t> failing_generator;
  explicit operator bool() const { return verified; }
};

/// Checks that `candidate` pairs to zero with every generator. The candidate
/// is a vector for a codistribution and a covector for a distribution.
AnnihilatorResult verify_annihilator(const SpanBasis& basis, const std::vector<Expr>& candidate,
                                     const SamplePlan& plan);

/// Null space of the stacked generator matrix at the sample point of
/// highest rank (point-local, not a symbolic claim).
std::vector<std::vector<Rational>> numeric_annihilator(const SpanBasis& basis, const SamplePlan& plan);

/// Rank of a numeric matrix, exact.
std::size_t exact_rank(std::vector<std::vector<Rational>> rows);
/// Null space basis of an exact matrix with `cols` columns.
std::vector<std::vector<Rational>> exact_null_space(std::vector<std::vector<Rational>> rows, std::size_t cols);

}  // namespace rankcond
