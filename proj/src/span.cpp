#include "rankcond/span.hpp"

#include <algorithm>
#include <cassert>

#include "rankcond/errors.hpp"
#include "rankcond/fields.hpp"

namespace rankcond {

namespace {

// Scalar policies for the two elimination modes.
struct ExactOps {
  using T = Rational;
  static bool negligible(const T& v) { return v == 0; }
  static T magnitude(const T& v) { return abs(v); }
  // Exact rows need no scaling.
  static void normalize(std::vector<T>&) {}
};

struct ModInt {
  std::uint64_t v = 0;
  friend ModInt operator-(ModInt a, ModInt b) { return {modp::sub(a.v, b.v)}; }
  friend ModInt operator*(ModInt a, ModInt b) { return {modp::mul(a.v, b.v)}; }
  friend ModInt operator/(ModInt a, ModInt b) { return {modp::mul(a.v, modp::inv(b.v))}; }
  friend bool operator<(ModInt, ModInt) { return false; }
};

struct ModOps {
  using T = ModInt;
  static bool negligible(const T& v) { return v.v == 0; }
  static T magnitude(const T& v) { return v; }
  static void normalize(std::vector<T>&) {}
};

struct FloatOps {
  using T = BigFloat;
  static bool negligible(const T& v) { return v.abs().to_double() < kFloatZeroThreshold; }
  static T magnitude(const T& v) { return v.abs(); }
  static void normalize(std::vector<T>& row) {
    T best(row.empty() ? BigFloat::kDefaultPrecision : row[0].precision());
    for (const T& v : row)
      if (best < v.abs()) best = v.abs();
    if (best.is_zero()) return;
    for (T& v : row) v = v / best;
  }
};

template <typename Ops>
class Echelon {
 public:
  using T = typename Ops::T;

  std::size_t size() const { return rows_.size(); }

  /// Residual of `row` after elimination, scaled so its pivot is 1, or
  /// nothing if the row is dependent.
  std::optional<std::vector<T>> reduce(std::vector<T> row) const {
    Ops::normalize(row);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const std::size_t p = pivots_[k];
      if (is_exact_zero(row[p])) continue;
      const T factor = row[p];
      for (std::size_t c = 0; c < row.size(); ++c)
        if (!is_exact_zero(rows_[k][c])) row[c] = row[c] - factor * rows_[k][c];
    }
    std::optional<std::size_t> pivot;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (Ops::negligible(row[c])) continue;
      if (!pivot || Ops::magnitude(row[*pivot]) < Ops::magnitude(row[c])) pivot = c;
      if constexpr (!std::is_same_v<T, BigFloat>) break;
    }
    if (!pivot) return std::nullopt;
    const T scale = row[*pivot];
    for (T& v : row) v = v / scale;
    for (std::size_t c = 0; c < row.size(); ++c)
      if (c != *pivot && Ops::negligible(row[c])) row[c] = zero_like(row[c]);
    pivot_hint_ = *pivot;
    return row;
  }

  void insert(std::vector<T> reduced) {
    std::size_t p = 0;
    while (p < reduced.size() && !is_one(reduced[p])) ++p;
    // Prefer the column the last reduce chose.
    if (pivot_hint_ < reduced.size() && is_one(reduced[pivot_hint_])) p = pivot_hint_;
    pivots_.push_back(p);
    rows_.push_back(std::move(reduced));
  }

 private:
  static bool is_exact_zero(const Rational& v) { return v == 0; }
  static bool is_exact_zero(const ModInt& v) { return v.v == 0; }
  static bool is_one(const ModInt& v) { return v.v == 1; }
  static ModInt zero_like(const ModInt&) { return {}; }
  static bool is_exact_zero(const BigFloat& v) { return v.is_zero(); }
  static bool is_one(const Rational& v) { return v == 1; }
  static bool is_one(const BigFloat& v) { return mpfr_cmp_si(v.raw(), 1) == 0; }
  static Rational zero_like(const Rational&) { return Rational(0); }
  static BigFloat zero_like(const BigFloat& v) { return BigFloat(v.precision()); }

  std::vector<std::vector<T>> rows_;
  std::vector<std::size_t> pivots_;
  mutable std::size_t pivot_hint_ = 0;
};

template <typename Ops>
std::size_t rank_of(const std::vector<std::vector<typename Ops::T>>& rows) {
  Echelon<Ops> e;
  for (const auto& r : rows)
    if (auto red = e.reduce(r)) e.insert(std::move(*red));
  return e.size();
}

// Reduced row echelon form and null space.
template <typename Ops>
std::vector<std::vector<typename Ops::T>> null_space(std::vector<std::vector<typename Ops::T>> m, std::size_t cols,
                                                     const typename Ops::T& zero, const typename Ops::T& one) {
  using T = typename Ops::T;
  for (auto& r : m) Ops::normalize(r);
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::optional<std::size_t> best;
    for (std::size_t i = r; i < m.size(); ++i) {
      if (Ops::negligible(m[i][c])) continue;
      if (!best || Ops::magnitude(m[*best][c]) < Ops::magnitude(m[i][c])) best = i;
    }
    if (!best) continue;
    std::swap(m[r], m[*best]);
    const T piv = m[r][c];
    for (T& v : m[r]) v = v / piv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || Ops::negligible(m[i][c])) continue;
      const T f = m[i][c];
      for (std::size_t k = 0; k < cols; ++k) m[i][k] = m[i][k] - f * m[r][k];
    }
    pivot_cols.push_back(c);
    ++r;
  }
  std::vector<std::vector<T>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (std::find(pivot_cols.begin(), pivot_cols.end(), free) != pivot_cols.end()) continue;
    std::vector<T> v(cols, zero);
    v[free] = one;
    for (std::size_t i = 0; i < pivot_cols.size(); ++i) v[pivot_cols[i]] = zero - m[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

bool needs_float(const std::vector<Expr>& row) {
  return std::any_of(row.begin(), row.end(), [](const Expr& e) { return e.has_function(); });
}

std::vector<Rational> eval_exact(RationalEvaluator& ev, const std::vector<Expr>& row) {
  std::vector<Rational> out;
  out.reserve(row.size());
  for (const Expr& e : row) {
    auto v = ev(e);
    assert(v.has_value());
    out.push_back(std::move(*v));
  }
  return out;
}

std::vector<ModInt> eval_modular(ModularEvaluator& ev, const std::vector<Expr>& row) {
  std::vector<ModInt> out;
  out.reserve(row.size());
  for (const Expr& e : row) out.push_back({*ev(e)});
  return out;
}

std::vector<BigFloat> eval_float(FloatEvaluator& ev, const std::vector<Expr>& row) {
  std::vector<BigFloat> out;
  out.reserve(row.size());
  for (const Expr& e : row) out.push_back(ev(e));
  return out;
}

// Evaluates `rows` at one regular point for slot `slot`, redrawing on
// singular evaluations. Calls `use(exact_rows, float_rows, point)` with one
// of the two filled in.
template <typename Use>
void at_regular_point(const SamplePlan& plan, std::size_t slot, const std::vector<std::vector<Expr>>& rows, Use&& use) {
  const bool flt = std::any_of(rows.begin(), rows.end(), needs_float);
  std::size_t attempt = 0;
  for (;;) {
    std::size_t used = 0;
    const auto point = regular_point(plan, slot, attempt, &used);
    try {
      if (flt) {
        const auto fp = to_float(point);
        FloatEvaluator ev(fp, BigFloat::kDefaultPrecision);
        std::vector<std::vector<BigFloat>> m;
        for (const auto& r : rows) m.push_back(eval_float(ev, r));
        use(std::vector<std::vector<Rational>>{}, std::move(m), point);
      } else {
        RationalEvaluator ev(point);
        std::vector<std::vector<Rational>> m;
        for (const auto& r : rows) m.push_back(eval_exact(ev, r));
        use(std::move(m), std::vector<std::vector<BigFloat>>{}, point);
      }
      return;
    } catch (const SingularPointError&) {
      attempt = used + 1;
      if (attempt >= plan.max_attempts)
        throw SamplingError("could not find regular sample point for slot " + std::to_string(slot));
    }
  }
}

SamplePlan with_symbols(SamplePlan plan, const SymbolTable& table) {
  for (const auto& s : table.sampled_symbols())
    if (std::find(plan.symbols.begin(), plan.symbols.end(), s) == plan.symbols.end()) plan.symbols.push_back(s);
  plan.time = table.time();
  return plan;
}

}  // namespace

std::string_view to_string(SpanKind kind) {
  return kind == SpanKind::Codistribution ? "codistribution" : "distribution";
}

struct SpanBasis::Point {
  std::size_t slot = 0;
  std::size_t attempt = 0;
  Assignment<Rational> values;
  Assignment<std::uint64_t> mvalues;
  Assignment<BigFloat> fvalues;
  std::unique_ptr<RationalEvaluator> ev;
  std::unique_ptr<ModularEvaluator> mev;
  std::unique_ptr<FloatEvaluator> fev;
  Echelon<ExactOps> exact;
  Echelon<ModOps> mod;
  Echelon<FloatOps> flt;

  std::size_t rank(bool float_mode, bool modular) const {
    return float_mode ? flt.size() : modular ? mod.size() : exact.size();
  }
};

SpanBasis::SpanBasis(SpanKind kind, SymbolTable table, SamplePlan plan)
    : kind_(kind), table_(std::move(table)), plan_(with_symbols(std::move(plan), table_)) {
  validate(plan_);
  add_fresh_points(plan_.samples);
}

SpanBasis::~SpanBasis() = default;
SpanBasis::SpanBasis(SpanBasis&&) noexcept = default;
SpanBasis& SpanBasis::operator=(SpanBasis&&) noexcept = default;

std::size_t SpanBasis::point_count() const { return points_.size(); }

std::vector<std::size_t> SpanBasis::point_ranks() const {
  std::vector<std::size_t> out;
  for (const auto& p : points_) out.push_back(p->rank(float_mode_, modular()));
  return out;
}

void SpanBasis::rebuild(Point& p) {
  p.exact = {};
  p.mod = {};
  p.flt = {};
  for (const auto& g : generators_) {
    if (float_mode_) {
      if (auto r = p.flt.reduce(eval_float(*p.fev, g.components))) p.flt.insert(std::move(*r));
    } else if (modular()) {
      if (auto r = p.mod.reduce(eval_modular(*p.mev, g.components))) p.mod.insert(std::move(*r));
    } else {
      if (auto r = p.exact.reduce(eval_exact(*p.ev, g.components))) p.exact.insert(std::move(*r));
    }
  }
}

void SpanBasis::reset_point(Point& p, std::size_t first_attempt) {
  std::size_t attempt = first_attempt;
  for (;;) {
    if (attempt >= plan_.max_attempts)
      throw SamplingError("could not find regular sample point for slot " + std::to_string(p.slot) + " after " +
                          std::to_string(plan_.max_attempts) + " attempts");
    std::size_t used = 0;
    p.values = regular_point(plan_, p.slot, attempt, &used);
    p.attempt = used;
    try {
      p.fvalues = to_float(p.values);
      p.ev = std::make_unique<RationalEvaluator>(p.values);
      p.mvalues = to_modular(p.values);
      p.mev = std::make_unique<ModularEvaluator>(p.mvalues);
      p.fev = std::make_unique<FloatEvaluator>(p.fvalues, BigFloat::kDefaultPrecision);
      rebuild(p);
      return;
    } catch (const SingularPointError&) {
      attempt = used + 1;
    }
  }
}

void SpanBasis::switch_to_float() {
  float_mode_ = true;
  for (auto& p : points_) {
    try {
      rebuild(*p);
    } catch (const SingularPointError&) {
      reset_point(*p, p->attempt + 1);
    }
  }
}

void SpanBasis::add_fresh_points(std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    auto p = std::make_unique<Point>();
    p->slot = points_.size();
    reset_point(*p, 0);
    points_.push_back(std::move(p));
  }
}

bool SpanBasis::try_add(Generator g) {
  if (g.components.size() != dimension())
    throw InvalidArgument("generator has " + std::to_string(g.components.size()) + " components, expected " +
                          std::to_string(dimension()));
  if (!float_mode_ && needs_float(g.components)) switch_to_float();

  std::vector<std::optional<std::vector<Rational>>> exact_res(points_.size());
  std::vector<std::optional<std::vector<ModInt>>> mod_res(points_.size());
  std::vector<std::optional<std::vector<BigFloat>>> float_res(points_.size());
  bool grows = false;
  for (std::size_t j = 0; j < points_.size(); ++j) {
    Point& p = *points_[j];
    for (;;) {
      try {
        if (float_mode_) {
          float_res[j] = p.flt.reduce(eval_float(*p.fev, g.components));
        } else if (modular()) {
          mod_res[j] = p.mod.reduce(eval_modular(*p.mev, g.components));
        } else {
          exact_res[j] = p.exact.reduce(eval_exact(*p.ev, g.components));
        }
        break;
      } catch (const SingularPointError&) {
        reset_point(p, p.attempt + 1);
      }
    }
    const bool independent =
        float_mode_ ? float_res[j].has_value() : modular() ? mod_res[j].has_value() : exact_res[j].has_value();
    if (independent && p.rank(float_mode_, modular()) == rank()) grows = true;
  }
  if (!grows) return false;
  for (std::size_t j = 0; j < points_.size(); ++j) {
    if (float_mode_) {
      if (float_res[j]) points_[j]->flt.insert(std::move(*float_res[j]));
    } else if (modular()) {
      if (mod_res[j]) points_[j]->mod.insert(std::move(*mod_res[j]));
    } else {
      if (exact_res[j]) points_[j]->exact.insert(std::move(*exact_res[j]));
    }
  }
  generators_.push_back(std::move(g));
  return true;
}

std::size_t SpanBasis::extend(std::vector<Generator> candidates) {
  std::size_t added = 0;
  for (auto& c : candidates) {
    if (rank() == dimension()) break;
    if (try_add(std::move(c))) ++added;
  }
  return added;
}

std::size_t generic_rank(const std::vector<std::vector<Expr>>& rows, const SamplePlan& plan) {
  validate(plan);
  if (rows.empty()) return 0;
  std::size_t best = 0;
  if (plan.arithmetic == Arithmetic::Modular && std::none_of(rows.begin(), rows.end(), needs_float)) {
    for (std::size_t j = 0; j < plan.samples; ++j) {
      std::size_t attempt = 0;
      for (;;) {
        std::size_t used = 0;
        const auto point = to_modular(regular_point(plan, j, attempt, &used));
        try {
          ModularEvaluator ev(point);
          std::vector<std::vector<ModInt>> m;
          for (const auto& r : rows) m.push_back(eval_modular(ev, r));
          best = std::max(best, rank_of<ModOps>(m));
          break;
        } catch (const SingularPointError&) {
          attempt = used + 1;
          if (attempt >= plan.max_attempts)
            throw SamplingError("could not find regular sample point for slot " + std::to_string(j));
        }
      }
    }
    return best;
  }
  for (std::size_t j = 0; j < plan.samples; ++j) {
    at_regular_point(plan, j, rows, [&](auto&& exact, auto&& flt, const auto&) {
      best = std::max(best, exact.empty() ? rank_of<FloatOps>(flt) : rank_of<ExactOps>(exact));
    });
  }
  return best;
}

std::size_t generic_rank(const SpanBasis& basis, const SamplePlan& plan) {
  std::vector<std::vector<Expr>> rows;
  for (const auto& g : basis.generators()) rows.push_back(g.components);
  return generic_rank(rows, with_symbols(plan, basis.table()));
}

AnnihilatorResult verify_annihilator(const SpanBasis& basis, const std::vector<Expr>& candidate,
                                     const SamplePlan& plan_in) {
  if (candidate.size() != basis.dimension())
    throw InvalidArgument("annihilator candidate has " + std::to_string(candidate.size()) + " components, expected " +
                          std::to_string(basis.dimension()));
  const SamplePlan plan = with_symbols(plan_in, basis.table());
  std::vector<Expr> cand;
  for (const Expr& c : candidate) cand.push_back(simplify(c));
  AnnihilatorResult result;
  result.symbolic = true;
  for (std::size_t i = 0; i < basis.generators().size(); ++i) {
    Expr p = pairing(basis.generators()[i].components, cand);
    if (!p.is_canonical() && p.node_count() <= kSimplifyNodeLimit) p = simplify(p);
    if (p.is_zero()) continue;
    result.symbolic = false;
    if (!is_probably_zero(p, plan)) {
      result.failing_generator = i;
      return result;
    }
  }
  result.verified = true;
  return result;
}

std::vector<std::vector<Rational>> numeric_annihilator(const SpanBasis& basis, const SamplePlan& plan_in) {
  const SamplePlan plan = with_symbols(plan_in, basis.table());
  validate(plan);
  const std::size_t n = basis.dimension();
  std::vector<std::vector<Expr>> rows;
  for (const auto& g : basis.generators()) rows.push_back(g.components);
  if (rows.empty()) {
    std::vector<std::vector<Rational>> id;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Rational> v(n, Rational(0));
      v[i] = 1;
      id.push_back(std::move(v));
    }
    return id;
  }
  std::optional<std::size_t> best_rank;
  std::vector<std::vector<Rational>> best;
  for (std::size_t j = 0; j < plan.samples; ++j) {
    at_regular_point(plan, j, rows, [&](auto&& exact, auto&& flt, const auto&) {
      const std::size_t r = exact.empty() ? rank_of<FloatOps>(flt) : rank_of<ExactOps>(exact);
      if (best_rank && r <= *best_rank) return;
      best_rank = r;
      if (!exact.empty()) {
        best = null_space<ExactOps>(exact, n, Rational(0), Rational(1));
      } else {
        best.clear();
        for (auto& v : null_space<FloatOps>(flt, n, BigFloat(0.0, BigFloat::kDefaultPrecision),
                                            BigFloat(1.0, BigFloat::kDefaultPrecision))) {
          std::vector<Rational> q;
          for (const BigFloat& x : v) {
            Rational r;
            mpfr_get_q(r.get_mpq_t(), x.raw());
            q.push_back(r);
          }
          best.push_back(std::move(q));
        }
      }
    });
  }
  return best;
}

std::size_t exact_rank(std::vector<std::vector<Rational>> rows) { return rank_of<ExactOps>(rows); }

std::vector<std::vector<Rational>> exact_null_space(std::vector<std::vector<Rational>> rows, std::size_t cols) {
  return null_space<ExactOps>(std::move(rows), cols, Rational(0), Rational(1));
}

}  // namespace rankcond
