#include "rankcond/expr.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <unordered_set>

#include "rankcond/errors.hpp"

namespace rankcond {

namespace detail {

struct Node {
  Kind kind = Kind::Constant;
  bool canonical = true;
  bool has_function = false;
  Func func = Func::Sin;
  std::uint64_t hash = 0;
  // Bit i set if the symbol with registry id i occurs; bit 63 means "some
  // symbol with id >= 63 occurs".
  std::uint64_t mask = 0;
  Rational scalar{0};
  std::string name;
  std::vector<Expr> children;
  std::vector<Rational> coeffs;
  std::vector<long> exps;

  Node() = default;
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;
  Node(Node&&) = default;
  ~Node();

  static Expr wrap(std::shared_ptr<const Node> p) { return Expr(std::move(p)); }
  static const Node& of(const Expr& e) { return *e.node_; }
};

}  // namespace detail

using detail::Node;

namespace {

constexpr std::uint64_t kOverflowBit = std::uint64_t{1} << 63;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finalizer over the running combination
  std::uint64_t x = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_mpz(mpz_srcptr z) {
  std::uint64_t h = static_cast<std::uint64_t>(mpz_sgn(z)) + 7;
  const std::size_t n = mpz_size(z);
  for (std::size_t i = 0; i < n; ++i) h = mix(h, static_cast<std::uint64_t>(mpz_getlimbn(z, static_cast<mp_size_t>(i))));
  return h;
}

std::uint64_t hash_rational(const Rational& q) {
  return mix(hash_mpz(q.get_num_mpz_t()), hash_mpz(q.get_den_mpz_t()));
}

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Symbol name -> small id for the per-node occurrence mask.
class SymbolRegistry {
 public:
  std::uint64_t bit(std::string_view name) {
    std::lock_guard lock(mu_);
    auto it = ids_.find(std::string(name));
    std::size_t id;
    if (it == ids_.end()) {
      id = ids_.size();
      ids_.emplace(std::string(name), id);
    } else {
      id = it->second;
    }
    return id < 63 ? (std::uint64_t{1} << id) : kOverflowBit;
  }

 private:
  std::mutex mu_;
  std::unordered_map<std::string, std::size_t> ids_;
};

SymbolRegistry& registry() {
  static auto* r = new SymbolRegistry();
  return *r;
}

bool shallow_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.canonical != b.canonical || a.func != b.func || a.scalar != b.scalar || a.name != b.name ||
      a.children.size() != b.children.size() || a.coeffs != b.coeffs || a.exps != b.exps)
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (a.children[i] != b.children[i]) return false;
  return true;
}

class InternTable {
 public:
  Expr intern(Node&& proto) {
    std::uint64_t h = mix(static_cast<std::uint64_t>(proto.kind) * 31 + (proto.canonical ? 1 : 0),
                          static_cast<std::uint64_t>(proto.func));
    h = mix(h, hash_rational(proto.scalar));
    if (!proto.name.empty()) h = mix(h, hash_string(proto.name));
    std::uint64_t mask = proto.kind == Kind::Symbol ? registry().bit(proto.name) : 0;
    bool fn = proto.kind == Kind::Function;
    for (const Expr& c : proto.children) {
      h = mix(h, c.hash());
      mask |= Node::of(c).mask;
      fn = fn || Node::of(c).has_function;
    }
    for (const Rational& q : proto.coeffs) h = mix(h, hash_rational(q));
    for (long e : proto.exps) h = mix(h, static_cast<std::uint64_t>(e));
    proto.hash = h;
    proto.mask = mask;
    proto.has_function = fn;

    std::lock_guard lock(mu_);
    auto [lo, hi] = table_.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      if (shallow_equal(*it->second.first, proto)) {
        if (auto sp = it->second.second.lock()) return Node::wrap(std::move(sp));
      }
    }
    auto sp = std::make_shared<const Node>(std::move(proto));
    table_.emplace(h, std::make_pair(sp.get(), std::weak_ptr<const Node>(sp)));
    return Node::wrap(std::move(sp));
  }

  void forget(const Node* n) {
    std::lock_guard lock(mu_);
    auto [lo, hi] = table_.equal_range(n->hash);
    for (auto it = lo; it != hi; ++it) {
      if (it->second.first == n) {
        table_.erase(it);
        return;
      }
    }
  }

 private:
  std::mutex mu_;
  std::unordered_multimap<std::uint64_t, std::pair<const Node*, std::weak_ptr<const Node>>> table_;
};

InternTable& table() {
  static auto* t = new InternTable();
  return *t;
}

const Node& N(const Expr& e) { return Node::of(e); }

Expr make_constant(const Rational& q) {
  Node n;
  n.kind = Kind::Constant;
  n.scalar = q;
  return table().intern(std::move(n));
}

const Expr& zero() {
  static const Expr z = make_constant(Rational(0));
  return z;
}

const Expr& one() {
  static const Expr o = make_constant(Rational(1));
  return o;
}

Expr make_node(Kind kind, bool canonical, std::vector<Expr> children, Rational scalar = Rational(0),
               std::vector<Rational> coeffs = {}, std::vector<long> exps = {}, Func f = Func::Sin) {
  Node n;
  n.kind = kind;
  n.canonical = canonical;
  n.children = std::move(children);
  n.scalar = std::move(scalar);
  n.coeffs = std::move(coeffs);
  n.exps = std::move(exps);
  n.func = f;
  return table().intern(std::move(n));
}

Rational rational_pow(const Rational& base, long e) {
  if (e == 0) return Rational(1);
  if (base == 0) {
    if (e < 0) throw SingularPointError("division by zero");
    return Rational(0);
  }
  if (e == 1) return base;
  const unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
  // Powers of coprime integers stay coprime, so no gcd is needed.
  Rational r;
  mpz_pow_ui(mpq_numref(r.get_mpq_t()), base.get_num_mpz_t(), k);
  mpz_pow_ui(mpq_denref(r.get_mpq_t()), base.get_den_mpz_t(), k);
  if (e < 0) {
    mpz_swap(mpq_numref(r.get_mpq_t()), mpq_denref(r.get_mpq_t()));
    if (mpz_sgn(mpq_denref(r.get_mpq_t())) < 0) {
      mpz_neg(mpq_numref(r.get_mpq_t()), mpq_numref(r.get_mpq_t()));
      mpz_neg(mpq_denref(r.get_mpq_t()), mpq_denref(r.get_mpq_t()));
    }
  }
  return r;
}

int kind_rank(Kind k) {
  switch (k) {
    case Kind::Constant: return 0;
    case Kind::Symbol: return 1;
    case Kind::Pow: return 2;
    case Kind::Mul: return 3;
    case Kind::Function: return 4;
    case Kind::Add: return 5;
    default: return 6 + static_cast<int>(k);
  }
}

// Term/base ordering used by canonical forms. A symbol sorts by name; a
// power sorts next to its base so x, x^2, y read naturally.
const Expr& sort_base(const Expr& e) {
  return N(e).kind == Kind::Pow ? N(e).children[0] : e;
}

int compare_impl(const Expr& a, const Expr& b);

int compare_lists(const Node& x, const Node& y) {
  if (x.children.size() != y.children.size()) return x.children.size() < y.children.size() ? -1 : 1;
  for (std::size_t i = 0; i < x.children.size(); ++i)
    if (int c = compare_impl(x.children[i], y.children[i])) return c;
  for (std::size_t i = 0; i < x.exps.size() && i < y.exps.size(); ++i)
    if (x.exps[i] != y.exps[i]) return x.exps[i] < y.exps[i] ? -1 : 1;
  for (std::size_t i = 0; i < x.coeffs.size() && i < y.coeffs.size(); ++i)
    if (int c = cmp(x.coeffs[i], y.coeffs[i])) return c < 0 ? -1 : 1;
  if (int c = cmp(x.scalar, y.scalar)) return c < 0 ? -1 : 1;
  if (x.func != y.func) return x.func < y.func ? -1 : 1;
  if (x.canonical != y.canonical) return x.canonical ? -1 : 1;
  return 0;
}

int compare_impl(const Expr& a, const Expr& b) {
  if (a == b) return 0;
  const Node& x = N(a);
  const Node& y = N(b);
  // Powers of symbols order with their base symbol.
  const Expr& ba = sort_base(a);
  const Expr& bb = sort_base(b);
  if (N(ba).kind == Kind::Symbol && N(bb).kind == Kind::Symbol) {
    if (ba != bb) return N(ba).name < N(bb).name ? -1 : 1;
    const long ea = x.kind == Kind::Pow ? x.exps[0] : 1;
    const long eb = y.kind == Kind::Pow ? y.exps[0] : 1;
    return ea < eb ? -1 : (ea > eb ? 1 : 0);
  }
  const int ra = N(ba).kind == Kind::Symbol ? 1 : kind_rank(x.kind);
  const int rb = N(bb).kind == Kind::Symbol ? 1 : kind_rank(y.kind);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (x.kind == Kind::Constant) return cmp(x.scalar, y.scalar) < 0 ? -1 : 1;
  if (x.hash != y.hash) return x.hash < y.hash ? -1 : 1;
  return compare_lists(x, y);
}

// ---------------------------------------------------------------------------
// Canonical sum

class SumAccumulator {
 public:
  void add(const Expr& e, const Rational& k) {
    if (k == 0) return;
    const Node& n = N(e);
    switch (n.kind) {
      case Kind::Constant:
        constant_ += k * n.scalar;
        break;
      case Kind::Add:
        constant_ += k * n.scalar;
        for (std::size_t i = 0; i < n.children.size(); ++i) add_term(n.children[i], k * n.coeffs[i]);
        break;
      case Kind::Mul:
        if (n.scalar != 1) {
          add_term(strip_coefficient(n), k * n.scalar);
          break;
        }
        add_term(e, k);
        break;
      default:
        add_term(e, k);
    }
  }

  Expr build() {
    std::vector<std::pair<Expr, Rational>> kept;
    kept.reserve(terms_.size());
    for (auto& t : terms_)
      if (t.second != 0) kept.push_back(std::move(t));
    if (kept.empty()) return make_constant(constant_);
    std::sort(kept.begin(), kept.end(),
              [](const auto& a, const auto& b) { return compare_impl(a.first, b.first) < 0; });
    if (constant_ == 0 && kept.size() == 1) return scale(kept[0].first, kept[0].second);
    std::vector<Expr> children;
    std::vector<Rational> coeffs;
    children.reserve(kept.size());
    coeffs.reserve(kept.size());
    for (auto& [t, c] : kept) {
      children.push_back(std::move(t));
      coeffs.push_back(std::move(c));
    }
    return make_node(Kind::Add, true, std::move(children), constant_, std::move(coeffs));
  }

  static Expr strip_coefficient(const Node& n);
  static Expr scale(const Expr& term, const Rational& k);

 private:
  void add_term(const Expr& term, const Rational& k) {
    auto [it, inserted] = index_.try_emplace(term.id(), terms_.size());
    if (inserted) {
      terms_.emplace_back(term, k);
    } else {
      terms_[it->second].second += k;
    }
  }

  Rational constant_{0};
  std::vector<std::pair<Expr, Rational>> terms_;
  std::unordered_map<const Node*, std::size_t> index_;
};

Expr assemble_product(const Rational& coeff, std::vector<std::pair<Expr, long>> factors) {
  if (coeff == 0) return zero();
  if (factors.empty()) return make_constant(coeff);
  if (coeff == 1 && factors.size() == 1) {
    if (factors[0].second == 1) return factors[0].first;
    return make_node(Kind::Pow, true, {factors[0].first}, Rational(0), {}, {factors[0].second});
  }
  std::vector<Expr> bases;
  std::vector<long> exps;
  bases.reserve(factors.size());
  exps.reserve(factors.size());
  for (auto& [b, e] : factors) {
    bases.push_back(std::move(b));
    exps.push_back(e);
  }
  return make_node(Kind::Mul, true, std::move(bases), coeff, {}, std::move(exps));
}

Expr SumAccumulator::strip_coefficient(const Node& n) {
  std::vector<std::pair<Expr, long>> f;
  f.reserve(n.children.size());
  for (std::size_t i = 0; i < n.children.size(); ++i) f.emplace_back(n.children[i], n.exps[i]);
  return assemble_product(Rational(1), std::move(f));
}

Expr SumAccumulator::scale(const Expr& term, const Rational& k) {
  if (k == 1) return term;
  const Node& n = N(term);
  std::vector<std::pair<Expr, long>> f;
  if (n.kind == Kind::Mul) {
    for (std::size_t i = 0; i < n.children.size(); ++i) f.emplace_back(n.children[i], n.exps[i]);
    return assemble_product(k * n.scalar, std::move(f));
  }
  if (n.kind == Kind::Pow) {
    f.emplace_back(n.children[0], n.exps[0]);
  } else {
    f.emplace_back(term, 1);
  }
  return make_node(Kind::Mul, true, {f[0].first}, k, {}, {f[0].second});
}

// ---------------------------------------------------------------------------
// Canonical product

std::size_t term_count(const Node& add) { return add.children.size() + (add.scalar != 0 ? 1 : 0); }

Expr expand_pair(const Expr& a, const Expr& b);

class ProductAccumulator {
 public:
  void multiply(const Expr& e, long exp) {
    if (exp == 0) return;
    const Node& n = N(e);
    switch (n.kind) {
      case Kind::Constant:
        if (n.scalar == 0) {
          if (exp < 0) throw SingularPointError("division by zero");
          is_zero_ = true;
        } else {
          coeff_ *= rational_pow(n.scalar, exp);
        }
        break;
      case Kind::Mul:
        coeff_ *= rational_pow(n.scalar, exp);
        for (std::size_t i = 0; i < n.children.size(); ++i) add_factor(n.children[i], n.exps[i] * exp);
        break;
      case Kind::Pow:
        add_factor(n.children[0], n.exps[0] * exp);
        break;
      default:
        add_factor(e, exp);
    }
  }

  void scale(const Rational& k) { coeff_ *= k; }

  void add_factor(const Expr& base, long exp) {
    auto [it, inserted] = index_.try_emplace(base.id(), factors_.size());
    if (inserted) {
      factors_.emplace_back(base, exp);
    } else {
      factors_[it->second].second += exp;
    }
  }

  Expr build() {
    if (is_zero_ || coeff_ == 0) return zero();
    std::vector<std::pair<Expr, long>> kept;
    kept.reserve(factors_.size());
    for (auto& f : factors_)
      if (f.second != 0) kept.push_back(std::move(f));
    std::sort(kept.begin(), kept.end(),
              [](const auto& a, const auto& b) { return compare_impl(a.first, b.first) < 0; });

    // Decide whether to distribute over positive powers of sums.
    std::size_t size = 1;
    bool any_sum = false;
    for (const auto& [b, e] : kept) {
      if (N(b).kind != Kind::Add || e <= 0) continue;
      any_sum = true;
      const std::size_t tc = term_count(N(b));
      for (long i = 0; i < e && size <= kExpansionTermLimit; ++i) size *= tc;
    }
    const bool coefficient_times_sum = kept.size() == 1 && kept[0].second == 1 && N(kept[0].first).kind == Kind::Add;
    if (!any_sum || (size > kExpansionTermLimit && !coefficient_times_sum)) return assemble_product(coeff_, std::move(kept));

    std::vector<std::pair<Expr, long>> rest;
    std::vector<std::pair<Expr, long>> sums;
    for (auto& f : kept) {
      if (N(f.first).kind == Kind::Add && f.second > 0) {
        sums.push_back(std::move(f));
      } else {
        rest.push_back(std::move(f));
      }
    }
    Expr acc = assemble_product(coeff_, std::move(rest));
    for (const auto& [b, e] : sums)
      for (long i = 0; i < e; ++i) acc = expand_pair(acc, b);
    return acc;
  }

 private:
  Rational coeff_{1};
  bool is_zero_ = false;
  std::vector<std::pair<Expr, long>> factors_;
  std::unordered_map<const Node*, std::size_t> index_;
};

Expr product_of(const Expr& a, const Expr& b) {
  ProductAccumulator acc;
  acc.multiply(a, 1);
  acc.multiply(b, 1);
  return acc.build();
}

// Distributes a * b where either may be a sum. Terms of the operands are
// never sums themselves, so the per-term products do not recurse here.
Expr expand_pair(const Expr& a, const Expr& b) {
  auto for_terms = [](const Expr& e, auto&& fn) {
    const Node& n = N(e);
    if (n.kind == Kind::Add) {
      if (n.scalar != 0) fn(make_constant(n.scalar), Rational(1));
      for (std::size_t i = 0; i < n.children.size(); ++i) fn(n.children[i], n.coeffs[i]);
    } else {
      fn(e, Rational(1));
    }
  };
  SumAccumulator sum;
  for_terms(a, [&](const Expr& ta, const Rational& ca) {
    for_terms(b, [&](const Expr& tb, const Rational& cb) { sum.add(product_of(ta, tb), ca * cb); });
  });
  return sum.build();
}

Expr canonical(const Expr& e);

Expr simplify_node(const Expr& e, std::unordered_map<const Node*, Expr>& memo) {
  const Node& n = N(e);
  if (n.canonical) return e;
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  Expr out;
  switch (n.kind) {
    case Kind::Sum: {
      SumAccumulator acc;
      for (const Expr& c : n.children) acc.add(simplify_node(c, memo), Rational(1));
      out = acc.build();
      break;
    }
    case Kind::Product: {
      ProductAccumulator acc;
      for (const Expr& c : n.children) acc.multiply(simplify_node(c, memo), 1);
      out = acc.build();
      break;
    }
    case Kind::Quotient: {
      ProductAccumulator acc;
      acc.multiply(simplify_node(n.children[0], memo), 1);
      acc.multiply(simplify_node(n.children[1], memo), -1);
      out = acc.build();
      break;
    }
    case Kind::Negation: {
      ProductAccumulator acc;
      acc.scale(Rational(-1));
      acc.multiply(simplify_node(n.children[0], memo), 1);
      out = acc.build();
      break;
    }
    case Kind::Power: {
      ProductAccumulator acc;
      acc.multiply(simplify_node(n.children[0], memo), n.exps[0]);
      out = acc.build();
      break;
    }
    case Kind::Function:
      out = apply(n.func, simplify_node(n.children[0], memo));
      break;
    default:
      out = e;
  }
  memo.emplace(e.id(), out);
  return out;
}

Expr canonical(const Expr& e) {
  if (N(e).canonical) return e;
  std::unordered_map<const Node*, Expr> memo;
  return simplify_node(e, memo);
}

}  // namespace

detail::Node::~Node() { table().forget(this); }

// ---------------------------------------------------------------------------
// Expr accessors

Expr::Expr() : node_(zero().node_) {}
Expr::Expr(long value) : Expr(make_constant(Rational(value))) {}
Expr::Expr(const Rational& value) : Expr(make_constant(value)) {}

Expr Expr::symbol(std::string_view name) {
  Node n;
  n.kind = Kind::Symbol;
  n.name = std::string(name);
  return table().intern(std::move(n));
}

Kind Expr::kind() const { return node_->kind; }
bool Expr::is_canonical() const { return node_->canonical; }
bool Expr::is_zero() const { return node_->kind == Kind::Constant && node_->scalar == 0; }
bool Expr::is_one() const { return node_->kind == Kind::Constant && node_->scalar == 1; }
const Rational& Expr::scalar() const { return node_->scalar; }
const std::string& Expr::symbol_name() const { return node_->name; }
Func Expr::function() const { return node_->func; }
std::span<const Expr> Expr::children() const { return node_->children; }
std::span<const Rational> Expr::coefficients() const { return node_->coeffs; }
std::span<const long> Expr::exponents() const { return node_->exps; }
std::uint64_t Expr::hash() const { return node_->hash; }
bool Expr::has_function() const { return node_->has_function; }

bool Expr::depends_on(std::string_view symbol) const {
  const std::uint64_t bit = registry().bit(symbol);
  if (bit != kOverflowBit) return (node_->mask & bit) != 0;
  if ((node_->mask & kOverflowBit) == 0) return false;
  for (const auto& s : free_symbols(*this))
    if (s == symbol) return true;
  return false;
}

std::size_t Expr::node_count() const {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{node_.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    for (const Expr& c : n->children) stack.push_back(c.id());
  }
  return seen.size();
}

std::string_view function_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Asin: return "asin";
    case Func::Atan: return "atan";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

std::optional<Func> function_from_name(std::string_view name) {
  for (Func f : {Func::Sin, Func::Cos, Func::Tan, Func::Asin, Func::Atan, Func::Sqrt})
    if (function_name(f) == name) return f;
  return std::nullopt;
}

int compare(const Expr& a, const Expr& b) { return compare_impl(a, b); }

// ---------------------------------------------------------------------------
// Canonical arithmetic

Expr add(std::span<const Expr> terms) {
  SumAccumulator acc;
  for (const Expr& t : terms) acc.add(canonical(t), Rational(1));
  return acc.build();
}

Expr mul(std::span<const Expr> factors) {
  ProductAccumulator acc;
  for (const Expr& f : factors) acc.multiply(canonical(f), 1);
  return acc.build();
}

Expr operator+(const Expr& a, const Expr& b) {
  SumAccumulator acc;
  acc.add(canonical(a), Rational(1));
  acc.add(canonical(b), Rational(1));
  return acc.build();
}

Expr operator-(const Expr& a, const Expr& b) {
  SumAccumulator acc;
  acc.add(canonical(a), Rational(1));
  acc.add(canonical(b), Rational(-1));
  return acc.build();
}

Expr operator-(const Expr& a) {
  ProductAccumulator acc;
  acc.scale(Rational(-1));
  acc.multiply(canonical(a), 1);
  return acc.build();
}

Expr operator*(const Expr& a, const Expr& b) { return product_of(canonical(a), canonical(b)); }

Expr operator/(const Expr& a, const Expr& b) {
  ProductAccumulator acc;
  acc.multiply(canonical(a), 1);
  acc.multiply(canonical(b), -1);
  return acc.build();
}

Expr pow(const Expr& base, long exponent) {
  ProductAccumulator acc;
  acc.multiply(canonical(base), exponent);
  return acc.build();
}

Expr apply(Func f, const Expr& argument) {
  return make_node(Kind::Function, true, {canonical(argument)}, Rational(0), {}, {}, f);
}

namespace raw {
Expr sum(std::vector<Expr> operands) { return make_node(Kind::Sum, false, std::move(operands)); }
Expr product(std::vector<Expr> operands) { return make_node(Kind::Product, false, std::move(operands)); }
Expr quotient(const Expr& numerator, const Expr& denominator) {
  return make_node(Kind::Quotient, false, {numerator, denominator});
}
Expr negation(const Expr& operand) { return make_node(Kind::Negation, false, {operand}); }
Expr power(const Expr& base, long exponent) {
  return make_node(Kind::Power, false, {base}, Rational(0), {}, {exponent});
}
Expr function(Func f, const Expr& argument) {
  return make_node(Kind::Function, N(argument).canonical, {argument}, Rational(0), {}, {}, f);
}
}  // namespace raw

Expr simplify(const Expr& e) { return canonical(e); }

// ---------------------------------------------------------------------------
// Differentiation

Differentiator::Differentiator(std::string symbol) : symbol_(std::move(symbol)), mask_(registry().bit(symbol_)) {}

Expr Differentiator::operator()(const Expr& input) {
  const Expr e = canonical(input);
  const Node& n = N(e);
  if ((n.mask & mask_) == 0) return zero();
  if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
  Expr out;
  switch (n.kind) {
    case Kind::Symbol:
      out = n.name == symbol_ ? one() : zero();
      break;
    case Kind::Add: {
      SumAccumulator acc;
      for (std::size_t i = 0; i < n.children.size(); ++i) acc.add((*this)(n.children[i]), n.coeffs[i]);
      out = acc.build();
      break;
    }
    case Kind::Mul: {
      SumAccumulator acc;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        Expr d = (*this)(n.children[i]);
        if (d.is_zero()) continue;
        ProductAccumulator term;
        term.scale(n.scalar * n.exps[i]);
        for (std::size_t j = 0; j < n.children.size(); ++j) {
          if (j != i) term.add_factor(n.children[j], n.exps[j]);
        }
        if (n.exps[i] != 1) term.add_factor(n.children[i], n.exps[i] - 1);
        term.multiply(d, 1);
        acc.add(term.build(), Rational(1));
      }
      out = acc.build();
      break;
    }
    case Kind::Pow: {
      Expr d = (*this)(n.children[0]);
      ProductAccumulator term;
      term.scale(Rational(n.exps[0]));
      if (n.exps[0] != 1) term.add_factor(n.children[0], n.exps[0] - 1);
      term.multiply(d, 1);
      out = term.build();
      break;
    }
    case Kind::Function: {
      const Expr& a = n.children[0];
      Expr d = (*this)(a);
      Expr outer;
      switch (n.func) {
        case Func::Sin: outer = apply(Func::Cos, a); break;
        case Func::Cos: outer = -apply(Func::Sin, a); break;
        case Func::Tan: outer = one() + pow(e, 2); break;
        case Func::Asin: outer = pow(apply(Func::Sqrt, one() - pow(a, 2)), -1); break;
        case Func::Atan: outer = pow(one() + pow(a, 2), -1); break;
        case Func::Sqrt: outer = Expr(Rational(1, 2)) * pow(e, -1); break;
      }
      out = outer * d;
      break;
    }
    default:
      out = zero();
  }
  memo_.emplace(e.id(), out);
  // Keep the key node alive for the lifetime of the memo.
  memo_keys_.push_back(e);
  return out;
}

Expr differentiate(const Expr& e, std::string_view symbol) {
  Differentiator d{std::string(symbol)};
  return d(e);
}

// ---------------------------------------------------------------------------
// Graph-form derivatives

namespace graph {

namespace {

bool is_const(const Expr& e) { return e.kind() == Kind::Constant; }

Expr outer_derivative(const Node& n, const Expr& self) {
  const Expr& a = n.children[0];
  switch (n.func) {
    case Func::Sin: return raw::function(Func::Cos, a);
    case Func::Cos: return negate(raw::function(Func::Sin, a));
    case Func::Tan: return sum({one(), power(self, 2)});
    case Func::Asin: return power(raw::function(Func::Sqrt, sum({one(), negate(power(a, 2))})), -1);
    case Func::Atan: return power(sum({one(), power(a, 2)}), -1);
    case Func::Sqrt: return product({Expr(Rational(1, 2)), power(self, -1)});
  }
  return zero();
}

// The factors of a product node as (base, exponent) pairs together with the
// constant coefficient.
struct Factors {
  Rational coeff{1};
  std::vector<Expr> bases;
  std::vector<long> exps;
  std::vector<Expr> powered;
  // prefix[k] = product of powered[0..k), suffix[k] = product of powered[k..)
  std::vector<Expr> prefix, suffix;

  explicit Factors(const Node& n) {
    if (n.kind == Kind::Mul) coeff = n.scalar;
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      bases.push_back(n.children[i]);
      exps.push_back(n.kind == Kind::Mul ? n.exps[i] : 1);
      powered.push_back(power(bases.back(), exps.back()));
    }
    const std::size_t f = bases.size();
    prefix.assign(f + 1, one());
    suffix.assign(f + 1, one());
    for (std::size_t i = 0; i < f; ++i) prefix[i + 1] = product({prefix[i], powered[i]});
    for (std::size_t i = f; i-- > 0;) suffix[i] = product({powered[i], suffix[i + 1]});
  }

  // d(node)/d(bases[k]) holding the other factors fixed.
  Expr local(std::size_t k) const {
    return product({Expr(coeff * exps[k]), power(bases[k], exps[k] - 1), prefix[k], suffix[k + 1]});
  }
};

}  // namespace

Expr sum(std::vector<Expr> terms) {
  Rational c(0);
  std::vector<Expr> rest;
  rest.reserve(terms.size());
  for (Expr& t : terms) {
    if (is_const(t)) {
      c += t.scalar();
    } else {
      rest.push_back(std::move(t));
    }
  }
  if (c != 0) rest.push_back(make_constant(c));
  if (rest.empty()) return zero();
  if (rest.size() == 1) return rest.front();
  return raw::sum(std::move(rest));
}

Expr product(std::vector<Expr> factors) {
  Rational c(1);
  std::vector<Expr> rest;
  rest.reserve(factors.size());
  for (Expr& f : factors) {
    if (is_const(f)) {
      if (f.scalar() == 0) return zero();
      c *= f.scalar();
    } else {
      rest.push_back(std::move(f));
    }
  }
  if (rest.empty()) return make_constant(c);
  if (c == -1 && rest.size() == 1) return negate(rest.front());
  if (c != 1) rest.insert(rest.begin(), make_constant(c));
  if (rest.size() == 1) return rest.front();
  return raw::product(std::move(rest));
}

Expr negate(const Expr& e) {
  if (is_const(e)) return make_constant(-e.scalar());
  if (e.kind() == Kind::Negation) return e.children()[0];
  return raw::negation(e);
}

Expr power(const Expr& base, long exponent) {
  if (exponent == 0) return one();
  if (exponent == 1) return base;
  if (is_const(base)) {
    if (base.scalar() == 0 && exponent < 0) throw SingularPointError("zero raised to a negative power");
    return make_constant(rational_pow(base.scalar(), exponent));
  }
  return raw::power(base, exponent);
}

Expr quotient(const Expr& numerator, const Expr& denominator) {
  if (is_const(denominator)) {
    if (denominator.scalar() == 0) throw SingularPointError("division by zero");
    return product({numerator, make_constant(1 / denominator.scalar())});
  }
  if (numerator.is_zero()) return zero();
  return raw::quotient(numerator, denominator);
}

Tangent::Tangent(std::map<std::string, Expr, std::less<>> direction) : direction_(std::move(direction)) {
  for (auto it = direction_.begin(); it != direction_.end();) {
    if (it->second.is_zero()) {
      it = direction_.erase(it);
    } else {
      mask_ |= registry().bit(it->first);
      ++it;
    }
  }
}

Expr Tangent::operator()(const Expr& e) {
  const Node& n = N(e);
  if ((n.mask & mask_) == 0) return zero();
  if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
  Expr out;
  switch (n.kind) {
    case Kind::Constant:
      out = zero();
      break;
    case Kind::Symbol: {
      auto it = direction_.find(n.name);
      out = it == direction_.end() ? zero() : it->second;
      break;
    }
    case Kind::Add: {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < n.children.size(); ++i)
        terms.push_back(product({make_constant(n.coeffs[i]), (*this)(n.children[i])}));
      out = sum(std::move(terms));
      break;
    }
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const Expr& c : n.children) terms.push_back((*this)(c));
      out = sum(std::move(terms));
      break;
    }
    case Kind::Mul:
    case Kind::Product: {
      std::vector<Expr> terms;
      std::optional<Factors> f;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        Expr d = (*this)(n.children[i]);
        if (d.is_zero()) continue;
        if (!f) f.emplace(n);
        terms.push_back(product({f->local(i), d}));
      }
      out = sum(std::move(terms));
      break;
    }
    case Kind::Pow:
    case Kind::Power: {
      const long k = n.exps[0];
      out = product({make_constant(Rational(k)), power(n.children[0], k - 1), (*this)(n.children[0])});
      break;
    }
    case Kind::Quotient: {
      const Expr& a = n.children[0];
      const Expr& b = n.children[1];
      Expr da = (*this)(a);
      Expr db = (*this)(b);
      if (db.is_zero()) {
        out = quotient(da, b);
      } else {
        out = quotient(sum({product({da, b}), negate(product({a, db}))}), power(b, 2));
      }
      break;
    }
    case Kind::Negation:
      out = negate((*this)(n.children[0]));
      break;
    case Kind::Function:
      out = product({outer_derivative(n, e), (*this)(n.children[0])});
      break;
  }
  memo_.emplace(e.id(), out);
  memo_keys_.push_back(e);
  return out;
}

std::vector<Expr> pullback(const std::vector<Expr>& roots, const std::vector<Expr>& seeds,
                           const std::vector<std::string>& symbols) {
  if (roots.size() != seeds.size()) throw InvalidArgument("pullback needs one seed per root");
  std::uint64_t mask = 0;
  for (const auto& s : symbols) mask |= registry().bit(s);

  // Post-order over the relevant part of the graph; parents come after
  // their children, so the reverse visits every parent first.
  std::vector<const Expr*> order;
  std::unordered_set<const Node*> seen;
  std::vector<std::pair<const Expr*, std::size_t>> stack;
  for (const Expr& r : roots) {
    if ((N(r).mask & mask) == 0 || !seen.insert(r.id()).second) continue;
    stack.emplace_back(&r, 0);
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto& children = N(*node).children;
      if (next < children.size()) {
        const Expr* c = &children[next++];
        if ((N(*c).mask & mask) != 0 && seen.insert(c->id()).second) stack.emplace_back(c, 0);
      } else {
        order.push_back(node);
        stack.pop_back();
      }
    }
  }

  std::unordered_map<const Node*, std::vector<Expr>> contrib;
  for (std::size_t k = 0; k < roots.size(); ++k)
    if (!seeds[k].is_zero() && (N(roots[k]).mask & mask) != 0) contrib[roots[k].id()].push_back(seeds[k]);

  std::unordered_map<const Node*, Expr> adjoint;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Expr& self = **it;
    const Node& n = N(self);
    auto c = contrib.find(&n);
    if (c == contrib.end()) continue;
    Expr adj = sum(std::move(c->second));
    contrib.erase(c);
    if (adj.is_zero()) continue;
    if (n.kind == Kind::Symbol) {
      adjoint.emplace(&n, adj);
      continue;
    }
    auto push = [&](const Expr& child, Expr value) {
      if ((N(child).mask & mask) == 0 || value.is_zero()) return;
      contrib[child.id()].push_back(std::move(value));
    };
    switch (n.kind) {
      case Kind::Add:
        for (std::size_t i = 0; i < n.children.size(); ++i)
          push(n.children[i], product({make_constant(n.coeffs[i]), adj}));
        break;
      case Kind::Sum:
        for (const Expr& ch : n.children) push(ch, adj);
        break;
      case Kind::Mul:
      case Kind::Product: {
        Factors f(n);
        for (std::size_t i = 0; i < n.children.size(); ++i)
          if ((N(n.children[i]).mask & mask) != 0) push(n.children[i], product({adj, f.local(i)}));
        break;
      }
      case Kind::Pow:
      case Kind::Power: {
        const long k = n.exps[0];
        push(n.children[0], product({adj, make_constant(Rational(k)), power(n.children[0], k - 1)}));
        break;
      }
      case Kind::Quotient: {
        const Expr& a = n.children[0];
        const Expr& b = n.children[1];
        push(a, quotient(adj, b));
        push(b, negate(quotient(product({adj, a}), power(b, 2))));
        break;
      }
      case Kind::Negation:
        push(n.children[0], negate(adj));
        break;
      case Kind::Function: {
        push(n.children[0], product({adj, outer_derivative(n, self)}));
        break;
      }
      default:
        break;
    }
  }

  std::vector<Expr> out;
  out.reserve(symbols.size());
  for (const auto& s : symbols) {
    auto it = adjoint.find(Expr::symbol(s).id());
    out.push_back(it == adjoint.end() ? zero() : it->second);
  }
  return out;
}

}  // namespace graph

// ---------------------------------------------------------------------------
// Substitution and inspection

Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacements) {
  std::unordered_map<const Node*, Expr> memo;
  auto rec = [&](auto&& self, const Expr& x) -> Expr {
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    const Node& n = N(x);
    Expr out;
    switch (n.kind) {
      case Kind::Constant: out = x; break;
      case Kind::Symbol: {
        auto it = replacements.find(n.name);
        out = it == replacements.end() ? x : canonical(it->second);
        break;
      }
      case Kind::Add:
      case Kind::Sum: {
        SumAccumulator acc;
        if (n.kind == Kind::Add) acc.add(make_constant(n.scalar), Rational(1));
        for (std::size_t i = 0; i < n.children.size(); ++i)
          acc.add(self(self, n.children[i]), n.kind == Kind::Add ? n.coeffs[i] : Rational(1));
        out = acc.build();
        break;
      }
      case Kind::Mul:
      case Kind::Product: {
        ProductAccumulator acc;
        if (n.kind == Kind::Mul) acc.scale(n.scalar);
        for (std::size_t i = 0; i < n.children.size(); ++i)
          acc.multiply(self(self, n.children[i]), n.kind == Kind::Mul ? n.exps[i] : 1);
        out = acc.build();
        break;
      }
      case Kind::Pow:
      case Kind::Power: out = pow(self(self, n.children[0]), n.exps[0]); break;
      case Kind::Quotient: out = self(self, n.children[0]) / self(self, n.children[1]); break;
      case Kind::Negation: out = -self(self, n.children[0]); break;
      case Kind::Function: out = apply(n.func, self(self, n.children[0])); break;
    }
    memo.emplace(x.id(), out);
    return out;
  };
  return rec(rec, e);
}

std::vector<std::string> free_symbols(const Expr& e) {
  std::unordered_set<const Node*> seen;
  std::vector<std::string> out;
  std::vector<const Node*> stack{e.id()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->kind == Kind::Symbol) out.push_back(n->name);
    for (const Expr& c : n->children) stack.push_back(c.id());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_node_cap(const Expr& e, std::string_view context) {
  const std::size_t count = e.node_count();
  if (count > kNodeCountCap)
    throw ExpressionSwellError(std::string(context) + ": expression has " + std::to_string(count) +
                               " nodes, above the cap of " + std::to_string(kNodeCountCap));
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {
struct NeedsFloat {};
}  // namespace

std::optional<Rational> RationalEvaluator::operator()(const Expr& e) {
  roots_.push_back(e);
  try {
    return eval(e.id());
  } catch (const NeedsFloat&) {
    return std::nullopt;
  }
}

const Rational& RationalEvaluator::eval(const Node* n) {
  if (n->kind == Kind::Constant) return n->scalar;
  if (auto it = memo_.find(n); it != memo_.end()) return it->second;
  Rational v;
  switch (n->kind) {
    case Kind::Symbol: {
      auto it = assignment_.find(n->name);
      if (it == assignment_.end()) throw UnknownSymbolError(n->name);
      v = it->second;
      break;
    }
    case Kind::Add:
      v = n->scalar;
      for (std::size_t i = 0; i < n->children.size(); ++i) v += n->coeffs[i] * eval(n->children[i].id());
      break;
    case Kind::Sum:
      v = 0;
      for (const Expr& c : n->children) v += eval(c.id());
      break;
    case Kind::Mul:
      v = n->scalar;
      for (std::size_t i = 0; i < n->children.size(); ++i) {
        const Rational& b = eval(n->children[i].id());
        v *= n->exps[i] == 1 ? b : rational_pow(b, n->exps[i]);
      }
      break;
    case Kind::Product:
      v = 1;
      for (const Expr& c : n->children) v *= eval(c.id());
      break;
    case Kind::Pow:
    case Kind::Power:
      v = rational_pow(eval(n->children[0].id()), n->exps[0]);
      break;
    case Kind::Quotient: {
      const Rational& den = eval(n->children[1].id());
      if (den == 0) throw SingularPointError("division by zero");
      v = eval(n->children[0].id()) / den;
      break;
    }
    case Kind::Negation:
      v = -eval(n->children[0].id());
      break;
    case Kind::Function:
      throw NeedsFloat{};
    case Kind::Constant:
      break;
  }
  return memo_.emplace(n, std::move(v)).first->second;
}

namespace modp {

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = a + b;
  return r >= kPrime ? r - kPrime : r;
}

std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kPrime - b; }

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 w = static_cast<unsigned __int128>(a) * b;
  std::uint64_t r = static_cast<std::uint64_t>(w & kPrime) + static_cast<std::uint64_t>(w >> 61);
  return r >= kPrime ? r - kPrime : r;
}

std::uint64_t pow(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

std::uint64_t inv(std::uint64_t a) {
  if (a == 0) throw SingularPointError("division by zero");
  return pow(a, kPrime - 2);
}

std::uint64_t from_rational(const Rational& q) {
  if (mpz_cmp_ui(q.get_den_mpz_t(), 1) == 0 && mpz_fits_slong_p(q.get_num_mpz_t())) {
    const long v = mpz_get_si(q.get_num_mpz_t());
    return v >= 0 ? static_cast<std::uint64_t>(v) % kPrime : sub(0, static_cast<std::uint64_t>(-v) % kPrime);
  }
  mpz_class p(static_cast<unsigned long>(kPrime));
  mpz_class num, den;
  mpz_mod(num.get_mpz_t(), q.get_num_mpz_t(), p.get_mpz_t());
  mpz_mod(den.get_mpz_t(), q.get_den_mpz_t(), p.get_mpz_t());
  if (den == 0) throw SingularPointError("denominator vanishes modulo the evaluation prime");
  return mul(static_cast<std::uint64_t>(num.get_ui()), inv(static_cast<std::uint64_t>(den.get_ui())));
}

}  // namespace modp

namespace {
std::uint64_t mod_pow(std::uint64_t b, long e) {
  if (e == 1) return b;
  if (e == 2) return modp::mul(b, b);
  if (e >= 0) return modp::pow(b, static_cast<std::uint64_t>(e));
  return modp::inv(modp::pow(b, static_cast<std::uint64_t>(-e)));
}
}  // namespace

std::optional<std::uint64_t> ModularEvaluator::operator()(const Expr& e) {
  roots_.push_back(e);
  if (e.has_function()) return std::nullopt;
  return eval(e.id());
}

std::uint64_t ModularEvaluator::eval(const Node* n) {
  if (auto it = memo_.find(n); it != memo_.end()) return it->second;
  std::uint64_t v = 0;
  switch (n->kind) {
    case Kind::Constant:
      v = modp::from_rational(n->scalar);
      break;
    case Kind::Symbol: {
      auto it = assignment_.find(n->name);
      if (it == assignment_.end()) throw UnknownSymbolError(n->name);
      v = it->second;
      break;
    }
    case Kind::Add:
      v = modp::from_rational(n->scalar);
      for (std::size_t i = 0; i < n->children.size(); ++i)
        v = modp::add(v, modp::mul(modp::from_rational(n->coeffs[i]), eval(n->children[i].id())));
      break;
    case Kind::Sum:
      for (const Expr& c : n->children) v = modp::add(v, eval(c.id()));
      break;
    case Kind::Mul:
      v = modp::from_rational(n->scalar);
      for (std::size_t i = 0; i < n->children.size(); ++i) v = modp::mul(v, mod_pow(eval(n->children[i].id()), n->exps[i]));
      break;
    case Kind::Product:
      v = 1;
      for (const Expr& c : n->children) v = modp::mul(v, eval(c.id()));
      break;
    case Kind::Pow:
    case Kind::Power:
      v = mod_pow(eval(n->children[0].id()), n->exps[0]);
      break;
    case Kind::Quotient:
      v = modp::mul(eval(n->children[0].id()), modp::inv(eval(n->children[1].id())));
      break;
    case Kind::Negation:
      v = modp::sub(0, eval(n->children[0].id()));
      break;
    case Kind::Function:
      throw InvalidArgument("modular evaluation of a transcendental function");
  }
  memo_.emplace(n, v);
  return v;
}

BigFloat FloatEvaluator::operator()(const Expr& e) {
  roots_.push_back(e);
  return eval(e.id());
}

namespace {
BigFloat float_pow(const BigFloat& b, long e, mpfr_prec_t prec) {
  if (e < 0 && b.is_zero()) throw SingularPointError("division by zero");
  BigFloat r(prec);
  mpfr_pow_si(r.raw(), b.raw(), e, MPFR_RNDN);
  return r;
}
}  // namespace

const BigFloat& FloatEvaluator::eval(const Node* n) {
  if (auto it = memo_.find(n); it != memo_.end()) return it->second;
  BigFloat v(precision_);
  switch (n->kind) {
    case Kind::Constant:
      v = BigFloat(n->scalar, precision_);
      break;
    case Kind::Symbol: {
      auto it = assignment_.find(n->name);
      if (it == assignment_.end()) throw UnknownSymbolError(n->name);
      mpfr_set(v.raw(), it->second.raw(), MPFR_RNDN);
      break;
    }
    case Kind::Add:
      v = BigFloat(n->scalar, precision_);
      for (std::size_t i = 0; i < n->children.size(); ++i)
        v = v + BigFloat(n->coeffs[i], precision_) * eval(n->children[i].id());
      break;
    case Kind::Sum:
      for (const Expr& c : n->children) v = v + eval(c.id());
      break;
    case Kind::Mul:
      v = BigFloat(n->scalar, precision_);
      for (std::size_t i = 0; i < n->children.size(); ++i)
        v = v * float_pow(eval(n->children[i].id()), n->exps[i], precision_);
      break;
    case Kind::Product:
      v = BigFloat(Rational(1), precision_);
      for (const Expr& c : n->children) v = v * eval(c.id());
      break;
    case Kind::Pow:
    case Kind::Power:
      v = float_pow(eval(n->children[0].id()), n->exps[0], precision_);
      break;
    case Kind::Quotient: {
      const BigFloat& den = eval(n->children[1].id());
      if (den.is_zero()) throw SingularPointError("division by zero");
      v = eval(n->children[0].id()) / den;
      break;
    }
    case Kind::Negation:
      v = -eval(n->children[0].id());
      break;
    case Kind::Function: {
      const BigFloat& a = eval(n->children[0].id());
      switch (n->func) {
        case Func::Sin: mpfr_sin(v.raw(), a.raw(), MPFR_RNDN); break;
        case Func::Cos: mpfr_cos(v.raw(), a.raw(), MPFR_RNDN); break;
        case Func::Tan: mpfr_tan(v.raw(), a.raw(), MPFR_RNDN); break;
        case Func::Atan: mpfr_atan(v.raw(), a.raw(), MPFR_RNDN); break;
        case Func::Asin:
          if (mpfr_cmp_si(a.raw(), 1) > 0 || mpfr_cmp_si(a.raw(), -1) < 0)
            throw SingularPointError("asin argument outside [-1, 1]");
          mpfr_asin(v.raw(), a.raw(), MPFR_RNDN);
          break;
        case Func::Sqrt:
          if (a.sign() < 0) throw SingularPointError("sqrt of a negative number");
          mpfr_sqrt(v.raw(), a.raw(), MPFR_RNDN);
          break;
      }
      break;
    }
  }
  if (v.is_nan() || mpfr_inf_p(v.raw())) throw SingularPointError("non-finite value");
  return memo_.emplace(n, std::move(v)).first->second;
}

std::optional<Rational> evaluate_rational(const Expr& e, const Assignment<Rational>& assignment) {
  RationalEvaluator ev(assignment);
  return ev(e);
}

BigFloat evaluate_float(const Expr& e, const Assignment<BigFloat>& assignment, mpfr_prec_t precision) {
  if (precision < 53) throw InvalidArgument("float evaluation needs at least 53 bits of precision");
  FloatEvaluator ev(assignment, precision);
  return ev(e);
}

}  // namespace rankcond
