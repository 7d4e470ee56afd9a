#include "rankcond/fields.hpp"

#include <algorithm>
#include <map>

#include "rankcond/errors.hpp"

namespace rankcond {

namespace {

Expr stored(Expr e, const char* what) {
  check_node_cap(e, what);
  return e;
}

void require_size(std::size_t got, std::size_t n, const char* what) {
  if (got != n)
    throw InvalidArgument(std::string(what) + " has " + std::to_string(got) + " components, expected " +
                          std::to_string(n));
}

}  // namespace

VectorField zero_field(std::size_t n) { return VectorField{std::vector<Expr>(n, Expr())}; }

Expr pairing(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  if (a.size() != b.size()) throw InvalidArgument("pairing of vectors with different lengths");
  const auto canon = [](const Expr& e) { return e.is_canonical(); };
  const bool graph_form = !std::all_of(a.begin(), a.end(), canon) || !std::all_of(b.begin(), b.end(), canon);
  std::vector<Expr> terms;
  terms.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    terms.push_back(graph_form ? graph::product({a[i], b[i]}) : a[i] * b[i]);
  return graph_form ? graph::sum(std::move(terms)) : add(terms);
}

struct FieldCalculus::TangentCache {
  // Keyed by the component nodes of the direction and the time flag.
  std::map<std::pair<std::vector<const detail::Node*>, bool>, std::unique_ptr<graph::Tangent>> map;
  std::vector<std::vector<Expr>> keep;
};

FieldCalculus::FieldCalculus(SymbolTable table, FieldForm form)
    : table_(std::move(table)), form_(form), tangents_(std::make_unique<TangentCache>()) {
  for (const auto& s : table_.states()) state_diff_.push_back(std::make_unique<Differentiator>(s));
  time_diff_ = std::make_unique<Differentiator>(table_.time());
}

FieldCalculus::~FieldCalculus() = default;

graph::Tangent& FieldCalculus::tangent(const std::vector<Expr>& f, bool with_time) {
  std::vector<const detail::Node*> key;
  key.reserve(f.size());
  for (const Expr& e : f) key.push_back(e.id());
  auto& slot = tangents_->map[{key, with_time}];
  if (!slot) {
    std::map<std::string, Expr, std::less<>> dir;
    for (std::size_t i = 0; i < f.size(); ++i) dir.emplace(table_.states()[i], f[i]);
    if (with_time) dir.emplace(table_.time(), Expr(1));
    slot = std::make_unique<graph::Tangent>(std::move(dir));
    tangents_->keep.push_back(f);
  }
  return *slot;
}

Expr FieldCalculus::finish(Expr e, const char* what) const {
  if (form_ == FieldForm::Canonical || e.is_canonical()) return stored(std::move(e), what);
  const std::size_t count = e.node_count();
  if (count <= kCompactNodeLimit) return simplify(e);
  if (count > kNodeCountCap) check_node_cap(e, what);
  return e;
}

Expr FieldCalculus::partial(const Expr& e, std::size_t state) {
  if (form_ == FieldForm::Graph) {
    std::vector<Expr> unit(dimension(), Expr());
    unit[state] = Expr(1);
    return finish(tangent(unit, false)(e), "partial derivative");
  }
  return by_state(state)(e);
}

Expr FieldCalculus::partial_t(const Expr& e) {
  if (form_ == FieldForm::Graph) return finish(tangent(std::vector<Expr>(dimension(), Expr()), true)(e), "partial derivative");
  return (*time_diff_)(e);
}

void FieldCalculus::check(const VectorField& f) const {
  require_size(f.size(), dimension(), "vector field");
  for (const Expr& e : f.components) table_.check(e);
}

void FieldCalculus::check(const Covector& w) const {
  require_size(w.size(), dimension(), "covector");
  for (const Expr& e : w.components) table_.check(e);
}

void FieldCalculus::check(const ScalarField& h) const { table_.check(h.value); }

Covector FieldCalculus::differential(const ScalarField& h) {
  if (form_ == FieldForm::Graph) {
    Covector w{graph::gradient(h.value, table_.states())};
    for (Expr& c : w.components) c = finish(std::move(c), "differential");
    return w;
  }
  Covector w;
  w.components.reserve(dimension());
  for (std::size_t i = 0; i < dimension(); ++i) w.components.push_back(stored(partial(h.value, i), "differential"));
  return w;
}

ScalarField FieldCalculus::lie_scalar(const VectorField& f, const ScalarField& h) {
  require_size(f.size(), dimension(), "vector field");
  if (form_ == FieldForm::Graph) return {finish(tangent(f.components, false)(h.value), "Lie derivative")};
  std::vector<Expr> terms;
  terms.reserve(dimension());
  for (std::size_t i = 0; i < dimension(); ++i) {
    if (f[i].is_zero()) continue;
    terms.push_back(partial(h.value, i) * f[i]);
  }
  return {stored(add(terms), "Lie derivative")};
}

ScalarField FieldCalculus::tilde_lie_scalar(const VectorField& f0, const ScalarField& h) {
  if (form_ == FieldForm::Graph) {
    require_size(f0.size(), dimension(), "vector field");
    return {finish(tangent(f0.components, true)(h.value), "Lie derivative")};
  }
  return {stored(partial_t(h.value) + lie_scalar(f0, h).value, "Lie derivative")};
}

Covector FieldCalculus::lie_covector(const VectorField& f, const Covector& w) {
  require_size(f.size(), dimension(), "vector field");
  require_size(w.size(), dimension(), "covector");
  const std::size_t n = dimension();
  if (form_ == FieldForm::Graph) return graph_lie_covector(f, w, false);
  Covector out;
  out.components.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < n; ++i) {
      if (!f[i].is_zero()) terms.push_back(partial(w[j], i) * f[i]);
      if (!w[i].is_zero()) terms.push_back(w[i] * partial(f[i], j));
    }
    out.components.push_back(stored(add(terms), "Lie derivative"));
  }
  return out;
}

Covector FieldCalculus::tilde_lie_covector(const VectorField& f0, const Covector& w) {
  if (form_ == FieldForm::Graph) {
    require_size(f0.size(), dimension(), "vector field");
    require_size(w.size(), dimension(), "covector");
    return graph_lie_covector(f0, w, true);
  }
  Covector out = lie_covector(f0, w);
  for (std::size_t j = 0; j < out.size(); ++j)
    out.components[j] = stored(partial_t(w[j]) + out.components[j], "Lie derivative");
  return out;
}

VectorField FieldCalculus::lie_bracket(const VectorField& fa, const VectorField& fb) {
  require_size(fa.size(), dimension(), "vector field");
  require_size(fb.size(), dimension(), "vector field");
  const std::size_t n = dimension();
  if (form_ == FieldForm::Graph) return graph_bracket(fa, fb, false);
  VectorField out;
  out.components.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < n; ++i) {
      if (!fa[i].is_zero()) terms.push_back(partial(fb[k], i) * fa[i]);
      if (!fb[i].is_zero()) terms.push_back(-(partial(fa[k], i) * fb[i]));
    }
    out.components.push_back(stored(add(terms), "Lie bracket"));
  }
  return out;
}

VectorField FieldCalculus::tv_bracket(const VectorField& a, const VectorField& f0) {
  if (form_ == FieldForm::Graph) {
    require_size(a.size(), dimension(), "vector field");
    require_size(f0.size(), dimension(), "vector field");
    return graph_bracket(a, f0, true);
  }
  VectorField out = lie_bracket(a, f0);
  for (std::size_t k = 0; k < out.size(); ++k)
    out.components[k] = stored(out.components[k] - partial_t(a[k]), "Lie bracket");
  return out;
}

// (dw/dx) f + (df/dx)^T w, plus dw/dt when `with_time`.
Covector FieldCalculus::graph_lie_covector(const VectorField& f, const Covector& w, bool with_time) {
  graph::Tangent& along = tangent(f.components, with_time);
  const std::vector<Expr> pulled = graph::pullback(f.components, w.components, table_.states());
  Covector out;
  for (std::size_t j = 0; j < dimension(); ++j)
    out.components.push_back(finish(graph::sum({along(w[j]), pulled[j]}), "Lie derivative"));
  return out;
}

// (dfb/dx) fa - (dfa/dx) fb, minus dfa/dt when `with_time`.
VectorField FieldCalculus::graph_bracket(const VectorField& fa, const VectorField& fb, bool with_time) {
  graph::Tangent& along_a = tangent(fa.components, false);
  graph::Tangent& along_b = tangent(fb.components, with_time);
  VectorField out;
  for (std::size_t k = 0; k < dimension(); ++k)
    out.components.push_back(
        finish(graph::sum({along_a(fb[k]), graph::negate(along_b(fa[k]))}), "Lie bracket"));
  return out;
}

Covector differential(const SymbolTable& table, const ScalarField& h) { return FieldCalculus(table).differential(h); }

ScalarField lie_scalar(const SymbolTable& table, const VectorField& f, const ScalarField& h) {
  return FieldCalculus(table).lie_scalar(f, h);
}

ScalarField tilde_lie_scalar(const SymbolTable& table, const VectorField& f0, const ScalarField& h) {
  return FieldCalculus(table).tilde_lie_scalar(f0, h);
}

Covector lie_covector(const SymbolTable& table, const VectorField& f, const Covector& w) {
  return FieldCalculus(table).lie_covector(f, w);
}

Covector tilde_lie_covector(const SymbolTable& table, const VectorField& f0, const Covector& w) {
  return FieldCalculus(table).tilde_lie_covector(f0, w);
}

VectorField lie_bracket(const SymbolTable& table, const VectorField& fa, const VectorField& fb) {
  return FieldCalculus(table).lie_bracket(fa, fb);
}

VectorField tv_bracket(const SymbolTable& table, const VectorField& a, const VectorField& f0) {
  return FieldCalculus(table).tv_bracket(a, f0);
}

}  // namespace rankcond
