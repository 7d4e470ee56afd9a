#pragma once

#include <memory>
#include <vector>

#include "rankcond/expr.hpp"
#include "rankcond/symbols.hpp"

namespace rankcond {

struct ScalarField {
  Expr value;
};

/// n components in state order.
struct VectorField {
  std::vector<Expr> components;
  std::size_t size() const { return components.size(); }
  const Expr& operator[](std::size_t i) const { return components[i]; }
};

/// Row of n components in state order. The dt slot is never stored.
struct Covector {
  std::vector<Expr> components;
  std::size_t size() const { return components.size(); }
  const Expr& operator[](std::size_t i) const { return components[i]; }
};

VectorField zero_field(std::size_t n);

/// Canonical: every result is simplified. Graph: results are shared
/// derivative graphs (see graph::Tangent); small ones are simplified.
enum class FieldForm { Canonical, Graph };

/// Results of Graph-form operations with at most this many nodes are
/// simplified to canonical form.
inline constexpr std::size_t kCompactNodeLimit = 64;

/// Field calculus over one symbol table. Derivatives are memoized, so
/// repeated derivatives of shared subexpressions are computed once.
class FieldCalculus {
 public:
  explicit FieldCalculus(SymbolTable table, FieldForm form = FieldForm::Canonical);
  ~FieldCalculus();

  FieldForm form() const { return form_; }

  const SymbolTable& table() const { return table_; }
  std::size_t dimension() const { return table_.dimension(); }

  Expr partial(const Expr& e, std::size_t state);
  Expr partial_t(const Expr& e);

  Covector differential(const ScalarField& h);
  ScalarField lie_scalar(const VectorField& f, const ScalarField& h);
  /// dh/dt + L_f0 h.
  ScalarField tilde_lie_scalar(const VectorField& f0, const ScalarField& h);
  Covector lie_covector(const VectorField& f, const Covector& w);
  Covector tilde_lie_covector(const VectorField& f0, const Covector& w);
  /// (dfb/dx) fa - (dfa/dx) fb.
  VectorField lie_bracket(const VectorField& fa, const VectorField& fb);
  /// [a, f0] - da/dt.
  VectorField tv_bracket(const VectorField& a, const VectorField& f0);

  /// Throws InvalidArgument unless the field has n components, and
  /// UnknownSymbolError for symbols outside the table.
  void check(const VectorField& f) const;
  void check(const Covector& w) const;
  void check(const ScalarField& h) const;

 private:
  Differentiator& by_state(std::size_t i) { return *state_diff_[i]; }
  /// Memoized tangent along `f` (plus d/dt when `with_time`).
  graph::Tangent& tangent(const std::vector<Expr>& f, bool with_time);
  Expr finish(Expr e, const char* what) const;
  Covector graph_lie_covector(const VectorField& f, const Covector& w, bool with_time);
  VectorField graph_bracket(const VectorField& fa, const VectorField& fb, bool with_time);

  SymbolTable table_;
  FieldForm form_;
  std::vector<std::unique_ptr<Differentiator>> state_diff_;
  std::unique_ptr<Differentiator> time_diff_;
  struct TangentCache;
  std::unique_ptr<TangentCache> tangents_;
};

// Convenience wrappers over a throwaway calculus.
Covector differential(const SymbolTable& table, const ScalarField& h);
ScalarField lie_scalar(const SymbolTable& table, const VectorField& f, const ScalarField& h);
ScalarField tilde_lie_scalar(const SymbolTable& table, const VectorField& f0, const ScalarField& h);
Covector lie_covector(const SymbolTable& table, const VectorField& f, const Covector& w);
Covector tilde_lie_covector(const SymbolTable& table, const VectorField& f0, const Covector& w);
VectorField lie_bracket(const SymbolTable& table, const VectorField& fa, const VectorField& fb);
VectorField tv_bracket(const SymbolTable& table, const VectorField& a, const VectorField& f0);

/// Sum of componentwise products; canonical when both inputs are, a
/// graph otherwise.
Expr pairing(const std::vector<Expr>& a, const std::vector<Expr>& b);

}  // namespace rankcond
