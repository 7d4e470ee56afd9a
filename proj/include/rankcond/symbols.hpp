#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankcond/expr.hpp"

namespace rankcond {

struct Parameter {
  std::string name;
  std::optional<Rational> value;
};

/// Ordered state names, the time symbol and the parameters of one system.
/// The state order fixes the coordinate order of every vector and covector.
class SymbolTable {
 public:
  SymbolTable() = default;
  /// Throws InvalidArgument on duplicate names or if `time` is a state.
  SymbolTable(std::vector<std::string> states, std::string time = "t", std::vector<Parameter> params = {});

  std::size_t dimension() const { return states_.size(); }
  const std::vector<std::string>& states() const { return states_; }
  const std::string& time() const { return time_; }
  const std::vector<Parameter>& parameters() const { return params_; }

  bool is_state(std::string_view name) const;
  bool is_parameter(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::optional<std::size_t> state_index(std::string_view name) const;

  const Expr& state_symbol(std::size_t i) const { return state_exprs_[i]; }
  const Expr& time_symbol() const { return time_expr_; }

  /// Names sampled during rank tests: states then unbound parameters.
  std::vector<std::string> sampled_symbols() const;

  /// Throws UnknownSymbolError naming the first symbol of `e` not in the table.
  void check(const Expr& e) const;

 private:
  std::vector<std::string> states_;
  std::string time_ = "t";
  std::vector<Parameter> params_;
  std::vector<Expr> state_exprs_;
  Expr time_expr_ = Expr::symbol("t");
};

}  // namespace rankcond
