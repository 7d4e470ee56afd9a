#include "rankcond/symbols.hpp"

#include <algorithm>
#include <set>

#include "rankcond/errors.hpp"

namespace rankcond {

SymbolTable::SymbolTable(std::vector<std::string> states, std::string time, std::vector<Parameter> params)
    : states_(std::move(states)), time_(std::move(time)), params_(std::move(params)), time_expr_(Expr::symbol(time_)) {
  std::set<std::string, std::less<>> seen{time_};
  for (const auto& s : states_) {
    if (s == time_) throw InvalidArgument("time symbol '" + s + "' cannot be a state variable");
    if (!seen.insert(s).second) throw InvalidArgument("duplicate state name '" + s + "'");
    state_exprs_.push_back(Expr::symbol(s));
  }
  for (const auto& p : params_)
    if (!seen.insert(p.name).second) throw InvalidArgument("duplicate parameter name '" + p.name + "'");
}

bool SymbolTable::is_state(std::string_view name) const { return state_index(name).has_value(); }

bool SymbolTable::is_parameter(std::string_view name) const {
  return std::any_of(params_.begin(), params_.end(), [&](const Parameter& p) { return p.name == name; });
}

bool SymbolTable::contains(std::string_view name) const {
  return name == time_ || is_state(name) || is_parameter(name);
}

std::optional<std::size_t> SymbolTable::state_index(std::string_view name) const {
  for (std::size_t i = 0; i < states_.size(); ++i)
    if (states_[i] == name) return i;
  return std::nullopt;
}

std::vector<std::string> SymbolTable::sampled_symbols() const {
  std::vector<std::string> out = states_;
  for (const auto& p : params_)
    if (!p.value) out.push_back(p.name);
  return out;
}

void SymbolTable::check(const Expr& e) const {
  for (const auto& s : free_symbols(e))
    if (!contains(s)) throw UnknownSymbolError(s);
}

}  // namespace rankcond
