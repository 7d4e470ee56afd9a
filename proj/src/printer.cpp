#include <string>

#include "rankcond/expr.hpp"

namespace rankcond {

namespace {

// Precedence of the enclosing context: 0 sum, 1 product, 2 power base.
std::string print(const Expr& e, int prec);

std::string paren(std::string s, bool wrap) { return wrap ? "(" + s + ")" : s; }

std::string print_rational(const Rational& q, int prec) {
  std::string s = q.get_str();
  const bool compound = q < 0 || (prec >= 2 && q.get_den() != 1);
  return paren(std::move(s), prec >= 1 && compound);
}

std::string print_factor(const Expr& base, long exp) {
  if (exp == 1) return print(base, 2);
  return print(base, 2) + "^" + std::to_string(exp);
}

std::string print(const Expr& e, int prec) {
  switch (e.kind()) {
    case Kind::Constant:
      return print_rational(e.scalar(), prec);
    case Kind::Symbol:
      return e.symbol_name();
    case Kind::Add: {
      std::string s;
      const auto terms = e.children();
      const auto coeffs = e.coefficients();
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const Rational& c = coeffs[i];
        const Rational mag = abs(c);
        if (i == 0) {
          if (c < 0) s += "-";
        } else {
          s += c < 0 ? " - " : " + ";
        }
        if (mag != 1) s += print_rational(mag, 1) + "*";
        s += print(terms[i], 1);
      }
      if (e.scalar() != 0) {
        s += e.scalar() < 0 ? " - " : " + ";
        s += Rational(abs(e.scalar())).get_str();
      }
      return paren(std::move(s), prec >= 1);
    }
    case Kind::Mul: {
      std::string s;
      const Rational& c = e.scalar();
      if (c == -1) {
        s = "-";
      } else if (c != 1) {
        s = c.get_str() + "*";
      }
      const auto bases = e.children();
      const auto exps = e.exponents();
      for (std::size_t i = 0; i < bases.size(); ++i) {
        if (i > 0) s += "*";
        s += print_factor(bases[i], exps[i]);
      }
      return paren(std::move(s), prec >= 2 || (prec >= 1 && c < 0));
    }
    case Kind::Pow:
      return paren(print_factor(e.children()[0], e.exponents()[0]), prec >= 2);
    case Kind::Power:
      // Raw powers keep a unit exponent so the text reparses to the same tree.
      return paren(print(e.children()[0], 2) + "^" + std::to_string(e.exponents()[0]), prec >= 2);
    case Kind::Function:
      return std::string(function_name(e.function())) + "(" + print(e.children()[0], 0) + ")";
    case Kind::Sum: {
      std::string s;
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i > 0) s += " + ";
        s += print(e.children()[i], 1);
      }
      return paren(std::move(s), prec >= 1);
    }
    case Kind::Product: {
      std::string s;
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i > 0) s += "*";
        s += print(e.children()[i], 2);
      }
      return paren(std::move(s), prec >= 2);
    }
    case Kind::Quotient: {
      const Expr& num = e.children()[0];
      std::string head = print(num, 1);
      // "2/3" would read back as one rational constant.
      if (num.is_constant() && num.scalar().get_den() == 1 && num.scalar() >= 0 && e.children()[1].is_constant())
        head = "(" + head + ")";
      return paren(head + "/" + print(e.children()[1], 2), prec >= 2);
    }
    case Kind::Negation:
      return paren("-" + print(e.children()[0], 2), prec >= 1);
  }
  return "?";
}

}  // namespace

std::string to_string(const Expr& e) { return print(e, 0); }

std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace rankcond
