#include "lexer.hpp"

#include <cctype>

namespace rankcond::detail {

std::vector<Token> tokenize(std::string_view text, bool newlines) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  int depth = 0;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string s, std::size_t c) { out.push_back({k, std::move(s), line, c}); };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      if (newlines && depth == 0 && !out.empty() && out.back().kind != Tok::Newline) push(Tok::Newline, "\\n", col);
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    const std::size_t start_col = col;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      push(Tok::Integer, std::string(text.substr(i, j - i)), start_col);
      col += j - i;
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      push(Tok::Ident, std::string(text.substr(i, j - i)), start_col);
      col += j - i;
      i = j;
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; ++depth; break;
      case ')': k = Tok::RParen; --depth; break;
      case '[': k = Tok::LBracket; ++depth; break;
      case ']': k = Tok::RBracket; --depth; break;
      case ',': k = Tok::Comma; break;
      case '=': k = Tok::Equals; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, start_col);
    }
    if (depth < 0) depth = 0;
    push(k, std::string(1, c), start_col);
    ++i;
    ++col;
  }
  if (newlines && !out.empty() && out.back().kind != Tok::Newline) out.push_back({Tok::Newline, "\\n", line, col});
  out.push_back({Tok::End, "", line, col});
  return out;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Newline: return "end of line";
    default: return "'" + t.text + "'";
  }
}

const Token& ExprParser::peek(std::size_t ahead) const {
  const std::size_t i = pos_ + ahead;
  return i < toks_.size() ? toks_[i] : toks_.back();
}

void ExprParser::fail(const std::string& message, const Token& at) const {
  throw ParseError(message + " (found " + describe(at) + ")", at.line, at.column);
}

const Token& ExprParser::expect(Tok kind, const char* what) {
  if (peek().kind != kind) fail(std::string("expected ") + what, peek());
  return next();
}

Expr ExprParser::parse_expression() {
  std::vector<Expr> terms{parse_term()};
  while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
    const bool minus = next().kind == Tok::Minus;
    Expr t = parse_term();
    terms.push_back(minus ? raw::negation(t) : t);
  }
  return terms.size() == 1 ? terms.front() : raw::sum(std::move(terms));
}

Expr ExprParser::parse_term() {
  Expr acc = parse_factor();
  std::vector<Expr> factors{acc};
  while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
    if (next().kind == Tok::Star) {
      factors.push_back(parse_factor());
    } else {
      Expr num = factors.size() == 1 ? factors.front() : raw::product(factors);
      factors.assign({raw::quotient(num, parse_factor())});
    }
  }
  return factors.size() == 1 ? factors.front() : raw::product(std::move(factors));
}

Expr ExprParser::parse_factor() {
  const bool negate = peek().kind == Tok::Minus;
  if (negate) next();
  Expr a = parse_atom();
  if (peek().kind == Tok::Caret) {
    next();
    a = raw::power(a, parse_exponent());
  }
  return negate ? raw::negation(a) : a;
}

long ExprParser::parse_exponent() {
  bool neg = false;
  if (peek().kind == Tok::Minus) {
    next();
    neg = true;
  }
  const Token& t = expect(Tok::Integer, "integer exponent");
  if (t.text.size() > 9) fail("exponent too large", t);
  const long v = std::stol(t.text);
  return neg ? -v : v;
}

Expr ExprParser::parse_atom() {
  const Token& t = peek();
  switch (t.kind) {
    case Tok::Integer: {
      next();
      Rational value(t.text, 10);
      // rational := integer '/' positive-integer binds tighter than division.
      if (peek().kind == Tok::Slash && peek(1).kind == Tok::Integer) {
        Rational den(peek(1).text, 10);
        if (den > 0) {
          next();
          next();
          value /= den;
          value.canonicalize();
        }
      }
      return Expr(value);
    }
    case Tok::Ident: {
      next();
      if (auto f = function_from_name(t.text)) {
        expect(Tok::LParen, "'(' after function name");
        Expr arg = parse_expression();
        expect(Tok::RParen, "')'");
        return raw::function(*f, arg);
      }
      return Expr::symbol(t.text);
    }
    case Tok::LParen: {
      next();
      Expr e = parse_expression();
      expect(Tok::RParen, "')'");
      return e;
    }
    default:
      fail("expected a number, identifier, function or '('", t);
  }
}

}  // namespace rankcond::detail

namespace rankcond {

Expr parse_expr(std::string_view text) {
  const auto toks = detail::tokenize(text, false);
  detail::ExprParser p(toks, 0);
  Expr e = p.parse_expression();
  if (p.peek().kind != detail::Tok::End) p.fail("unexpected trailing input", p.peek());
  return e;
}

Rational parse_rational(std::string_view text) {
  const Expr e = simplify(parse_expr(text));
  if (!e.is_constant()) throw ParseError("expected a rational number", 1, 1);
  return e.scalar();
}

}  // namespace rankcond
