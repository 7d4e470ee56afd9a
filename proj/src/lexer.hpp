#pragma once

// Tokenizer shared by the expression parser and the system-file parser.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rankcond/errors.hpp"
#include "rankcond/expr.hpp"

namespace rankcond::detail {

enum class Tok { Integer, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, LBracket, RBracket, Comma, Equals, Newline, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

/// Splits `text` into tokens. Newlines are emitted only when `newlines` is
/// set and no bracket or parenthesis is open, so a bracketed vector may span
/// several lines. `#` starts a comment that runs to the end of the line.
std::vector<Token> tokenize(std::string_view text, bool newlines);

/// Recursive-descent parser for the expression grammar over a token stream.
class ExprParser {
 public:
  ExprParser(const std::vector<Token>& tokens, std::size_t pos) : toks_(tokens), pos_(pos) {}

  Expr parse_expression();
  std::size_t position() const { return pos_; }
  const Token& peek(std::size_t ahead = 0) const;
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  [[noreturn]] void fail(const std::string& message, const Token& at) const;
  const Token& expect(Tok kind, const char* what);

 private:
  Expr parse_term();
  Expr parse_factor();
  Expr parse_atom();
  long parse_exponent();

  const std::vector<Token>& toks_;
  std::size_t pos_;
};

std::string describe(const Token& t);

}  // namespace rankcond::detail
