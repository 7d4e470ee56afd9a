#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rankcond {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownSymbolError : public Error {
 public:
  explicit UnknownSymbolError(const std::string& name)
      : Error("unknown symbol '" + name + "'"), symbol_(name) {}
  const std::string& symbol() const noexcept { return symbol_; }

 private:
  std::string symbol_;
};

/// Raised when an expression cannot be evaluated at a point (division by
/// zero, sqrt of a negative number, asin outside [-1, 1]). Callers that
/// sample generic points catch this and draw a new point.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

/// No regular sample point was found within the attempt budget.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// An expression exceeded the node-count cap.
class ExpressionSwellError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column, const std::string& file = "")
      : Error((file.empty() ? "" : file + ":") + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        message_(message),
        file_(file),
        line_(line),
        column_(column) {}
  const std::string& message() const noexcept { return message_; }
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string message_;
  std::string file_;
  std::size_t line_;
  std::size_t column_;
};

/// Mismatched dimensions, symbol tables or kinds between arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace rankcond
