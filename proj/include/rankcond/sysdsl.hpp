#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankcond/algorithms.hpp"
#include "rankcond/expr.hpp"

namespace rankcond {

struct NamedVector {
  std::string name;
  std::vector<Expr> components;
};

struct NamedExpr {
  std::string name;
  Expr value;
};

struct ExpectedTrace {
  AnalysisKind kind = AnalysisKind::Observability;
  std::vector<std::size_t> dims;
};

/// Annihilator fixture. `expectation` is "holds" (default), "structural"
/// (holds and marks a structural constraint) or "fails".
struct AnnihilatorDecl {
  std::string name;
  AnalysisKind kind = AnalysisKind::Observability;
  std::string expectation = "holds";
  std::vector<Expr> components;
};

/// A parsed system file. Expressions are kept exactly as written.
struct SystemDocument {
  std::string name = "system";
  std::vector<std::string> states;
  std::string time = "t";
  std::vector<Parameter> params;
  /// Absent means the zero drift.
  std::optional<std::vector<Expr>> drift;
  std::vector<NamedVector> inputs;
  std::vector<NamedExpr> outputs;
  std::vector<Expr> avoid;
  std::vector<ExpectedTrace> expects;
  std::vector<AnnihilatorDecl> annihilators;

  std::optional<std::vector<std::size_t>> expected_dims(AnalysisKind kind) const;
};

bool operator==(const SystemDocument& a, const SystemDocument& b);

/// Parses and validates a system file. Throws ParseError with line and
/// column for grammar errors, unknown symbols, arity mismatches and
/// duplicate names.
SystemDocument parse_system(std::string_view text);

/// Parses a file of `annihilator` statements over the symbols of `base`.
std::vector<AnnihilatorDecl> parse_annihilators(std::string_view text, const SystemDocument& base);

/// Reads a whole file; throws Error if it cannot be read.
std::string read_text_file(const std::string& path);

/// Reads and parses a file; throws Error if it cannot be read.
SystemDocument load_system_file(const std::string& path);

/// Text that parse_system reads back to an equal document.
std::string serialize(const SystemDocument& doc);

/// Builds the SystemSpec. Bound parameters (including `overrides`) are
/// substituted; unbound ones stay symbolic and are sampled. Throws
/// InvalidArgument for overrides of undeclared parameters.
SystemSpec lower(const SystemDocument& doc, const std::map<std::string, Rational>& overrides = {});

/// Annihilator fixtures with bound parameters substituted.
std::vector<AnnihilatorFixture> lower_annihilators(const SystemDocument& doc,
                                                   const std::map<std::string, Rational>& overrides = {});

}  // namespace rankcond
