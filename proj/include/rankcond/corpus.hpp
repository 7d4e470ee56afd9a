#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankcond/sysdsl.hpp"

namespace rankcond {

/// A built-in system with its expected dimension traces and annihilator
/// fixtures.
struct CorpusEntry {
  std::string name;
  SystemDocument document;
  std::optional<std::vector<std::size_t>> observability_dims;
  std::optional<std::vector<std::size_t>> controllability_dims;
  std::vector<AnnihilatorDecl> annihilators;
  /// What the entry models and what the expected trace shows.
  std::string note;
};

/// All entries, in a fixed order: the generated polynomial families first,
/// then the shipped system files by name.
const std::vector<CorpusEntry>& corpus_entries();

/// Throws InvalidArgument for unknown names.
const CorpusEntry& corpus_entry(std::string_view name);

/// Driftless system with f1 = x and output sum_i x_i t^i.
std::string poly_observability_text(std::size_t n);
/// f0 = (t, t^2, ..., t^n), f1 = x.
std::string poly_controllability_text(std::size_t n);

}  // namespace rankcond
