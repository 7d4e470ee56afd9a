#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankcond/expr.hpp"
#include "rankcond/sampling.hpp"

namespace rankcond::cli {

enum class Command { Analyze, Check, CorpusList, Explain };
enum class KindSelection { Observability, Controllability, Both };
enum class Format { Text, Json };

struct CliConfig {
  Command command = Command::Analyze;
  std::optional<std::string> system_path;
  std::optional<std::string> corpus_name;
  KindSelection kind = KindSelection::Both;
  std::uint64_t seed = 42;
  std::size_t samples = 5;
  std::optional<std::size_t> max_steps;
  std::map<std::string, Rational> params;
  Format format = Format::Text;
  std::vector<std::string> annihilator_files;
  /// Also run the consistency checks after analyze.
  bool check = false;
  Arithmetic arithmetic = Arithmetic::Rational;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitSamplingError = 2;

/// Runs one command. Reports go to `out`, diagnostics to `err`.
int run(const CliConfig& config, std::ostream& out, std::ostream& err);

/// Parses arguments (argv[0] is the program name) and runs. The
/// RANKCOND_SEED environment variable replaces the default seed; an
/// explicit --seed wins over it.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rankcond::cli
