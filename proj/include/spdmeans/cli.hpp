#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spdmeans::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNonConvergence = 2;

enum class Command { scalar, pair, multi, sample, bench };
enum class OutputFormat { human, json, csv };

struct MeanRequest {
  Command command = Command::scalar;
  std::string kind;
  std::optional<std::string> input_path;
  std::optional<std::string> inline_set;  // matrix-set JSON text
  std::optional<double> x;
  std::optional<double> y;
  std::vector<double> weights;
  double tolerance = 1e-12;
  std::optional<int> max_iterations;
  std::uint64_t seed = 0;
  OutputFormat output = OutputFormat::human;
  std::optional<std::string> trace_path;

  // sample / bench
  int dimension = 3;
  double sigma = 0.3;
  int count = 100;
  double mu = 0.3;
  double log_sd = 0.5;
  int trials = 1000;
};

/// A registry kind such as "agm" or "power:-1".
struct MeanKind {
  std::string name;
  std::optional<double> parameter;
};

/// Throws InputError on unknown names or a missing/extra parameter.
MeanKind parse_kind(std::string_view text);

struct RegistryEntry {
  std::string_view name;
  bool parameterized;
  std::vector<Command> commands;
  std::string_view summary;
};

std::span<const RegistryEntry> mean_registry();
std::string registry_listing();
std::string_view command_name(Command c);

/// Dispatches a request. Writes the result to `out`, diagnostics to `err`,
/// and the convergence trace to request.trace_path when set. Returns 0 on
/// success, 2 on non-convergence (the partial trace is still written), and
/// 1 on invalid input.
int run(const MeanRequest& request, std::ostream& out, std::ostream& err);

}  // namespace spdmeans::cli
