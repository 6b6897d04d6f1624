#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace spdmeans {

struct TraceEntry {
  int step = 0;
  double error = 0.0;
  // Scalar iterate, when the iteration is scalar.
  std::optional<double> value;
};

/// Default floor below which error ratios are treated as roundoff.
inline constexpr double kOrderNoiseFloor =
    10.0 * std::numeric_limits<double>::epsilon();

/// Floor for proxies computed through an eigendecomposition, whose roundoff
/// sits a few orders of magnitude above machine epsilon.
inline constexpr double kMatrixNoiseFloor =
    1e3 * std::numeric_limits<double>::epsilon();

/// A triple counts as asymptotic once its first step shrinks the error by at
/// least a factor of ten.
inline constexpr double kOrderContraction = 0.1;

/// Empirical order of convergence from an error sequence.
///
/// Uses q_t = log(e_{t+1}/e_t) / log(e_t/e_{t-1}) over the trailing run of
/// strictly decreasing errors above `noise_floor`, averaging at most the last
/// three triples (t-1, t, t+1) with e_t <= kOrderContraction * e_{t-1}. When no
/// triple qualifies, the last three triples are used as they are. Returns
/// nullopt unless at least four strictly decreasing positive errors exist,
/// counting the first one to fall below the floor.
std::optional<double> estimate_order(std::span<const double> errors,
                                     double noise_floor = kOrderNoiseFloor);

/// Per-iteration log of an inductive iteration.
class ConvergenceTrace {
 public:
  void record(int step, double error, std::optional<double> value = {});

  /// Marks the trace complete and computes the order estimate.
  void finish(bool converged, double noise_floor = kOrderNoiseFloor);

  const std::vector<TraceEntry>& entries() const noexcept { return entries_; }
  std::vector<double> errors() const;
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }
  const TraceEntry& back() const { return entries_.back(); }

  bool converged() const noexcept { return converged_; }
  int iterations_used() const noexcept { return iterations_used_; }
  void set_iterations_used(int n) noexcept { iterations_used_ = n; }
  std::optional<double> order_estimate() const noexcept { return order_; }

 private:
  std::vector<TraceEntry> entries_;
  std::optional<double> order_;
  bool converged_ = false;
  int iterations_used_ = 0;
};

}  // namespace spdmeans
