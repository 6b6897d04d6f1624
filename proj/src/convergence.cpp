#include "spdmeans/convergence.hpp"

#include <algorithm>
#include <cmath>

namespace spdmeans {

std::optional<double> estimate_order(std::span<const double> errors,
                                     double noise_floor) {
  // Last entry above the noise floor.
  std::ptrdiff_t end = static_cast<std::ptrdiff_t>(errors.size()) - 1;
  while (end >= 0 && !(errors[end] > noise_floor)) --end;
  if (end < 2) return std::nullopt;

  std::ptrdiff_t start = end;
  while (start > 0 && errors[start - 1] > errors[start]) --start;
  // The first positive error to drop below the floor still counts as a
  // decreasing iterate, though it never enters a ratio.
  std::ptrdiff_t count = end - start + 1;
  const auto size = static_cast<std::ptrdiff_t>(errors.size());
  if (end + 1 < size && errors[end + 1] > 0.0 && errors[end + 1] < errors[end]) ++count;
  if (count < 4 || end - start < 2) return std::nullopt;

  auto q = [&](std::ptrdiff_t k) {
    return std::log(errors[k + 1] / errors[k]) / std::log(errors[k] / errors[k - 1]);
  };
  // Prefer triples whose first step already shrinks the error tenfold: before that the
  // ratio of logs is dominated by pre-asymptotic terms. Sequences that never
  // contract that fast (linear or slower) fall back to every triple.
  for (const bool filter : {true, false}) {
    double sum = 0.0;
    int used = 0;
    for (std::ptrdiff_t k = end - 1; k > start && used < 3; --k) {
      if (filter && errors[k] > kOrderContraction * errors[k - 1]) continue;
      sum += q(k);
      ++used;
    }
    if (used > 0) return sum / used;
  }
  return std::nullopt;
}

void ConvergenceTrace::record(int step, double error,
                              std::optional<double> value) {
  entries_.push_back({step, error, value});
}

void ConvergenceTrace::finish(bool converged, double noise_floor) {
  converged_ = converged;
  const auto errs = errors();
  order_ = estimate_order(errs, noise_floor);
}

std::vector<double> ConvergenceTrace::errors() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  std::ranges::transform(entries_, std::back_inserter(out),
                         [](const TraceEntry& e) { return e.error; });
  return out;
}

}  // namespace spdmeans
