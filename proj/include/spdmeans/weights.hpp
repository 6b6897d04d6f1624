#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spdmeans {

/// Nonnegative weights summing to one.
class WeightVector {
 public:
  /// Throws DomainError on a negative entry or a sum off by more than 1e-12.
  explicit WeightVector(std::vector<double> weights);

  static WeightVector uniform(std::size_t n);
  /// (1 - t, t)
  static WeightVector pair(double t);

  std::span<const double> values() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::vector<double> weights_;
};

}  // namespace spdmeans
