#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spdmeans/convergence.hpp"
#include "spdmeans/weights.hpp"

namespace spdmeans {

enum class PythagoreanKind { arithmetic, geometric, harmonic };

double pythagorean_mean(PythagoreanKind kind, double x, double y);

/// Power mean ((x^p + y^p)/2)^(1/p); the geometric branch is used for
/// |p| < kPowerZeroThreshold.
double power_mean(double p, double x, double y);

inline constexpr double kPowerZeroThreshold = 1e-8;

/// Open interval (lower, upper).
struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double u) const noexcept { return u > lower && u < upper; }
};

/// A strictly monotone differentiable generator f with its inverse, valid on
/// an explicit open domain. Evaluation outside the domain throws.
class QuasiArithmeticGenerator {
 public:
  using Map = std::function<double(double)>;

  QuasiArithmeticGenerator(std::string label, Map forward, Map inverse,
                           Map derivative, Interval domain, bool increasing);

  double forward(double u) const;
  double inverse(double v) const;
  double derivative(double u) const;

  const Interval& domain() const noexcept { return domain_; }
  const std::string& label() const noexcept { return label_; }
  bool increasing() const noexcept { return increasing_; }

  /// Samples the domain and checks the inverse, monotonicity, and derivative
  /// contracts. Throws DomainError naming the first violated one.
  void validate(std::span<const double> sample_points) const;

 private:
  std::string label_;
  Map forward_;
  Map inverse_;
  Map derivative_;
  Interval domain_;
  bool increasing_;
};

QuasiArithmeticGenerator identity_generator();
QuasiArithmeticGenerator log_generator();
/// f_p(u) = (u^p - 1)/p, with the log branch at p = 0. Domain (0, inf).
QuasiArithmeticGenerator power_generator(double p);

/// f^{-1}(sum_i w_i f(x_i)).
double quasi_arithmetic_mean(const QuasiArithmeticGenerator& gen,
                             std::span<const double> points,
                             const WeightVector& weights);

/// An invertible gradient map of a Legendre-type convex function.
struct GradientMap {
  std::string label;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> forward;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> inverse;
  std::function<bool(const Eigen::VectorXd&)> in_domain;
};

GradientMap identity_gradient();
GradientMap log_gradient();
/// Componentwise u -> -1/u, whose center is the componentwise harmonic mean.
GradientMap negative_reciprocal_gradient();

/// (grad F)^{-1}(sum_i w_i grad F(x_i)).
Eigen::VectorXd quasi_arithmetic_center(const GradientMap& gradient,
                                        std::span<const Eigen::VectorXd> points,
                                        const WeightVector& weights);

using BinaryMean = std::function<double(double, double)>;

/// The (M1, M2) pair driving a double sequence.
class DoubleSequenceSpec {
 public:
  static constexpr double kDefaultTolerance = 1e-13;
  static constexpr int kDefaultMaxIterations = 64;

  /// Checks in-betweenness of both means on a fixed sample grid.
  DoubleSequenceSpec(BinaryMean mean_one, BinaryMean mean_two,
                     double tolerance = kDefaultTolerance,
                     int max_iterations = kDefaultMaxIterations);

  const BinaryMean& mean_one() const noexcept { return mean_one_; }
  const BinaryMean& mean_two() const noexcept { return mean_two_; }
  double tolerance() const noexcept { return tolerance_; }
  int max_iterations() const noexcept { return max_iterations_; }

 private:
  BinaryMean mean_one_;
  BinaryMean mean_two_;
  double tolerance_;
  int max_iterations_;
};

struct ScalarMeanResult {
  double value = 0.0;
  ConvergenceTrace trace;
};

/// Iterates a <- M1(a, b), b <- M2(a, b) from (x, y) until the relative gap
/// |a - b| / max(|a|, |b|) reaches the tolerance.
ScalarMeanResult double_sequence(const DoubleSequenceSpec& spec, double x,
                                 double y);

ScalarMeanResult agm(double x, double y);
ScalarMeanResult ahm(double x, double y);

/// Complete elliptic integral of the first kind by adaptive quadrature,
/// K(u) = int_0^{pi/2} dtheta / sqrt(1 - u^2 sin^2 theta).
double elliptic_k(double u);

/// A nonzero complex number r e^{i theta} with theta normalized to (-pi, pi].
class ComplexPolar {
 public:
  ComplexPolar(double modulus, double argument);

  static ComplexPolar from_complex(std::complex<double> z);

  double modulus() const noexcept { return modulus_; }
  double argument() const noexcept { return argument_; }
  std::complex<double> to_complex() const { return std::polar(modulus_, argument_); }

 private:
  double modulus_;
  double argument_;
};

struct ComplexMeanResult {
  ComplexPolar value;
  ConvergenceTrace trace;
};

/// Complex arithmetic-harmonic double sequence. Requires principal arguments
/// with |theta1 - theta2| < pi.
ComplexMeanResult complex_ahm(const ComplexPolar& z1, const ComplexPolar& z2,
                              double tolerance = DoubleSequenceSpec::kDefaultTolerance,
                              int max_iterations = DoubleSequenceSpec::kDefaultMaxIterations);

}  // namespace spdmeans
