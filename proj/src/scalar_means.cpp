#include "spdmeans/scalar_means.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "spdmeans/errors.hpp"

namespace spdmeans {

namespace {

void require_positive(double x, double y, const char* op) {
  if (!(x > 0.0) || !(y > 0.0)) {
    std::ostringstream msg;
    msg << op << ": operands must be positive, got (" << x << ", " << y << ")";
    throw DomainError(msg.str());
  }
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

// ---------------------------------------------------------------------------
// Weights

WeightVector::WeightVector(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw DomainError("weights: empty weight vector");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw DomainError("weights: entries must be finite and nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights: sum is " << sum << ", expected 1";
    throw DomainError(msg.str());
  }
}

WeightVector WeightVector::uniform(std::size_t n) {
  if (n == 0) throw DomainError("weights: empty weight vector");
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

WeightVector WeightVector::pair(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("weights: t must be in [0, 1]");
  return WeightVector({1.0 - t, t});
}

// ---------------------------------------------------------------------------
// Closed-form means

double pythagorean_mean(PythagoreanKind kind, double x, double y) {
  require_positive(x, y, "pythagorean_mean");
  switch (kind) {
    case PythagoreanKind::arithmetic:
      return 0.5 * (x + y);
    case PythagoreanKind::geometric:
      return std::sqrt(x) * std::sqrt(y);
    case PythagoreanKind::harmonic:
      return 2.0 * x * y / (x + y);
  }
  throw DomainError("pythagorean_mean: unknown kind");
}

double power_mean(double p, double x, double y) {
  require_positive(x, y, "power_mean");
  if (std::abs(p) < kPowerZeroThreshold) return std::sqrt(x) * std::sqrt(y);
  // Factor out max(x, y) so large |p| does not overflow, and carry
  // s - 1 through expm1/log1p so small |p| keeps its O(p) information.
  const double m = std::max(x, y);
  const double s_minus_one =
      0.5 * (std::expm1(p * std::log(x / m)) + std::expm1(p * std::log(y / m)));
  return m * std::exp(std::log1p(s_minus_one) / p);
}

// ---------------------------------------------------------------------------
// Quasi-arithmetic generators

QuasiArithmeticGenerator::QuasiArithmeticGenerator(std::string label,
                                                   Map forward, Map inverse,
                                                   Map derivative,
                                                   Interval domain,
                                                   bool increasing)
    : label_(std::move(label)),
      forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      derivative_(std::move(derivative)),
      domain_(domain),
      increasing_(increasing) {
  if (!(domain_.lower < domain_.upper))
    throw DomainError("generator " + label_ + ": empty domain");
}

double QuasiArithmeticGenerator::forward(double u) const {
  if (!domain_.contains(u)) {
    std::ostringstream msg;
    msg << "generator " << label_ << ": point " << u << " outside domain ("
        << domain_.lower << ", " << domain_.upper << ")";
    throw DomainError(msg.str());
  }
  return forward_(u);
}

double QuasiArithmeticGenerator::inverse(double v) const { return inverse_(v); }

double QuasiArithmeticGenerator::derivative(double u) const {
  if (!domain_.contains(u))
    throw DomainError("generator " + label_ + ": derivative outside domain");
  return derivative_(u);
}

void QuasiArithmeticGenerator::validate(std::span<const double> sample_points) const {
  std::vector<double> pts(sample_points.begin(), sample_points.end());
  std::ranges::sort(pts);
  double prev = 0.0;
  bool first = true;
  for (double u : pts) {
    const double v = forward(u);
    const double back = inverse(v);
    if (std::abs(back - u) > 1e-12 * std::max(1.0, std::abs(u))) {
      std::ostringstream msg;
      msg << "generator " << label_ << ": inverse(forward(" << u << ")) = " << back;
      throw DomainError(msg.str());
    }
    if (!first && (increasing_ ? !(v > prev) : !(v < prev)))
      throw DomainError("generator " + label_ + ": not strictly monotone");
    first = false;
    prev = v;

    const double h = 1e-5 * std::max(1.0, std::abs(u));
    if (domain_.contains(u - h) && domain_.contains(u + h)) {
      const double fd = (forward_(u + h) - forward_(u - h)) / (2.0 * h);
      const double d = derivative_(u);
      if (std::abs(fd - d) > 1e-6 * std::max(std::abs(d), 1e-300))
        throw DomainError("generator " + label_ + ": derivative mismatch at " +
                          std::to_string(u));
    }
  }
}

QuasiArithmeticGenerator identity_generator() {
  auto id = [](double u) { return u; };
  return {"identity", id, id, [](double) { return 1.0; }, Interval{}, true};
}

QuasiArithmeticGenerator log_generator() {
  return {"log",
          [](double u) { return std::log(u); },
          [](double v) { return std::exp(v); },
          [](double u) { return 1.0 / u; },
          Interval{0.0, std::numeric_limits<double>::infinity()},
          true};
}

QuasiArithmeticGenerator power_generator(double p) {
  if (std::abs(p) < kPowerZeroThreshold) {
    return {"power:0",
            [](double u) { return std::log(u); },
            [](double v) { return std::exp(v); },
            [](double u) { return 1.0 / u; },
            Interval{0.0, std::numeric_limits<double>::infinity()},
            true};
  }
  std::ostringstream label;
  label << "power:" << p;
  return {label.str(),
          [p](double u) { return std::expm1(p * std::log(u)) / p; },
          [p](double v) { return std::exp(std::log1p(v * p) / p); },
          [p](double u) { return std::pow(u, p - 1.0); },
          Interval{0.0, std::numeric_limits<double>::infinity()},
          true};
}

double quasi_arithmetic_mean(const QuasiArithmeticGenerator& gen,
                             std::span<const double> points,
                             const WeightVector& weights) {
  if (points.size() != weights.size())
    throw ShapeError("quasi_arithmetic_mean: points and weights differ in length");
  double acc = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    acc += weights[i] * gen.forward(points[i]);
  const double mean = gen.inverse(acc);
  // Clamp roundoff so in-betweenness holds exactly.
  const auto [lo, hi] = std::ranges::minmax(points);
  return std::clamp(mean, lo, hi);
}

// ---------------------------------------------------------------------------
// Gradient maps

GradientMap identity_gradient() {
  auto id = [](const Eigen::VectorXd& v) { return v; };
  return {"identity", id, id, [](const Eigen::VectorXd&) { return true; }};
}

GradientMap log_gradient() {
  return {"log",
          [](const Eigen::VectorXd& v) -> Eigen::VectorXd { return v.array().log(); },
          [](const Eigen::VectorXd& v) -> Eigen::VectorXd { return v.array().exp(); },
          [](const Eigen::VectorXd& v) { return (v.array() > 0.0).all(); }};
}

GradientMap negative_reciprocal_gradient() {
  return {"negative_reciprocal",
          [](const Eigen::VectorXd& v) -> Eigen::VectorXd { return -v.array().inverse(); },
          [](const Eigen::VectorXd& v) -> Eigen::VectorXd { return -v.array().inverse(); },
          [](const Eigen::VectorXd& v) { return (v.array() > 0.0).all(); }};
}

Eigen::VectorXd quasi_arithmetic_center(const GradientMap& gradient,
                                        std::span<const Eigen::VectorXd> points,
                                        const WeightVector& weights) {
  if (points.empty() || points.size() != weights.size())
    throw ShapeError("quasi_arithmetic_center: points and weights differ in length");
  const auto dim = points.front().size();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim)
      throw ShapeError("quasi_arithmetic_center: points differ in dimension");
    if (!gradient.in_domain(points[i]))
      throw DomainError("quasi_arithmetic_center: point " + std::to_string(i) +
                        " outside the domain of " + gradient.label);
    acc += weights[i] * gradient.forward(points[i]);
  }
  return gradient.inverse(acc);
}

// ---------------------------------------------------------------------------
// Double sequences

DoubleSequenceSpec::DoubleSequenceSpec(BinaryMean mean_one, BinaryMean mean_two,
                                       double tolerance, int max_iterations)
    : mean_one_(std::move(mean_one)),
      mean_two_(std::move(mean_two)),
      tolerance_(tolerance),
      max_iterations_(max_iterations) {
  if (!(tolerance_ > 0.0)) throw DomainError("double_sequence: tolerance must be positive");
  if (max_iterations_ < 1) throw DomainError("double_sequence: max_iterations must be >= 1");

  static constexpr std::array<double, 7> grid{1e-3, 0.1, 0.5, 1.0, 2.0, 7.5, 1e3};
  for (double x : grid) {
    for (double y : grid) {
      const double lo = std::min(x, y) * (1.0 - 1e-14);
      const double hi = std::max(x, y) * (1.0 + 1e-14);
      const double m1 = mean_one_(x, y);
      const double m2 = mean_two_(x, y);
      if (!(m1 >= lo && m1 <= hi) || !(m2 >= lo && m2 <= hi)) {
        std::ostringstream msg;
        msg << "double_sequence: mean violates in-betweenness at (" << x << ", "
            << y << ")";
        throw DomainError(msg.str());
      }
    }
  }
}

ScalarMeanResult double_sequence(const DoubleSequenceSpec& spec, double x,
                                 double y) {
  require_positive(x, y, "double_sequence");
  ConvergenceTrace trace;
  double a = x;
  double b = y;
  double gap = relative_gap(a, b);
  trace.record(0, gap, 0.5 * (a + b));
  int t = 0;
  while (gap > spec.tolerance()) {
    if (t == spec.max_iterations()) {
      trace.set_iterations_used(t);
      trace.finish(false);
      throw NonConvergenceError("double_sequence: no convergence within " +
                                    std::to_string(t) + " iterations",
                                std::move(trace));
    }
    const double next_a = spec.mean_one()(a, b);
    const double next_b = spec.mean_two()(a, b);
    a = next_a;
    b = next_b;
    ++t;
    gap = relative_gap(a, b);
    trace.record(t, gap, 0.5 * (a + b));
  }
  trace.set_iterations_used(t);
  trace.finish(true);
  return {0.5 * (a + b), std::move(trace)};
}

ScalarMeanResult agm(double x, double y) {
  static const DoubleSequenceSpec spec(
      [](double a, double b) { return 0.5 * (a + b); },
      [](double a, double b) { return std::sqrt(a) * std::sqrt(b); });
  return double_sequence(spec, x, y);
}

ScalarMeanResult ahm(double x, double y) {
  static const DoubleSequenceSpec spec(
      [](double a, double b) { return 0.5 * (a + b); },
      [](double a, double b) { return 2.0 * a * b / (a + b); });
  return double_sequence(spec, x, y);
}

double elliptic_k(double u) {
  if (!(std::abs(u) < 1.0)) throw DomainError("elliptic_k: requires |u| < 1");
  const double k2 = u * u;
  auto integrand = [k2](double theta) {
    const double s = std::sin(theta);
    return 1.0 / std::sqrt(1.0 - k2 * s * s);
  };
  // Double-exponential quadrature copes with the logarithmic peak at pi/2 as
  // |u| -> 1, where Gauss-Kronrod error estimates stall at roundoff.
  // integrate() may extend its abscissa tables, so each thread keeps its own.
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  double error = 0.0;
  const double value = rule.integrate(integrand, 0.0, std::numbers::pi / 2, 1e-15, &error);
  if (!std::isfinite(value) || error > 1e-13)
    throw NumericError("elliptic_k: quadrature did not reach tolerance");
  return value;
}

// ---------------------------------------------------------------------------
// Complex AHM

namespace {

double principal_argument(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(theta, two_pi);  // in [-pi, pi]
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

}  // namespace

ComplexPolar::ComplexPolar(double modulus, double argument)
    : modulus_(modulus), argument_(principal_argument(argument)) {
  if (!(modulus_ > 0.0) || !std::isfinite(modulus_))
    throw DomainError("ComplexPolar: modulus must be positive");
  if (!std::isfinite(argument)) throw DomainError("ComplexPolar: argument must be finite");
}

ComplexPolar ComplexPolar::from_complex(std::complex<double> z) {
  return ComplexPolar(std::abs(z), std::arg(z));
}

ComplexMeanResult complex_ahm(const ComplexPolar& z1, const ComplexPolar& z2,
                              double tolerance, int max_iterations) {
  if (!(std::abs(z1.argument() - z2.argument()) < std::numbers::pi))
    throw DomainError("complex_ahm: arguments must differ by less than pi");

  using C = std::complex<double>;
  C a = z1.to_complex();
  C h = z2.to_complex();
  auto gap = [](C p, C q) {
    const double scale = std::max(std::abs(p), std::abs(q));
    return std::abs(p - q) / scale;
  };
  ConvergenceTrace trace;
  double e = gap(a, h);
  trace.record(0, e);
  int t = 0;
  while (e > tolerance) {
    if (t == max_iterations) {
      trace.set_iterations_used(t);
      trace.finish(false);
      throw NonConvergenceError("complex_ahm: no convergence", std::move(trace));
    }
    const C next_a = 0.5 * (a + h);
    const C next_h = 2.0 * a * h / (a + h);
    a = next_a;
    h = next_h;
    ++t;
    e = gap(a, h);
    trace.record(t, e);
  }
  trace.set_iterations_used(t);
  trace.finish(true);
  return {ComplexPolar::from_complex(0.5 * (a + h)), std::move(trace)};
}

}  // namespace spdmeans
