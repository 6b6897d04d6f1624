#include "spdmeans/binary_means.hpp"

#include <cmath>
#include <sstream>

#include "spdmeans/errors.hpp"
#include "spdmeans/scalar_means.hpp"
#include "spdmeans/spd_core.hpp"

namespace spdmeans {

MatrixMeanResult ahm_iteration(const SpdMatrix& x, const SpdMatrix& y,
                               double tol, int max_iter) {
  require_same_dim(x, y);
  if (!(tol > 0.0)) throw DomainError("ahm_iteration: tolerance must be positive");
  SpdMatrix a = x;
  SpdMatrix h = y;
  ConvergenceTrace trace;
  double gap = riemannian_distance(a, h);
  trace.record(0, gap);
  int t = 0;
  while (gap > tol) {
    if (t == max_iter) {
      trace.set_iterations_used(t);
      trace.finish(false, kMatrixNoiseFloor);
      throw NonConvergenceError("ahm_iteration: no convergence within " +
                                    std::to_string(t) + " iterations",
                                std::move(trace));
    }
    SpdMatrix next_a(0.5 * (a.matrix() + h.matrix()), 0.0);
    SpdMatrix next_h =
        SpdMatrix(0.5 * (a.inverse().matrix() + h.inverse().matrix()), 0.0).inverse();
    a = std::move(next_a);
    h = std::move(next_h);
    ++t;
    gap = riemannian_distance(a, h);
    trace.record(t, gap);
  }
  trace.set_iterations_used(t);
  trace.finish(true, kMatrixNoiseFloor);
  return {SpdMatrix(0.5 * (a.matrix() + h.matrix()), 0.0), std::move(trace)};
}

SpdMatrix geometric_mean(const SpdMatrix& x, const SpdMatrix& y) {
  return weighted_geometric(x, y, 0.5);
}

SpdMatrix log_euclidean_mean(std::span<const SpdMatrix> ps,
                             const WeightVector& w) {
  require_uniform(ps);
  if (ps.size() != w.size()) throw ShapeError("log_euclidean_mean: weight count mismatch");
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ps.front().dim(), ps.front().dim());
  for (std::size_t i = 0; i < ps.size(); ++i) acc += w[i] * ps[i].log();
  return exp_symmetric(acc);
}

SpdMatrix q_power_mean(const SpdMatrix& x, const SpdMatrix& y, double p) {
  require_same_dim(x, y);
  if (!std::isfinite(p)) throw DomainError("q_power_mean: p must be finite");
  if (std::abs(p) < kPowerZeroThreshold) {
    const SpdMatrix pair[] = {x, y};
    return log_euclidean_mean(pair, WeightVector::uniform(2));
  }
  // Work with S - I = ((X^p - I) + (Y^p - I))/2 and log1p so that small |p|
  // does not lose the O(p) information to cancellation.
  auto shifted_power = [p](const SpdMatrix& m) {
    return spectral_apply(m.spectrum(),
                          [p](double l) { return std::expm1(p * std::log(l)); });
  };
  const Eigen::MatrixXd d = symmetrized(0.5 * (shifted_power(x) + shifted_power(y)));
  const Spectrum sd = symmetric_eigen(d);
  const Eigen::MatrixXd log_s = spectral_apply(sd, [](double mu) {
    if (!(mu > -1.0)) return std::nan("");
    return std::log1p(mu);
  });
  return exp_symmetric(log_s / p);
}

SpdMatrix lim_palfia_power_mean(const SpdMatrix& x, const SpdMatrix& y,
                                double p) {
  require_same_dim(x, y);
  if (!(p > 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << "lim_palfia_power_mean: p = " << p << " outside (0, 1]";
    throw DomainError(msg.str());
  }
  if (p == 1.0) return SpdMatrix(0.5 * (x.matrix() + y.matrix()), 0.0);
  // X #_{1/p} (X/2 + (X #_p Y)/2). In X-whitened coordinates the argument is
  // (I + W^p)/2 with W = X^{-1/2} Y X^{-1/2}, which shares W's eigenvectors,
  // so the 1/p power reduces to scalar power means of (1, w_i).
  const Spectrum& sx = x.spectrum();
  const Eigen::MatrixXd xs = spectral_apply(sx, [](double l) { return std::sqrt(l); });
  const Eigen::MatrixXd xis =
      spectral_apply(sx, [](double l) { return 1.0 / std::sqrt(l); });
  const Spectrum w = symmetric_eigen(symmetrized(xis * y.matrix() * xis));
  const Eigen::MatrixXd inner =
      spectral_apply(w, [p](double l) { return power_mean(p, 1.0, l); });
  return SpdMatrix(xs * inner * xs, 0.0);
}

double lim_palfia_residual(const SpdMatrix& m, const SpdMatrix& x,
                           const SpdMatrix& y, double p) {
  const Eigen::MatrixXd rhs = 0.5 * (weighted_geometric(m, x, p).matrix() +
                                     weighted_geometric(m, y, p).matrix());
  return (m.matrix() - rhs).norm() / m.matrix().norm();
}

MatrixMeanResult lim_palfia_picard(const SpdMatrix& x, const SpdMatrix& y,
                                   double p, PicardOptions options) {
  require_same_dim(x, y);
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("lim_palfia_picard: p outside (0, 1]");
  SpdMatrix m(0.5 * (x.matrix() + y.matrix()), 0.0);
  ConvergenceTrace trace;
  for (int k = 1; k <= options.max_iter; ++k) {
    SpdMatrix next(0.5 * (weighted_geometric(m, x, p).matrix() +
                          weighted_geometric(m, y, p).matrix()),
                   0.0);
    const double step = (next.matrix() - m.matrix()).norm() / next.matrix().norm();
    m = std::move(next);
    trace.record(k, step);
    if (step <= options.tol) {
      trace.set_iterations_used(k);
      trace.finish(true, kMatrixNoiseFloor);
      return {std::move(m), std::move(trace)};
    }
  }
  trace.set_iterations_used(options.max_iter);
  trace.finish(false, kMatrixNoiseFloor);
  throw NonConvergenceError("lim_palfia_picard: no convergence", std::move(trace));
}

std::vector<PowerLimitPoint> power_mean_limit_study(
    const SpdMatrix& x, const SpdMatrix& y, std::span<const double> p_grid) {
  require_same_dim(x, y);
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (!(p_grid[i] > 0.0 && p_grid[i] <= 1.0))
      throw DomainError("power_mean_limit_study: grid values must lie in (0, 1]");
    if (i > 0 && !(p_grid[i] < p_grid[i - 1]))
      throw DomainError("power_mean_limit_study: grid must be strictly decreasing");
  }
  const SpdMatrix g = ahm_iteration(x, y).value;
  std::vector<PowerLimitPoint> out;
  out.reserve(p_grid.size());
  for (double p : p_grid)
    out.push_back({p, riemannian_distance(lim_palfia_power_mean(x, y, p), g)});
  return out;
}

}  // namespace spdmeans
