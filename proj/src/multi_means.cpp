#include "spdmeans/multi_means.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/QR>

#include "spdmeans/errors.hpp"
#include "spdmeans/spd_core.hpp"

namespace spdmeans {

MatrixTuple::MatrixTuple(std::vector<SpdMatrix> matrices)
    : matrices_(std::move(matrices)) {
  require_uniform(matrices_);
}

namespace {

// t == 1 lands exactly on the target.
SpdMatrix step_toward(const SpdMatrix& from, const SpdMatrix& to, double t) {
  if (t >= 1.0) return to;
  return weighted_geometric(from, to, t);
}

// sum_i w_i log(G^{-1/2} P_i G^{-1/2})
Eigen::MatrixXd karcher_gradient(const SpdMatrix& g, std::span<const SpdMatrix> ps,
                                 std::span<const double> w) {
  const Eigen::MatrixXd gis =
      spectral_apply(g.spectrum(), [](double l) { return 1.0 / std::sqrt(l); });
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(g.dim(), g.dim());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (w[i] == 0.0) continue;
    const Spectrum s = symmetric_eigen(symmetrized(gis * ps[i].matrix() * gis));
    acc += w[i] * spectral_apply(s, [](double l) {
      if (!(l > 0.0)) return std::nan("");
      return std::log(l);
    });
  }
  return acc;
}

struct KarcherRun {
  SpdMatrix value;
  ConvergenceTrace trace;
  bool converged;
};

// Fixed-point sharpening; returns the last iterate without throwing.
KarcherRun karcher_iterate(const SpdMatrix& g0, std::span<const SpdMatrix> ps,
                           std::span<const double> w, double tol, int max_iter) {
  SpdMatrix g = g0;
  ConvergenceTrace trace;
  for (int k = 0;; ++k) {
    const Eigen::MatrixXd grad = karcher_gradient(g, ps, w);
    const double residual = grad.norm();
    trace.record(k, residual);
    if (residual <= tol) {
      trace.set_iterations_used(k);
      trace.finish(true, kMatrixNoiseFloor);
      return {std::move(g), std::move(trace), true};
    }
    if (k == max_iter) {
      trace.set_iterations_used(k);
      trace.finish(false, kMatrixNoiseFloor);
      return {std::move(g), std::move(trace), false};
    }
    const Eigen::MatrixXd gs =
        spectral_apply(g.spectrum(), [](double l) { return std::sqrt(l); });
    g = SpdMatrix(gs * exp_symmetric(grad).matrix() * gs, 0.0);
  }
}

}  // namespace

double weighted_karcher_residual(const SpdMatrix& g, const MatrixTuple& ps,
                                 const WeightVector& w) {
  require_same_dim(g, ps[0]);
  if (w.size() != ps.size()) throw ShapeError("karcher_residual: weight count mismatch");
  return karcher_gradient(g, ps.view(), w.values()).norm();
}

double karcher_residual(const SpdMatrix& g, const MatrixTuple& ps) {
  require_same_dim(g, ps[0]);
  const std::vector<double> ones(ps.size(), 1.0);
  return karcher_gradient(g, ps.view(), ones).norm() / static_cast<double>(ps.size());
}

MatrixMeanResult holbrook_inductive_mean(const MatrixTuple& ps, int steps) {
  const auto n = static_cast<int>(ps.size());
  ConvergenceTrace trace;
  if (n == 1) {
    trace.record(0, 0.0);
    trace.finish(true, kMatrixNoiseFloor);
    return {ps[0], std::move(trace)};
  }
  if (steps < n) {
    std::ostringstream msg;
    msg << "holbrook_inductive_mean: steps (" << steps << ") must be >= n (" << n << ")";
    throw DomainError(msg.str());
  }
  SpdMatrix m = ps[0];
  for (int t = 1; t <= steps; ++t) {
    m = weighted_geometric(m, ps[t % n], 1.0 / (t + 1.0));
    if (t % n == 0) trace.record(t, karcher_residual(m, ps));
  }
  trace.set_iterations_used(steps);
  trace.finish(true, kMatrixNoiseFloor);
  return {std::move(m), std::move(trace)};
}

MatrixMeanResult karcher_refine(const SpdMatrix& g0, const MatrixTuple& ps,
                                const WeightVector& w, double tol, int max_iter) {
  require_same_dim(g0, ps[0]);
  if (w.size() != ps.size()) throw ShapeError("karcher_refine: weight count mismatch");
  if (!(tol > 0.0)) throw DomainError("karcher_refine: tolerance must be positive");
  auto run = karcher_iterate(g0, ps.view(), w.values(), tol, max_iter);
  if (!run.converged) {
    throw NonConvergenceError("karcher_refine: residual above tolerance after " +
                                  std::to_string(max_iter) + " iterations",
                              std::move(run.trace));
  }
  return {std::move(run.value), std::move(run.trace)};
}

double covering_radius(const SpdMatrix& c, const MatrixTuple& ps) {
  double r = 0.0;
  for (const auto& p : ps) r = std::max(r, riemannian_distance(c, p));
  return r;
}

MatrixMeanResult riemannian_circumcenter(const MatrixTuple& ps, int steps) {
  if (steps < 1) throw DomainError("riemannian_circumcenter: steps must be >= 1");
  SpdMatrix c = ps[0];
  ConvergenceTrace trace;
  if (ps.size() == 1) {
    trace.record(1, 0.0);
    trace.finish(true, kMatrixNoiseFloor);
    return {std::move(c), std::move(trace)};
  }
  for (int t = 1; t <= steps; ++t) {
    std::size_t far = 0;
    double radius = -1.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const double d = riemannian_distance(c, ps[i]);
      if (d > radius) {
        radius = d;
        far = i;
      }
    }
    trace.record(t, radius);
    c = weighted_geometric(c, ps[far], 1.0 / (t + 1.0));
  }
  trace.record(steps + 1, covering_radius(c, ps));
  trace.set_iterations_used(steps);
  trace.finish(true, kMatrixNoiseFloor);
  return {std::move(c), std::move(trace)};
}

namespace {

struct ActiveSolve {
  SpdMatrix center;
  std::vector<double> weights;  // on the active set
  double defect;                // max |d_i^2 - d_last^2|
};

// Karcher weights on `active` that make the center equidistant from every
// active point. Newton on the free weights with a forward-difference Jacobian.
ActiveSolve equalize_active(const SpdMatrix& warm, const MatrixTuple& ps,
                            const std::vector<std::size_t>& active, double tol,
                            ConvergenceTrace& trace, int& step) {
  const std::size_t k = active.size();
  std::vector<SpdMatrix> pts;
  for (auto i : active) pts.push_back(ps[i]);

  auto center_for = [&](const std::vector<double>& w, const SpdMatrix& start) {
    return karcher_iterate(start, pts, w, 1e-14, 200).value;
  };
  auto defects = [&](const SpdMatrix& c) {
    Eigen::VectorXd f(k - 1);
    const double last = std::pow(riemannian_distance(c, pts[k - 1]), 2);
    for (std::size_t j = 0; j + 1 < k; ++j)
      f(j) = std::pow(riemannian_distance(c, pts[j]), 2) - last;
    return f;
  };
  auto full_weights = [k](const Eigen::VectorXd& v) {
    std::vector<double> w(k);
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
      w[j] = v(j);
      sum += v(j);
    }
    w[k - 1] = 1.0 - sum;
    return w;
  };

  Eigen::VectorXd v = Eigen::VectorXd::Constant(k - 1, 1.0 / static_cast<double>(k));
  SpdMatrix c = center_for(full_weights(v), warm);
  Eigen::VectorXd f = defects(c);
  const double scale = std::max(1e-300, std::pow(covering_radius(c, ps), 2));

  for (int it = 0; it < 60 && f.lpNorm<Eigen::Infinity>() > tol * scale; ++it) {
    constexpr double h = 1e-7;
    Eigen::MatrixXd jac(k - 1, k - 1);
    for (std::size_t j = 0; j + 1 < k; ++j) {
      Eigen::VectorXd vh = v;
      vh(j) += h;
      jac.col(j) = (defects(center_for(full_weights(vh), c)) - f) / h;
    }
    const Eigen::VectorXd delta = jac.colPivHouseholderQr().solve(-f);
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
      const Eigen::VectorXd trial = v + alpha * delta;
      const auto w = full_weights(trial);
      // Weights may leave the simplex mildly; a negative weight marks an
      // inactive point and is handled by the caller.
      if (*std::ranges::min_element(w) < -0.5) continue;
      SpdMatrix ct = center_for(w, c);
      Eigen::VectorXd ft = defects(ct);
      if (ft.norm() < f.norm()) {
        v = trial;
        c = std::move(ct);
        f = std::move(ft);
        accepted = true;
        break;
      }
    }
    trace.record(++step, f.lpNorm<Eigen::Infinity>() / scale);
    if (!accepted) break;
  }
  return {std::move(c), full_weights(v), f.lpNorm<Eigen::Infinity>() / scale};
}

}  // namespace

MatrixMeanResult circumcenter_refine(const SpdMatrix& c0, const MatrixTuple& ps,
                                     double tol) {
  require_same_dim(c0, ps[0]);
  ConvergenceTrace trace;
  const std::size_t n = ps.size();
  if (n == 1) {
    trace.record(0, 0.0);
    trace.finish(true, kMatrixNoiseFloor);
    return {ps[0], std::move(trace)};
  }

  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = riemannian_distance(c0, ps[i]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::ranges::sort(order, [&](auto a, auto b) { return dist[a] > dist[b]; });
  std::vector<std::size_t> active{order[0], order[1]};
  for (std::size_t j = 2; j < n; ++j)
    if (dist[order[j]] >= 0.99 * dist[order[0]]) active.push_back(order[j]);

  SpdMatrix c = c0;
  int step = 0;
  for (int round = 0; round < 4 * static_cast<int>(n); ++round) {
    std::ranges::sort(active);
    ActiveSolve sol = equalize_active(c, ps, active, tol, trace, step);
    c = sol.center;

    // Drop the most negative weight, if any.
    const auto wmin = std::ranges::min_element(sol.weights);
    if (*wmin < 0.0 && active.size() > 2) {
      active.erase(active.begin() + (wmin - sol.weights.begin()));
      continue;
    }
    // Add the farthest outside point if it is not covered.
    const double r = riemannian_distance(c, ps[active.front()]);
    std::size_t worst = n;
    double worst_d = r * (1.0 + 1e-12);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::ranges::find(active, i) != active.end()) continue;
      const double d = riemannian_distance(c, ps[i]);
      if (d > worst_d) {
        worst_d = d;
        worst = i;
      }
    }
    if (worst != n) {
      active.push_back(worst);
      continue;
    }
    const bool ok = sol.defect <= tol && *wmin >= 0.0;
    trace.set_iterations_used(step);
    trace.finish(ok, kMatrixNoiseFloor);
    if (!ok)
      throw NonConvergenceError("circumcenter_refine: active-set solve did not converge",
                                std::move(trace));
    return {std::move(c), std::move(trace)};
  }
  trace.set_iterations_used(step);
  trace.finish(false, kMatrixNoiseFloor);
  throw NonConvergenceError("circumcenter_refine: active set did not settle",
                            std::move(trace));
}

double median_objective(const SpdMatrix& x, const MatrixTuple& ps) {
  double acc = 0.0;
  for (const auto& p : ps) acc += riemannian_distance(x, p);
  return acc / static_cast<double>(ps.size());
}

double default_lambda(int k) { return 1.0 / (k + 1.0); }

MatrixMeanResult bacak_median(const MatrixTuple& ps,
                              const std::function<double(int)>& lambda, int sweeps) {
  if (sweeps < 1) throw DomainError("bacak_median: sweeps must be >= 1");
  const auto n = static_cast<double>(ps.size());
  SpdMatrix x = ps[0];
  ConvergenceTrace trace;
  trace.record(0, median_objective(x, ps));
  for (int k = 0; k < sweeps; ++k) {
    const double lk = lambda(k);
    if (!(lk > 0.0)) throw DomainError("bacak_median: step sizes must be positive");
    for (const auto& p : ps) {
      const double d = riemannian_distance(p, x);
      if (d < 1e-14) continue;
      x = step_toward(x, p, std::min(1.0, lk / (n * d)));
    }
    trace.record(k + 1, median_objective(x, ps));
  }
  trace.set_iterations_used(sweeps);
  trace.finish(true, kMatrixNoiseFloor);
  return {std::move(x), std::move(trace)};
}

RecursiveMeanParams::RecursiveMeanParams(std::vector<double> s) : s_(std::move(s)) {
  if (s_.empty()) throw DomainError("RecursiveMeanParams: need at least one parameter");
  for (double v : s_)
    if (!(v > 0.0 && v <= 1.0))
      throw DomainError("RecursiveMeanParams: parameters must lie in (0, 1]");
}

RecursiveMeanParams RecursiveMeanParams::bmp(std::size_t n) {
  if (n < 2) throw DomainError("RecursiveMeanParams::bmp: n must be >= 2");
  std::vector<double> s;
  for (std::size_t m = n; m >= 2; --m)
    s.push_back(static_cast<double>(m - 1) / static_cast<double>(m));
  return RecursiveMeanParams(std::move(s));
}

RecursiveMeanParams RecursiveMeanParams::alm(std::size_t n) {
  if (n < 2) throw DomainError("RecursiveMeanParams::alm: n must be >= 2");
  std::vector<double> s(n - 1, 1.0);
  s.back() = 0.5;
  return RecursiveMeanParams(std::move(s));
}

namespace {

double max_spread(std::span<const SpdMatrix> ps) {
  double spread = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j)
      spread = std::max(spread, riemannian_distance(ps[i], ps[j]));
  return spread;
}

SpdMatrix recursive_solve(std::vector<SpdMatrix> ps, std::span<const double> s,
                          double tol, int max_rounds, ConvergenceTrace& trace) {
  const std::size_t n = ps.size();
  double spread = max_spread(ps);
  trace.record(0, spread);
  const double inner_tol = std::max(tol * 1e-2, 1e-13);
  int round = 0;
  while (spread > tol) {
    if (round == max_rounds) {
      trace.set_iterations_used(round);
      trace.finish(false, kMatrixNoiseFloor);
      throw NonConvergenceError("recursive_geometric_mean: no convergence within " +
                                    std::to_string(round) + " rounds",
                                std::move(trace));
    }
    std::vector<SpdMatrix> next;
    next.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (n == 2) {
        next.push_back(step_toward(ps[i], ps[1 - i], s[0]));
        continue;
      }
      std::vector<SpdMatrix> others;
      others.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) others.push_back(ps[j]);
      ConvergenceTrace inner;
      const SpdMatrix target =
          recursive_solve(std::move(others), s.subspan(1), inner_tol, max_rounds, inner);
      next.push_back(step_toward(ps[i], target, s[0]));
    }
    ps = std::move(next);
    ++round;
    spread = max_spread(ps);
    trace.record(round, spread);
  }
  trace.set_iterations_used(round);
  trace.finish(true, kMatrixNoiseFloor);
  return ps.front();
}

}  // namespace

MatrixMeanResult recursive_geometric_mean(const MatrixTuple& ps,
                                          const RecursiveMeanParams& params,
                                          double tol, int max_rounds) {
  if (ps.size() < 2) throw DomainError("recursive_geometric_mean: need n >= 2");
  if (params.arity() != ps.size()) {
    std::ostringstream msg;
    msg << "recursive_geometric_mean: " << params.values().size()
        << " parameters for " << ps.size() << " matrices (need n - 1)";
    throw ShapeError(msg.str());
  }
  if (!(tol > 0.0)) throw DomainError("recursive_geometric_mean: tolerance must be positive");
  ConvergenceTrace trace;
  std::vector<SpdMatrix> start(ps.begin(), ps.end());
  SpdMatrix value = recursive_solve(std::move(start), params.values(), tol, max_rounds, trace);
  return {std::move(value), std::move(trace)};
}

}  // namespace spdmeans
