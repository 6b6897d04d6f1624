#pragma once

#include <span>
#include <vector>

#include "spdmeans/convergence.hpp"
#include "spdmeans/spd_matrix.hpp"
#include "spdmeans/weights.hpp"

namespace spdmeans {

struct MatrixMeanResult {
  SpdMatrix value;
  ConvergenceTrace trace;
};

inline constexpr double kAhmTolerance = 1e-12;
inline constexpr int kAhmMaxIterations = 64;

/// Matrix arithmetic-harmonic double sequence
///   A <- (A + H)/2,  H <- 2 (A^{-1} + H^{-1})^{-1}
/// stopped when rho(A_t, H_t) <= tol.
MatrixMeanResult ahm_iteration(const SpdMatrix& x, const SpdMatrix& y,
                               double tol = kAhmTolerance,
                               int max_iter = kAhmMaxIterations);

/// X^{1/2} (X^{-1/2} Y X^{-1/2})^{1/2} X^{1/2}
SpdMatrix geometric_mean(const SpdMatrix& x, const SpdMatrix& y);

/// exp(sum_i w_i log P_i)
SpdMatrix log_euclidean_mean(std::span<const SpdMatrix> ps,
                             const WeightVector& w);

/// ((X^p + Y^p)/2)^{1/p}, with the log-Euclidean limit for |p| < 1e-8.
SpdMatrix q_power_mean(const SpdMatrix& x, const SpdMatrix& y, double p);

/// Closed-form solution of M = 1/2 M #_p X + 1/2 M #_p Y for p in (0, 1].
SpdMatrix lim_palfia_power_mean(const SpdMatrix& x, const SpdMatrix& y,
                                double p);

/// ||M - 1/2 M #_p X - 1/2 M #_p Y||_F / ||M||_F
double lim_palfia_residual(const SpdMatrix& m, const SpdMatrix& x,
                           const SpdMatrix& y, double p);

struct PicardOptions {
  double tol = 1e-12;
  int max_iter = 200;
};

/// Undamped fixed-point iteration of the same equation, started at (X+Y)/2.
/// Independent of the closed form; used to cross-check it.
MatrixMeanResult lim_palfia_picard(const SpdMatrix& x, const SpdMatrix& y,
                                   double p, PicardOptions options = {});

struct PowerLimitPoint {
  double p;
  double distance;
};

/// rho(M_p(X, Y), G(X, Y)) along a strictly decreasing grid in (0, 1].
std::vector<PowerLimitPoint> power_mean_limit_study(
    const SpdMatrix& x, const SpdMatrix& y, std::span<const double> p_grid);

}  // namespace spdmeans
