#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "spdmeans/spd_matrix.hpp"
#include "spdmeans/weights.hpp"

namespace spdmeans {

/// U diag(f(lambda_i)) U^T; f must be finite on the spectrum of P.
Eigen::MatrixXd matrix_function(const SpdMatrix& p,
                                const std::function<double(double)>& f);

/// Affine-invariant distance ||log(P1^{-1/2} P2 P1^{-1/2})||_F.
double riemannian_distance(const SpdMatrix& p1, const SpdMatrix& p2);

/// Point at parameter t in [0, 1] of the geodesic from X to Y,
/// X^{1/2} (X^{-1/2} Y X^{-1/2})^t X^{1/2}.
SpdMatrix geodesic(const SpdMatrix& x, const SpdMatrix& y, double t);

/// Same formula for any real t, including extrapolation past Y.
SpdMatrix weighted_geometric(const SpdMatrix& x, const SpdMatrix& y, double t);

/// sum_i w_i P_i
SpdMatrix weighted_arithmetic(std::span<const SpdMatrix> ps,
                              const WeightVector& w);
/// (sum_i w_i P_i^{-1})^{-1}
SpdMatrix weighted_harmonic(std::span<const SpdMatrix> ps,
                            const WeightVector& w);

/// P <= Q in the Loewner order: lambda_min(Q - P) >= -rel_tol * scale, where
/// scale is the largest absolute entry of P and Q.
bool loewner_leq(const SpdMatrix& p, const SpdMatrix& q,
                 double rel_tol = kDefaultPdThreshold);

/// log det((X + Y)/2) - 1/2 log det(XY)
double s_divergence(const SpdMatrix& x, const SpdMatrix& y);

/// Throws ShapeError unless both have the same dimension.
void require_same_dim(const SpdMatrix& a, const SpdMatrix& b);
/// Throws ShapeError when empty or of mixed dimension.
void require_uniform(std::span<const SpdMatrix> ps);

}  // namespace spdmeans
