#pragma once

#include <functional>
#include <span>
#include <vector>

#include "spdmeans/binary_means.hpp"
#include "spdmeans/convergence.hpp"
#include "spdmeans/spd_matrix.hpp"
#include "spdmeans/weights.hpp"

namespace spdmeans {

/// A nonempty list of SPD matrices of one dimension.
class MatrixTuple {
 public:
  explicit MatrixTuple(std::vector<SpdMatrix> matrices);

  std::size_t size() const noexcept { return matrices_.size(); }
  int dim() const { return matrices_.front().dim(); }
  const SpdMatrix& operator[](std::size_t i) const { return matrices_[i]; }
  std::span<const SpdMatrix> view() const noexcept { return matrices_; }
  auto begin() const noexcept { return matrices_.begin(); }
  auto end() const noexcept { return matrices_.end(); }

 private:
  std::vector<SpdMatrix> matrices_;
};

/// Cyclic inductive mean M_{t+1} = M_t #_{1/(t+1)} P_{(t mod n)+1}, M_1 = P_1.
/// Runs `steps` updates; the trace holds the Karcher residual every n steps.
MatrixMeanResult holbrook_inductive_mean(const MatrixTuple& ps, int steps);

/// ||sum_i log(G^{-1/2} P_i G^{-1/2})||_F / n
double karcher_residual(const SpdMatrix& g, const MatrixTuple& ps);

/// ||sum_i w_i log(G^{-1/2} P_i G^{-1/2})||_F
double weighted_karcher_residual(const SpdMatrix& g, const MatrixTuple& ps,
                                 const WeightVector& w);

inline constexpr int kKarcherMaxIterations = 500;

/// Fixed-point iteration G <- G^{1/2} exp(sum_i w_i log(G^{-1/2} P_i G^{-1/2})) G^{1/2}
/// until the weighted residual is <= tol.
MatrixMeanResult karcher_refine(const SpdMatrix& g0, const MatrixTuple& ps,
                                const WeightVector& w, double tol,
                                int max_iter = kKarcherMaxIterations);

/// max_i rho(C, P_i)
double covering_radius(const SpdMatrix& c, const MatrixTuple& ps);

inline constexpr int kCircumcenterSteps = 10000;

/// Farthest-point iteration C_{t+1} = C_t #_{1/(t+1)} P_far(t), C_1 = P_1.
/// Ties go to the lowest index. The trace records the covering radius.
MatrixMeanResult riemannian_circumcenter(const MatrixTuple& ps,
                                         int steps = kCircumcenterSteps);

/// Solves the minimax problem to high accuracy from a warm start, by finding
/// Karcher weights on the active set that equalize the distances. Used as an
/// oracle for the farthest-point iteration.
MatrixMeanResult circumcenter_refine(const SpdMatrix& c0, const MatrixTuple& ps,
                                     double tol = 1e-13);

/// (1/n) sum_i rho(X, P_i)
double median_objective(const SpdMatrix& x, const MatrixTuple& ps);

inline constexpr int kMedianSweeps = 1000;

/// lambda_k = 1/(k+1)
double default_lambda(int k);

/// Cyclic geodesic proximal scheme for the Riemannian median. Step toward P_i
/// in sweep k is min(1, lambda_k / (n rho(P_i, X))); steps toward a point
/// closer than 1e-14 are skipped. Starts at P_1; the trace records the
/// objective after each sweep.
MatrixMeanResult bacak_median(const MatrixTuple& ps,
                              const std::function<double(int)>& lambda = default_lambda,
                              int sweeps = kMedianSweeps);

/// Parameters s_1..s_{n-1} in (0, 1] of a recursive geometric mean.
class RecursiveMeanParams {
 public:
  explicit RecursiveMeanParams(std::vector<double> s);

  /// ((n-1)/n, (n-2)/(n-1), ..., 1/2)
  static RecursiveMeanParams bmp(std::size_t n);
  /// (1, ..., 1, 1/2)
  static RecursiveMeanParams alm(std::size_t n);

  std::span<const double> values() const noexcept { return s_; }
  std::size_t arity() const noexcept { return s_.size() + 1; }

 private:
  std::vector<double> s_;
};

inline constexpr int kRecursiveMaxRounds = 100;

/// P_i <- P_i #_{s_1} G_{s_2..s_{n-1}}(all others), until the largest pairwise
/// distance is <= tol. The trace records that spread per round.
MatrixMeanResult recursive_geometric_mean(const MatrixTuple& ps,
                                          const RecursiveMeanParams& params,
                                          double tol,
                                          int max_rounds = kRecursiveMaxRounds);

}  // namespace spdmeans
