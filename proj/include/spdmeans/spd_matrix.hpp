#pragma once

#include <functional>
#include <memory>

#include <Eigen/Core>

namespace spdmeans {

/// Positive-definiteness threshold relative to the largest eigenvalue.
inline constexpr double kDefaultPdThreshold = 1e-12;

/// Eigendecomposition P = U diag(values) U^T, eigenvalues in descending order.
struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Symmetric eigendecomposition of an already symmetric matrix. Throws
/// NumericError if the solver fails.
Spectrum symmetric_eigen(const Eigen::MatrixXd& symmetric);

/// U diag(f(values)) U^T
Eigen::MatrixXd spectral_apply(const Spectrum& spectrum,
                               const std::function<double(double)>& f);

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

/// An immutable symmetric positive-definite matrix.
///
/// The input is symmetrized at construction and rejected when its smallest
/// eigenvalue is not above `pd_threshold` times its largest. The spectrum
/// computed for that check is kept and shared between copies; it is never
/// mutated after construction, so instances may be shared across threads.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Eigen::MatrixXd& m,
                     double pd_threshold = kDefaultPdThreshold);

  static SpdMatrix identity(int d);
  static SpdMatrix diagonal(const Eigen::VectorXd& diag);
  /// Builds from symmetric eigenpairs without re-decomposing.
  static SpdMatrix from_spectrum(Spectrum spectrum,
                                 double pd_threshold = kDefaultPdThreshold);

  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const Spectrum& spectrum() const noexcept { return *spectrum_; }

  double min_eigenvalue() const { return spectrum_->values(dim() - 1); }
  double max_eigenvalue() const { return spectrum_->values(0); }

  SpdMatrix inverse() const;
  SpdMatrix sqrt() const;
  SpdMatrix inv_sqrt() const;
  SpdMatrix power(double t) const;
  /// Symmetric matrix logarithm.
  Eigen::MatrixXd log() const;
  double log_det() const;

 private:
  struct Trusted {};
  SpdMatrix(Trusted, Eigen::MatrixXd m, std::shared_ptr<const Spectrum> s);

  Eigen::MatrixXd matrix_;
  std::shared_ptr<const Spectrum> spectrum_;
};

/// exp of a symmetric matrix; always SPD.
SpdMatrix exp_symmetric(const Eigen::MatrixXd& symmetric);

}  // namespace spdmeans
