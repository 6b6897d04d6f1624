#include "spdmeans/spd_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "spdmeans/errors.hpp"

namespace spdmeans {

Spectrum symmetric_eigen(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() != symmetric.cols() || symmetric.rows() == 0)
    throw ShapeError("symmetric_eigen: matrix must be square and nonempty");
  if (!symmetric.allFinite()) throw NumericError("symmetric_eigen: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  if (solver.info() != Eigen::Success)
    throw NumericError("symmetric_eigen: eigensolver failed");
  // Eigen returns ascending order; store descending.
  return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

Eigen::MatrixXd spectral_apply(const Spectrum& spectrum,
                               const std::function<double(double)>& f) {
  const auto n = spectrum.values.size();
  Eigen::VectorXd fv(n);
  for (Eigen::Index i = 0; i < n; ++i) fv(i) = f(spectrum.values(i));
  if (!fv.allFinite()) throw DomainError("matrix_function: f is not finite on the spectrum");
  Eigen::MatrixXd out =
      spectrum.vectors * fv.asDiagonal() * spectrum.vectors.transpose();
  return symmetrized(out);
}

namespace {

void check_pd(const Spectrum& s, double threshold) {
  const double largest = s.values(0);
  const double smallest = s.values(s.values.size() - 1);
  if (!(largest > 0.0) || !(smallest > threshold * largest)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "matrix is not positive definite (minimum eigenvalue " << smallest << ")";
    throw NotPositiveDefiniteError(msg.str(), smallest);
  }
}

}  // namespace

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& m, double pd_threshold) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ShapeError("SpdMatrix: matrix must be square and nonempty");
  if (!m.allFinite()) throw DomainError("SpdMatrix: entries must be finite");
  matrix_ = symmetrized(m);
  auto spectrum = std::make_shared<Spectrum>(symmetric_eigen(matrix_));
  check_pd(*spectrum, pd_threshold);
  spectrum_ = std::move(spectrum);
}

SpdMatrix::SpdMatrix(Trusted, Eigen::MatrixXd m, std::shared_ptr<const Spectrum> s)
    : matrix_(std::move(m)), spectrum_(std::move(s)) {}

SpdMatrix SpdMatrix::identity(int d) {
  if (d < 1) throw ShapeError("SpdMatrix::identity: dimension must be >= 1");
  auto s = std::make_shared<Spectrum>(
      Spectrum{Eigen::VectorXd::Ones(d), Eigen::MatrixXd::Identity(d, d)});
  return SpdMatrix(Trusted{}, Eigen::MatrixXd::Identity(d, d), std::move(s));
}

SpdMatrix SpdMatrix::diagonal(const Eigen::VectorXd& diag) {
  return SpdMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

SpdMatrix SpdMatrix::from_spectrum(Spectrum spectrum, double pd_threshold) {
  check_pd(spectrum, pd_threshold);
  Eigen::MatrixXd m = symmetrized(spectrum.vectors * spectrum.values.asDiagonal() *
                                  spectrum.vectors.transpose());
  return SpdMatrix(Trusted{}, std::move(m),
                   std::make_shared<const Spectrum>(std::move(spectrum)));
}

namespace {

// f > 0 maps SPD to SPD with the same eigenvectors; the order of the
// transformed eigenvalues is restored before reuse.
SpdMatrix map_positive(const Spectrum& s, const std::function<double(double)>& f) {
  const auto n = s.values.size();
  std::vector<std::pair<double, Eigen::Index>> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = {f(s.values(i)), i};
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  Spectrum out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = order[i].first;
    out.vectors.col(i) = s.vectors.col(order[i].second);
  }
  if (!out.values.allFinite()) throw NumericError("SpdMatrix: spectral map overflow");
  return SpdMatrix::from_spectrum(std::move(out), 0.0);
}

}  // namespace

SpdMatrix SpdMatrix::inverse() const {
  return map_positive(*spectrum_, [](double l) { return 1.0 / l; });
}

SpdMatrix SpdMatrix::sqrt() const {
  return map_positive(*spectrum_, [](double l) { return std::sqrt(l); });
}

SpdMatrix SpdMatrix::inv_sqrt() const {
  return map_positive(*spectrum_, [](double l) { return 1.0 / std::sqrt(l); });
}

SpdMatrix SpdMatrix::power(double t) const {
  return map_positive(*spectrum_, [t](double l) { return std::pow(l, t); });
}

Eigen::MatrixXd SpdMatrix::log() const {
  return spectral_apply(*spectrum_, [](double l) { return std::log(l); });
}

double SpdMatrix::log_det() const { return spectrum_->values.array().log().sum(); }

SpdMatrix exp_symmetric(const Eigen::MatrixXd& symmetric) {
  const Spectrum s = symmetric_eigen(symmetrized(symmetric));
  return map_positive(s, [](double l) { return std::exp(l); });
}

}  // namespace spdmeans
