#include "spdmeans/spd_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "spdmeans/errors.hpp"

namespace spdmeans {

void require_same_dim(const SpdMatrix& a, const SpdMatrix& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << "dimension mismatch: " << a.dim() << " vs " << b.dim();
    throw ShapeError(msg.str());
  }
}

void require_uniform(std::span<const SpdMatrix> ps) {
  if (ps.empty()) throw ShapeError("empty matrix list");
  for (const auto& p : ps) require_same_dim(ps.front(), p);
}

Eigen::MatrixXd matrix_function(const SpdMatrix& p,
                                const std::function<double(double)>& f) {
  return spectral_apply(p.spectrum(), f);
}

namespace {

// X^{-1/2} Y X^{-1/2}, symmetrized.
Eigen::MatrixXd whitened(const SpdMatrix& x, const SpdMatrix& y) {
  const Eigen::MatrixXd xis = spectral_apply(
      x.spectrum(), [](double l) { return 1.0 / std::sqrt(l); });
  return symmetrized(xis * y.matrix() * xis);
}

}  // namespace

double riemannian_distance(const SpdMatrix& p1, const SpdMatrix& p2) {
  require_same_dim(p1, p2);
  const Spectrum s = symmetric_eigen(whitened(p1, p2));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    if (!(s.values(i) > 0.0))
      throw NumericError("riemannian_distance: lost positive definiteness");
    const double l = std::log(s.values(i));
    acc += l * l;
  }
  return std::sqrt(acc);
}

SpdMatrix weighted_geometric(const SpdMatrix& x, const SpdMatrix& y, double t) {
  require_same_dim(x, y);
  if (!std::isfinite(t)) throw DomainError("weighted_geometric: t must be finite");
  // One decomposition of X gives both X^{1/2} and X^{-1/2}.
  const Spectrum& sx = x.spectrum();
  const Eigen::MatrixXd xs = spectral_apply(sx, [](double l) { return std::sqrt(l); });
  const Eigen::MatrixXd xis =
      spectral_apply(sx, [](double l) { return 1.0 / std::sqrt(l); });
  const Spectrum w = symmetric_eigen(symmetrized(xis * y.matrix() * xis));
  const Eigen::MatrixXd wt = spectral_apply(w, [t](double l) {
    if (!(l > 0.0)) return std::nan("");
    return std::pow(l, t);
  });
  return SpdMatrix(xs * wt * xs, 0.0);
}

SpdMatrix geodesic(const SpdMatrix& x, const SpdMatrix& y, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream msg;
    msg << "geodesic: t = " << t << " outside [0, 1]";
    throw DomainError(msg.str());
  }
  if (t == 0.0) {
    require_same_dim(x, y);
    return x;
  }
  if (t == 1.0) {
    require_same_dim(x, y);
    return y;
  }
  return weighted_geometric(x, y, t);
}

namespace {

void require_weights(std::span<const SpdMatrix> ps, const WeightVector& w,
                     const char* op) {
  require_uniform(ps);
  if (ps.size() != w.size()) {
    std::ostringstream msg;
    msg << op << ": " << ps.size() << " matrices but " << w.size() << " weights";
    throw ShapeError(msg.str());
  }
}

}  // namespace

SpdMatrix weighted_arithmetic(std::span<const SpdMatrix> ps,
                              const WeightVector& w) {
  require_weights(ps, w, "weighted_arithmetic");
  if (ps.size() == 1) return ps.front();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ps.front().dim(), ps.front().dim());
  for (std::size_t i = 0; i < ps.size(); ++i) acc += w[i] * ps[i].matrix();
  return SpdMatrix(acc, 0.0);
}

SpdMatrix weighted_harmonic(std::span<const SpdMatrix> ps,
                            const WeightVector& w) {
  require_weights(ps, w, "weighted_harmonic");
  if (ps.size() == 1) return ps.front();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ps.front().dim(), ps.front().dim());
  for (std::size_t i = 0; i < ps.size(); ++i)
    acc += w[i] * ps[i].inverse().matrix();
  return SpdMatrix(acc, 0.0).inverse();
}

bool loewner_leq(const SpdMatrix& p, const SpdMatrix& q, double rel_tol) {
  require_same_dim(p, q);
  const Eigen::MatrixXd diff = symmetrized(q.matrix() - p.matrix());
  const double scale =
      std::max(p.matrix().cwiseAbs().maxCoeff(), q.matrix().cwiseAbs().maxCoeff());
  const Spectrum s = symmetric_eigen(diff);
  return s.values(s.values.size() - 1) >= -rel_tol * scale;
}

double s_divergence(const SpdMatrix& x, const SpdMatrix& y) {
  require_same_dim(x, y);
  const Eigen::MatrixXd mid = 0.5 * (x.matrix() + y.matrix());
  Eigen::LLT<Eigen::MatrixXd> llt(mid);
  if (llt.info() != Eigen::Success) throw NumericError("s_divergence: Cholesky failed");
  const double logdet_mid = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double value = logdet_mid - 0.5 * (x.log_det() + y.log_det());
  return std::max(value, 0.0);
}

}  // namespace spdmeans
