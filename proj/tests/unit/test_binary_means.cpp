#include <cmath>
#include <random>
#include <vector>

#include <Eigen/LU>
#include <doctest.h>

#include "../support/random_spd.hpp"
#include "spdmeans/binary_means.hpp"
#include "spdmeans/errors.hpp"
#include "spdmeans/spd_core.hpp"

using namespace spdmeans;
using spdmeans::testing::random_spd;
using doctest::Approx;

namespace {

double frob_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / b.norm();
}

SpdMatrix diag(std::initializer_list<double> v) {
  return SpdMatrix::diagonal(Eigen::Map<const Eigen::VectorXd>(v.begin(), v.size()));
}

// P minus a random PSD term small enough to stay positive definite.
SpdMatrix shrink(std::mt19937_64& rng, const SpdMatrix& p) {
  std::normal_distribution<double> n;
  Eigen::VectorXd v(p.dim());
  for (int i = 0; i < p.dim(); ++i) v(i) = n(rng);
  v *= std::sqrt(0.5 * p.min_eigenvalue()) / v.norm();
  return SpdMatrix(p.matrix() - v * v.transpose(), 0.0);
}

}  // namespace

TEST_CASE("arithmetic-harmonic iteration") {
  std::mt19937_64 rng(20);
  const auto p = random_spd(rng, 3);
  auto same = ahm_iteration(p, p);
  CHECK(frob_rel(same.value.matrix(), p.matrix()) < 1e-14);
  CHECK(same.trace.iterations_used() == 0);

  CHECK(frob_rel(ahm_iteration(SpdMatrix::identity(2), diag({4, 9})).value.matrix(),
                 diag({2, 3}).matrix()) < 1e-12);
  CHECK(ahm_iteration(diag({4}), diag({9})).value.matrix()(0, 0) == Approx(6.0).epsilon(1e-12));

  for (int d = 2; d <= 8; ++d) {
    for (int k = 0; k < 10; ++k) {
      const auto x = random_spd(rng, d);
      const auto y = random_spd(rng, d);
      const auto r = ahm_iteration(x, y);
      CHECK(frob_rel(r.value.matrix(), geometric_mean(x, y).matrix()) <= 1e-10);
      REQUIRE(r.trace.order_estimate().has_value());
      CHECK(*r.trace.order_estimate() >= 1.7);
      CHECK(*r.trace.order_estimate() <= 2.3);
    }
  }

  CHECK_THROWS_AS(ahm_iteration(random_spd(rng, 3), random_spd(rng, 3), 1e-12, 1),
                  NonConvergenceError);
  CHECK_THROWS_AS(ahm_iteration(SpdMatrix::identity(2), SpdMatrix::identity(3)), ShapeError);
}

TEST_CASE("geometric mean closed form") {
  CHECK(frob_rel(geometric_mean(diag({1, 4}), diag({9, 16})).matrix(), diag({3, 8}).matrix()) <
        1e-14);
  std::mt19937_64 rng(21);
  for (int d = 2; d <= 6; ++d) {
    for (int k = 0; k < 20; ++k) {
      const auto x = random_spd(rng, d);
      const auto y = random_spd(rng, d);
      const auto g = geometric_mean(x, y);
      CHECK(frob_rel(g.matrix(), geodesic(x, y, 0.5).matrix()) < 1e-13);
      CHECK(frob_rel(g.matrix() * x.inverse().matrix() * g.matrix(), y.matrix()) <= 1e-8);
      const double dets = std::sqrt(x.matrix().determinant() * y.matrix().determinant());
      CHECK(std::abs(g.matrix().determinant() - dets) / dets <= 1e-10);
      CHECK(riemannian_distance(g, geometric_mean(x.inverse(), y.inverse()).inverse()) <= 1e-8);
    }
    const auto x = random_spd(rng, d);
    CHECK(frob_rel(geometric_mean(x, x).matrix(), x.matrix()) < 1e-13);
  }
}

TEST_CASE("geometric mean is operator monotone where log-Euclidean is not") {
  std::mt19937_64 rng(22);
  for (int d = 2; d <= 4; ++d) {
    for (int k = 0; k < 30; ++k) {
      const auto x = random_spd(rng, d);
      const auto y = random_spd(rng, d);
      const auto xs = shrink(rng, x);
      const auto ys = shrink(rng, y);
      CHECK(loewner_leq(geometric_mean(xs, ys), geometric_mean(x, y)));
    }
  }

  Eigen::Matrix2d xm, xsm;
  xm << 19, -18, -18, 19;
  xsm << 19, -18, -18, 18.5;
  const SpdMatrix x(xm), xs(xsm);
  const auto y = diag({1, 5});
  REQUIRE(loewner_leq(xs, x));
  const auto w = WeightVector::uniform(2);
  CHECK(loewner_leq(geometric_mean(xs, y), geometric_mean(x, y)));
  CHECK_FALSE(loewner_leq(log_euclidean_mean(std::vector<SpdMatrix>{xs, y}, w),
                          log_euclidean_mean(std::vector<SpdMatrix>{x, y}, w)));
}

TEST_CASE("log-Euclidean mean") {
  std::mt19937_64 rng(23);
  const auto w = WeightVector::uniform(2);
  const auto p = random_spd(rng, 3);
  CHECK(frob_rel(log_euclidean_mean(std::vector<SpdMatrix>{p, p}, w).matrix(), p.matrix()) <
        1e-13);
  CHECK(frob_rel(
            log_euclidean_mean(std::vector<SpdMatrix>{diag({1, 4}), diag({9, 16})}, w).matrix(),
            diag({3, 8}).matrix()) < 1e-13);

  const auto x = random_spd(rng, 2);
  const auto y = random_spd(rng, 2);
  CHECK((log_euclidean_mean(std::vector<SpdMatrix>{x, y}, w).matrix() -
         geometric_mean(x, y).matrix())
            .norm() > 1e-6);
}

TEST_CASE("log-Euclidean power means") {
  std::mt19937_64 rng(24);
  for (int d = 2; d <= 5; ++d) {
    const auto x = random_spd(rng, d);
    const auto y = random_spd(rng, d);
    CHECK(frob_rel(q_power_mean(x, y, 1).matrix(), 0.5 * (x.matrix() + y.matrix())) < 1e-12);
    const Eigen::MatrixXd h = 2.0 * (x.inverse().matrix() + y.inverse().matrix()).inverse();
    CHECK(frob_rel(q_power_mean(x, y, -1).matrix(), h) < 1e-12);

    const auto lem =
        log_euclidean_mean(std::vector<SpdMatrix>{x, y}, WeightVector::uniform(2)).matrix();
    CHECK(frob_rel(q_power_mean(x, y, 1e-12).matrix(), lem) <= 1e-8);
    CHECK(frob_rel(q_power_mean(x, y, 1e-6).matrix(), lem) <= 1e-5);
    CHECK(frob_rel(q_power_mean(x, y, -1e-6).matrix(), lem) <= 1e-5);
  }
}

TEST_CASE("power mean fixed point") {
  CHECK(lim_palfia_power_mean(diag({4}), diag({9}), 0.5).matrix()(0, 0) ==
        Approx(6.25).epsilon(1e-13));
  CHECK_THROWS_AS(lim_palfia_power_mean(diag({4}), diag({9}), 0.0), DomainError);
  CHECK_THROWS_AS(lim_palfia_power_mean(diag({4}), diag({9}), 1.5), DomainError);

  std::mt19937_64 rng(25);
  for (int d = 2; d <= 5; ++d) {
    const auto x = random_spd(rng, d);
    const auto y = random_spd(rng, d);
    CHECK(frob_rel(lim_palfia_power_mean(x, x, 0.4).matrix(), x.matrix()) < 1e-12);
    CHECK(frob_rel(lim_palfia_power_mean(x, y, 1).matrix(), 0.5 * (x.matrix() + y.matrix())) <
          1e-14);
    for (double p : {0.05, 0.25, 0.5, 0.75, 1.0}) {
      const auto m = lim_palfia_power_mean(x, y, p);
      CHECK(lim_palfia_residual(m, x, y, p) <= 1e-10);
    }
    for (double p : {0.5, 0.75, 1.0}) {
      const auto picard = lim_palfia_picard(x, y, p);
      CHECK(frob_rel(picard.value.matrix(), lim_palfia_power_mean(x, y, p).matrix()) <= 1e-9);
    }
  }
}

TEST_CASE("power means approach the geometric mean") {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(std::ldexp(1.0, -k));

  auto scalar = power_mean_limit_study(diag({4}), diag({9}), grid);
  REQUIRE(scalar.size() == grid.size());
  for (std::size_t i = 1; i < scalar.size(); ++i)
    CHECK(scalar[i].distance <= scalar[i - 1].distance + 1e-9);

  std::mt19937_64 rng(26);
  const auto x = random_spd(rng, 3);
  const auto y = random_spd(rng, 3);
  auto zero = power_mean_limit_study(x, x, grid);
  for (const auto& pt : zero) CHECK(pt.distance < 1e-12);

  const std::vector<double> tiny{1e-4};
  CHECK(power_mean_limit_study(x, y, tiny).front().distance < 1e-3 * riemannian_distance(x, y));

  const std::vector<double> unsorted{0.5, 1.0};
  CHECK_THROWS_AS(power_mean_limit_study(x, y, unsorted), DomainError);
}
