#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "spdmeans/binary_means.hpp"
#include "spdmeans/scalar_means.hpp"
#include "spdmeans/spd_matrix.hpp"

namespace spdmeans {

/// Seedable generator with independent substreams. Stream ids are mixed with
/// the seed through SplitMix64, so (seed, stream) pairs never share state.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  RandomStream substream(std::uint64_t stream) const;

  double normal();
  /// Standard normal conditioned on |z| <= bound, by rejection.
  double truncated_normal(double bound);
  double uniform(double lo, double hi);

  std::mt19937_64& engine() noexcept { return engine_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

struct SampleConfig {
  std::uint64_t seed = 0;
  int dimension = 0;
  double scale = 0.0;  // tangent-space standard deviation sigma
  int count = 1;
  std::optional<SpdMatrix> center;  // identity when absent
};

/// X = M^{1/2} exp(S) M^{1/2} with S symmetric, entries N(0, sigma^2)
/// truncated at 4 sigma. Samples come in (S, -S) pairs; an odd count ends with
/// M itself, so the tangent vectors always sum to zero. Deterministic in
/// (seed, config).
std::vector<SpdMatrix> sample_spd(const SampleConfig& config);

/// The batch in a seeded random order. Adjacent antithetic partners make the
/// inductive estimator land on M after every pair, so streams fed to it are
/// permuted first.
std::vector<SpdMatrix> shuffled(std::vector<SpdMatrix> batch, std::uint64_t seed);

/// Sturm's inductive estimator M_{t+1} = M_t #_{1/(t+1)} X_{t+1}.
class InductiveMean {
 public:
  void push(const SpdMatrix& sample);

  std::size_t count() const noexcept { return count_; }
  /// Throws ShapeError before the first push.
  const SpdMatrix& current() const;

 private:
  std::optional<SpdMatrix> mean_;
  std::size_t count_ = 0;
};

/// Runs the inductive estimator over `samples`. When `center` is given, the
/// trace records rho(M_t, center) at t = 10, 100, 1000, ... and at the end.
MatrixMeanResult inductive_expectation(std::span<const SpdMatrix> samples,
                                       const std::optional<SpdMatrix>& center = {});

/// (1/n) sum_i rho^2(X_i, center)
double spd_variance(std::span<const SpdMatrix> samples, const SpdMatrix& center);

/// Scalar distribution for the quasi-arithmetic SLLN/CLT experiment.
struct Distribution {
  enum class Kind { lognormal, constant };
  Kind kind = Kind::lognormal;
  double mu = 0.0;     // lognormal: mean of log X; constant: the value
  double sigma = 1.0;  // lognormal: sd of log X

  static Distribution lognormal(double mu, double sigma) {
    return {Kind::lognormal, mu, sigma};
  }
  static Distribution constant(double c) { return {Kind::constant, c, 0.0}; }

  double draw(RandomStream& rng) const;
};

/// E[f(X)] and Var[f(X)], by quadrature over the normal density for
/// lognormal X and exactly for constants.
struct GeneratorMoments {
  double mean = 0.0;
  double variance = 0.0;
};
GeneratorMoments generator_moments(const QuasiArithmeticGenerator& gen,
                                   const Distribution& dist);

struct QaExperimentReport {
  std::string generator;
  int n = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  double analytic_expectation = 0.0;    // E_f[X] = f^{-1}(E[f(X)])
  double first_trial_mean = 0.0;        // M_f(X_1..X_n) of trial 0
  double mean_over_trials = 0.0;
  double analytic_clt_variance = 0.0;   // Var[f(X)] / f'(E_f[X])^2
  double empirical_clt_variance = 0.0;  // sample variance of sqrt(n)(M_f - E_f)
};

QaExperimentReport qa_expectation_experiment(const QuasiArithmeticGenerator& gen,
                                             const Distribution& dist, int n,
                                             int trials, std::uint64_t seed);

}  // namespace spdmeans
