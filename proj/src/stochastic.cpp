#include "spdmeans/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "spdmeans/errors.hpp"
#include "spdmeans/spd_core.hpp"

namespace spdmeans {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed),
      stream_(stream),
      engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

RandomStream RandomStream::substream(std::uint64_t stream) const {
  return RandomStream(splitmix64(seed_ ^ splitmix64(stream_)), stream);
}

double RandomStream::normal() { return normal_(engine_); }

double RandomStream::truncated_normal(double bound) {
  for (;;) {
    const double z = normal_(engine_);
    if (std::abs(z) <= bound) return z;
  }
}

double RandomStream::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

std::vector<SpdMatrix> shuffled(std::vector<SpdMatrix> batch, std::uint64_t seed) {
  RandomStream rng(seed, 1);
  std::shuffle(batch.begin(), batch.end(), rng.engine());
  return batch;
}

std::vector<SpdMatrix> sample_spd(const SampleConfig& config) {
  if (config.dimension < 1) throw DomainError("sample_spd: dimension must be >= 1");
  if (config.count < 1) throw DomainError("sample_spd: count must be >= 1");
  if (!(config.scale >= 0.0)) throw DomainError("sample_spd: scale must be >= 0");
  const SpdMatrix center =
      config.center ? *config.center : SpdMatrix::identity(config.dimension);
  if (center.dim() != config.dimension)
    throw ShapeError("sample_spd: center dimension does not match");

  std::vector<SpdMatrix> out;
  out.reserve(config.count);
  if (config.scale == 0.0) {
    out.assign(config.count, center);
    return out;
  }

  const int d = config.dimension;
  const Eigen::MatrixXd ms =
      spectral_apply(center.spectrum(), [](double l) { return std::sqrt(l); });
  RandomStream rng(config.seed);
  for (int pair = 0; pair < config.count / 2; ++pair) {
    Eigen::MatrixXd s(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        s(i, j) = s(j, i) = config.scale * rng.truncated_normal(4.0);
    // exp(S) and exp(-S) from one decomposition keeps the pair exactly
    // antithetic up to roundoff.
    const Spectrum sp = symmetric_eigen(s);
    const Eigen::MatrixXd plus = spectral_apply(sp, [](double l) { return std::exp(l); });
    const Eigen::MatrixXd minus = spectral_apply(sp, [](double l) { return std::exp(-l); });
    out.emplace_back(ms * plus * ms, 0.0);
    out.emplace_back(ms * minus * ms, 0.0);
  }
  if (config.count % 2 == 1) out.push_back(center);
  return out;
}

void InductiveMean::push(const SpdMatrix& sample) {
  if (!mean_) {
    mean_ = sample;
  } else {
    require_same_dim(*mean_, sample);
    mean_ = weighted_geometric(*mean_, sample, 1.0 / (static_cast<double>(count_) + 1.0));
  }
  ++count_;
}

const SpdMatrix& InductiveMean::current() const {
  if (!mean_) throw ShapeError("InductiveMean: no samples pushed");
  return *mean_;
}

MatrixMeanResult inductive_expectation(std::span<const SpdMatrix> samples,
                                       const std::optional<SpdMatrix>& center) {
  if (samples.empty()) throw ShapeError("inductive_expectation: empty sample stream");
  InductiveMean mean;
  ConvergenceTrace trace;
  std::size_t next_checkpoint = 10;
  for (const auto& x : samples) {
    mean.push(x);
    if (center && mean.count() == next_checkpoint) {
      trace.record(static_cast<int>(mean.count()),
                   riemannian_distance(mean.current(), *center));
      next_checkpoint *= 10;
    }
  }
  if (center && (trace.empty() ||
                 trace.back().step != static_cast<int>(mean.count())))
    trace.record(static_cast<int>(mean.count()),
                 riemannian_distance(mean.current(), *center));
  trace.set_iterations_used(static_cast<int>(mean.count()));
  trace.finish(true);
  return {mean.current(), std::move(trace)};
}

double spd_variance(std::span<const SpdMatrix> samples, const SpdMatrix& center) {
  if (samples.empty()) throw ShapeError("spd_variance: empty sample list");
  double acc = 0.0;
  for (const auto& x : samples) {
    const double r = riemannian_distance(x, center);
    acc += r * r;
  }
  return acc / static_cast<double>(samples.size());
}

double Distribution::draw(RandomStream& rng) const {
  switch (kind) {
    case Kind::lognormal:
      return std::exp(mu + sigma * rng.normal());
    case Kind::constant:
      return mu;
  }
  return mu;
}

GeneratorMoments generator_moments(const QuasiArithmeticGenerator& gen,
                                   const Distribution& dist) {
  if (dist.kind == Distribution::Kind::constant) return {gen.forward(dist.mu), 0.0};
  if (!(dist.sigma >= 0.0)) throw DomainError("generator_moments: sigma must be >= 0");
  if (dist.sigma == 0.0) return {gen.forward(std::exp(dist.mu)), 0.0};

  using boost::math::quadrature::gauss_kronrod;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto f_at = [&](double z) { return gen.forward(std::exp(dist.mu + dist.sigma * z)); };
  auto density = [&](double z) { return inv_sqrt_2pi * std::exp(-0.5 * z * z); };
  // The normal tail beyond 16 standard deviations is below 1e-57.
  constexpr double bound = 16.0;
  const double mean = gauss_kronrod<double, 61>::integrate(
      [&](double z) { return f_at(z) * density(z); }, -bound, bound, 15, 1e-14);
  const double variance = gauss_kronrod<double, 61>::integrate(
      [&](double z) {
        const double c = f_at(z) - mean;
        return c * c * density(z);
      },
      -bound, bound, 15, 1e-14);
  return {mean, variance};
}

QaExperimentReport qa_expectation_experiment(const QuasiArithmeticGenerator& gen,
                                             const Distribution& dist, int n,
                                             int trials, std::uint64_t seed) {
  if (n < 1 || trials < 2)
    throw DomainError("qa_expectation_experiment: need n >= 1 and trials >= 2");
  const GeneratorMoments moments = generator_moments(gen, dist);
  QaExperimentReport report;
  report.generator = gen.label();
  report.n = n;
  report.trials = trials;
  report.seed = seed;
  report.analytic_expectation = gen.inverse(moments.mean);
  const double slope = gen.derivative(report.analytic_expectation);
  report.analytic_clt_variance = moments.variance / (slope * slope);

  const double root_n = std::sqrt(static_cast<double>(n));
  // Welford accumulation of sqrt(n)(M_f - E_f) and of M_f.
  double stat_mean = 0.0;
  double stat_m2 = 0.0;
  double mf_mean = 0.0;
  const RandomStream root(seed);
  for (int trial = 0; trial < trials; ++trial) {
    RandomStream rng = root.substream(static_cast<std::uint64_t>(trial));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += gen.forward(dist.draw(rng));
    const double mf = gen.inverse(acc / n);
    if (trial == 0) report.first_trial_mean = mf;
    const double stat = root_n * (mf - report.analytic_expectation);
    const double k = trial + 1.0;
    const double delta = stat - stat_mean;
    stat_mean += delta / k;
    stat_m2 += delta * (stat - stat_mean);
    mf_mean += (mf - mf_mean) / k;
  }
  report.mean_over_trials = mf_mean;
  report.empirical_clt_variance = stat_m2 / (trials - 1.0);
  return report;
}

}  // namespace spdmeans
