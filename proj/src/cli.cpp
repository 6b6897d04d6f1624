#include "spdmeans/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "spdmeans/binary_means.hpp"
#include "spdmeans/errors.hpp"
#include "spdmeans/io.hpp"
#include "spdmeans/multi_means.hpp"
#include "spdmeans/scalar_means.hpp"
#include "spdmeans/spd_core.hpp"
#include "spdmeans/stochastic.hpp"

namespace spdmeans::cli {

using nlohmann::json;

namespace {

const std::vector<RegistryEntry>& registry() {
  using C = Command;
  static const std::vector<RegistryEntry> entries{
      {"arithmetic", false, {C::scalar, C::pair, C::multi, C::bench}, "arithmetic mean"},
      {"geometric", false, {C::scalar, C::pair, C::bench}, "geometric mean (closed form)"},
      {"harmonic", false, {C::scalar, C::pair, C::multi, C::bench}, "harmonic mean"},
      {"power", true, {C::scalar, C::bench}, "scalar power mean M_p"},
      {"agm", false, {C::scalar}, "arithmetic-geometric mean iteration"},
      {"ahm", false, {C::scalar, C::pair}, "arithmetic-harmonic mean iteration"},
      {"lem", false, {C::pair, C::multi}, "log-Euclidean mean"},
      {"qpower", true, {C::pair}, "matrix power mean ((X^p+Y^p)/2)^(1/p)"},
      {"limpalfia", true, {C::pair}, "matrix power mean solving M = M#_pX/2 + M#_pY/2"},
      {"karcher", false, {C::multi, C::bench}, "Karcher mean by fixed-point refinement"},
      {"holbrook", false, {C::multi, C::bench}, "cyclic inductive geometric mean"},
      {"circumcenter", false, {C::multi}, "Riemannian minimax center"},
      {"median", false, {C::multi}, "Riemannian median (cyclic proximal scheme)"},
      {"alm", false, {C::multi}, "Ando-Li-Mathias recursive mean"},
      {"bmp", false, {C::multi}, "Bini-Meini-Poloni recursive mean"},
  };
  return entries;
}

const RegistryEntry* find_entry(std::string_view name) {
  for (const auto& e : registry())
    if (e.name == name) return &e;
  return nullptr;
}

struct Outcome {
  std::optional<double> scalar;
  std::optional<SpdMatrix> matrix;
  ConvergenceTrace trace;
};

ConvergenceTrace closed_form_trace() {
  ConvergenceTrace t;
  t.finish(true);
  return t;
}

void write_trace(const std::string& path, const ConvergenceTrace& trace) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write trace file " + path);
  const bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  f << (csv ? trace_to_csv(trace) : trace_to_json(trace) + "\n");
}

MatrixTuple load_inputs(const MeanRequest& r) {
  if (r.input_path && r.inline_set)
    throw InputError("give either --input or --inline, not both");
  if (r.input_path) return read_matrix_set(*r.input_path);
  if (r.inline_set) return parse_matrix_set(*r.inline_set);
  throw InputError("this command needs a matrix set (--input FILE or --inline JSON)");
}

WeightVector weights_for(const MeanRequest& r, std::size_t n) {
  if (r.weights.empty()) return WeightVector::uniform(n);
  if (r.weights.size() != n)
    throw InputError("--weights has " + std::to_string(r.weights.size()) +
                     " entries for " + std::to_string(n) + " matrices");
  try {
    return WeightVector(r.weights);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

Outcome run_scalar(const MeanRequest& r, const MeanKind& kind) {
  if (!r.x || !r.y) throw InputError("scalar: --x and --y are required");
  const double x = *r.x;
  const double y = *r.y;
  if (kind.name == "arithmetic")
    return {pythagorean_mean(PythagoreanKind::arithmetic, x, y), {}, closed_form_trace()};
  if (kind.name == "geometric")
    return {pythagorean_mean(PythagoreanKind::geometric, x, y), {}, closed_form_trace()};
  if (kind.name == "harmonic")
    return {pythagorean_mean(PythagoreanKind::harmonic, x, y), {}, closed_form_trace()};
  if (kind.name == "power") return {power_mean(*kind.parameter, x, y), {}, closed_form_trace()};
  const DoubleSequenceSpec spec =
      kind.name == "agm"
          ? DoubleSequenceSpec([](double a, double b) { return 0.5 * (a + b); },
                               [](double a, double b) { return std::sqrt(a) * std::sqrt(b); },
                               r.tolerance, r.max_iterations.value_or(64))
          : DoubleSequenceSpec([](double a, double b) { return 0.5 * (a + b); },
                               [](double a, double b) { return 2.0 * a * b / (a + b); },
                               r.tolerance, r.max_iterations.value_or(64));
  auto res = double_sequence(spec, x, y);
  return {res.value, {}, std::move(res.trace)};
}

Outcome run_pair(const MeanRequest& r, const MeanKind& kind) {
  const MatrixTuple set = load_inputs(r);
  if (set.size() != 2)
    throw InputError("pair: expected exactly 2 matrices, got " + std::to_string(set.size()));
  const SpdMatrix& x = set[0];
  const SpdMatrix& y = set[1];
  const auto& k = kind.name;
  if (k == "arithmetic")
    return {{}, weighted_arithmetic(set.view(), weights_for(r, 2)), closed_form_trace()};
  if (k == "harmonic")
    return {{}, weighted_harmonic(set.view(), weights_for(r, 2)), closed_form_trace()};
  if (k == "geometric") return {{}, geometric_mean(x, y), closed_form_trace()};
  if (k == "lem")
    return {{}, log_euclidean_mean(set.view(), weights_for(r, 2)), closed_form_trace()};
  if (k == "qpower") return {{}, q_power_mean(x, y, *kind.parameter), closed_form_trace()};
  if (k == "limpalfia")
    return {{}, lim_palfia_power_mean(x, y, *kind.parameter), closed_form_trace()};
  // ahm
  auto res = ahm_iteration(x, y, r.tolerance, r.max_iterations.value_or(kAhmMaxIterations));
  return {{}, std::move(res.value), std::move(res.trace)};
}

Outcome run_multi(const MeanRequest& r, const MeanKind& kind) {
  const MatrixTuple set = load_inputs(r);
  const auto& k = kind.name;
  if (k == "arithmetic")
    return {{}, weighted_arithmetic(set.view(), weights_for(r, set.size())), closed_form_trace()};
  if (k == "harmonic")
    return {{}, weighted_harmonic(set.view(), weights_for(r, set.size())), closed_form_trace()};
  if (k == "lem")
    return {{}, log_euclidean_mean(set.view(), weights_for(r, set.size())), closed_form_trace()};
  if (k == "karcher") {
    const WeightVector w = weights_for(r, set.size());
    const SpdMatrix start = weighted_arithmetic(set.view(), w);
    auto res = karcher_refine(start, set, w, r.tolerance,
                              r.max_iterations.value_or(kKarcherMaxIterations));
    return {{}, std::move(res.value), std::move(res.trace)};
  }
  if (k == "holbrook") {
    const int steps = r.max_iterations.value_or(10000);
    if (set.size() > 1 && steps < static_cast<int>(set.size()))
      throw InputError("holbrook: --max-iterations must be at least the number of matrices");
    auto res = holbrook_inductive_mean(set, steps);
    return {{}, std::move(res.value), std::move(res.trace)};
  }
  if (k == "circumcenter") {
    auto res = riemannian_circumcenter(set, r.max_iterations.value_or(kCircumcenterSteps));
    return {{}, std::move(res.value), std::move(res.trace)};
  }
  if (k == "median") {
    auto res = bacak_median(set, default_lambda, r.max_iterations.value_or(kMedianSweeps));
    return {{}, std::move(res.value), std::move(res.trace)};
  }
  // alm / bmp
  if (set.size() == 1) {
    ConvergenceTrace t;
    t.record(0, 0.0);
    t.finish(true);
    return {{}, set[0], std::move(t)};
  }
  const auto params = k == "alm" ? RecursiveMeanParams::alm(set.size())
                                 : RecursiveMeanParams::bmp(set.size());
  auto res = recursive_geometric_mean(set, params, r.tolerance,
                                      r.max_iterations.value_or(kRecursiveMaxRounds));
  return {{}, std::move(res.value), std::move(res.trace)};
}

std::string format_human(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

void emit(const MeanRequest& r, const MeanKind& kind, const Outcome& o,
          std::ostream& out) {
  switch (r.output) {
    case OutputFormat::human:
      if (o.scalar) {
        out << format_human(*o.scalar) << "\n";
      } else {
        const auto& m = o.matrix->matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
          for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << (j ? " " : "") << format_human(m(i, j));
          out << "\n";
        }
      }
      break;
    case OutputFormat::csv: {
      std::ostringstream s;
      s << std::setprecision(17);
      if (o.scalar) {
        s << *o.scalar << "\n";
      } else {
        const auto& m = o.matrix->matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
          for (Eigen::Index j = 0; j < m.cols(); ++j) s << (j ? "," : "") << m(i, j);
          s << "\n";
        }
      }
      out << s.str();
      break;
    }
    case OutputFormat::json: {
      json doc{{"command", std::string(command_name(r.command))},
               {"kind", kind.name},
               {"converged", o.trace.converged()},
               {"iterations", o.trace.iterations_used()}};
      if (kind.parameter) doc["parameter"] = *kind.parameter;
      if (o.trace.order_estimate()) doc["order_estimate"] = *o.trace.order_estimate();
      if (o.scalar) {
        doc["result"] = *o.scalar;
      } else {
        const auto& m = o.matrix->matrix();
        json entries = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i)
          for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(m(i, j));
        doc["d"] = m.rows();
        doc["result"] = std::move(entries);
      }
      out << doc.dump() << "\n";
      break;
    }
  }
}

int run_sample(const MeanRequest& r, std::ostream& out) {
  SampleConfig cfg;
  cfg.seed = r.seed;
  cfg.dimension = r.dimension;
  cfg.scale = r.sigma;
  cfg.count = r.count;
  if (r.input_path || r.inline_set) {
    const MatrixTuple c = load_inputs(r);
    cfg.center = c[0];
    cfg.dimension = c.dim();
  }
  const auto samples = sample_spd(cfg);
  out << serialize_matrix_set(samples) << "\n";
  return kExitOk;
}

int run_bench(const MeanRequest& r, const MeanKind& kind, std::ostream& out) {
  if (kind.name == "karcher" || kind.name == "holbrook") {
    SampleConfig cfg;
    cfg.seed = r.seed;
    cfg.dimension = r.dimension;
    cfg.scale = r.sigma;
    cfg.count = r.count;
    const SpdMatrix center = SpdMatrix::identity(r.dimension);
    cfg.center = center;
    const auto samples = sample_spd(cfg);
    auto res = inductive_expectation(shuffled(samples, r.seed), center);
    json checkpoints = json::array();
    for (const auto& e : res.trace.entries())
      checkpoints.push_back({{"n", e.step}, {"distance", e.error}});
    const MatrixTuple tuple(samples);
    // The empirical variance at the sample's own Karcher mean need not equal
    // the one at the true center, so both are reported.
    const SpdMatrix estimate =
        karcher_refine(res.value, tuple, WeightVector::uniform(tuple.size()), 1e-12).value;
    json doc{{"experiment", "lln"},
             {"seed", r.seed},
             {"dimension", r.dimension},
             {"sigma", r.sigma},
             {"count", r.count},
             {"checkpoints", std::move(checkpoints)},
             {"variance_at_center", spd_variance(samples, center)},
             {"variance_at_karcher_estimate", spd_variance(samples, estimate)},
             {"karcher_residual_at_center", karcher_residual(center, tuple)}};
    out << doc.dump() << "\n";
    return kExitOk;
  }
  double p = 0.0;
  if (kind.name == "arithmetic") p = 1.0;
  if (kind.name == "harmonic") p = -1.0;
  if (kind.name == "power") p = *kind.parameter;
  const auto report = qa_expectation_experiment(
      power_generator(p), Distribution::lognormal(r.mu, r.log_sd), r.count, r.trials, r.seed);
  out << report_to_json(report) << "\n";
  return kExitOk;
}

}  // namespace

std::span<const RegistryEntry> mean_registry() { return registry(); }

std::string_view command_name(Command c) {
  switch (c) {
    case Command::scalar: return "scalar";
    case Command::pair: return "pair";
    case Command::multi: return "multi";
    case Command::sample: return "sample";
    case Command::bench: return "bench";
  }
  return "?";
}

std::string registry_listing() {
  std::ostringstream s;
  for (const auto& e : registry()) {
    s << std::left << std::setw(14) << (std::string(e.name) + (e.parameterized ? ":p" : ""))
      << " [";
    for (std::size_t i = 0; i < e.commands.size(); ++i)
      s << (i ? "," : "") << command_name(e.commands[i]);
    s << "]  " << e.summary << "\n";
  }
  return s.str();
}

MeanKind parse_kind(std::string_view text) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  const RegistryEntry* entry = find_entry(name);
  if (!entry)
    throw InputError("unknown kind '" + std::string(text) + "'; registered kinds:\n" +
                     registry_listing());
  MeanKind kind{name, std::nullopt};
  if (colon == std::string_view::npos) {
    if (entry->parameterized)
      throw InputError("kind '" + name + "' needs a parameter, e.g. " + name + ":0.5");
    return kind;
  }
  if (!entry->parameterized)
    throw InputError("kind '" + name + "' takes no parameter");
  const std::string arg(text.substr(colon + 1));
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(arg, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != arg.size() || !std::isfinite(value))
    throw InputError("kind '" + name + "': cannot parse parameter '" + arg + "'");
  kind.parameter = value;
  return kind;
}

int run(const MeanRequest& request, std::ostream& out, std::ostream& err) {
  try {
    if (!(request.tolerance > 0.0)) throw InputError("--tol must be positive");
    if (request.max_iterations && *request.max_iterations < 1)
      throw InputError("--max-iterations must be >= 1");
    if (request.command == Command::sample) return run_sample(request, out);

    const MeanKind kind = parse_kind(request.kind);
    const auto& cmds = find_entry(kind.name)->commands;
    if (std::find(cmds.begin(), cmds.end(), request.command) == cmds.end())
      throw InputError("kind '" + kind.name + "' is not available for command '" +
                       std::string(command_name(request.command)) + "'; registered kinds:\n" +
                       registry_listing());
    if (request.command == Command::bench) return run_bench(request, kind, out);

    Outcome outcome;
    switch (request.command) {
      case Command::scalar: outcome = run_scalar(request, kind); break;
      case Command::pair: outcome = run_pair(request, kind); break;
      default: outcome = run_multi(request, kind); break;
    }
    emit(request, kind, outcome, out);
    if (request.trace_path) write_trace(*request.trace_path, outcome.trace);
    return kExitOk;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    try {
      if (request.trace_path) write_trace(*request.trace_path, e.trace());
    } catch (const std::exception& io) {
      err << "error: " << io.what() << "\n";
    }
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace spdmeans::cli
