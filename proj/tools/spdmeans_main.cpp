#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "spdmeans/cli.hpp"

using spdmeans::cli::Command;
using spdmeans::cli::MeanRequest;
using spdmeans::cli::OutputFormat;

namespace {

// Options shared by every subcommand. Precedence: flag > SPDMEANS_* > default.
void add_common(CLI::App& app, MeanRequest& req, std::optional<int>& max_iter) {
  app.add_option("--kind,-k", req.kind, "mean kind (see --list)");
  app.add_option("--tol", req.tolerance, "convergence tolerance")
      ->envname("SPDMEANS_TOL")
      ->capture_default_str();
  app.add_option("--max-iterations", max_iter, "iteration / step / sweep budget")
      ->envname("SPDMEANS_MAX_ITERS");
  app.add_option("--seed", req.seed, "random seed")
      ->envname("SPDMEANS_SEED")
      ->capture_default_str();
  const std::map<std::string, OutputFormat> formats{
      {"human", OutputFormat::human}, {"json", OutputFormat::json}, {"csv", OutputFormat::csv}};
  app.add_option("--output,-o", req.output, "human | json | csv")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  app.add_option("--trace", req.trace_path, "write the convergence trace (.json or .csv)");
}

void add_inputs(CLI::App& app, MeanRequest& req) {
  app.add_option("--input,-i", req.input_path, "matrix-set JSON file");
  app.add_option("--inline", req.inline_set, "matrix-set JSON text");
  app.add_option("--weights", req.weights, "weights, one per matrix")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scalar, complex, and SPD-matrix means by inductive iterations"};
  app.require_subcommand(0, 1);
  bool list = false;
  app.add_flag("--list", list, "list the registered mean kinds");

  MeanRequest req;
  std::optional<int> max_iter;

  auto* scalar = app.add_subcommand("scalar", "mean of two positive reals");
  add_common(*scalar, req, max_iter);
  scalar->add_option("--x", req.x, "first operand");
  scalar->add_option("--y", req.y, "second operand");

  auto* pair = app.add_subcommand("pair", "mean of two SPD matrices");
  add_common(*pair, req, max_iter);
  add_inputs(*pair, req);

  auto* multi = app.add_subcommand("multi", "mean of n SPD matrices");
  add_common(*multi, req, max_iter);
  add_inputs(*multi, req);

  auto* sample = app.add_subcommand("sample", "draw an antithetic SPD sample");
  add_common(*sample, req, max_iter);
  add_inputs(*sample, req);
  sample->add_option("--dim", req.dimension, "matrix dimension")->capture_default_str();
  sample->add_option("--sigma", req.sigma, "tangent standard deviation")->capture_default_str();
  sample->add_option("--count", req.count, "number of samples")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "law-of-large-numbers / CLT experiments");
  add_common(*bench, req, max_iter);
  bench->add_option("--dim", req.dimension, "matrix dimension (karcher/holbrook)")
      ->capture_default_str();
  bench->add_option("--sigma", req.sigma, "tangent standard deviation")->capture_default_str();
  bench->add_option("--count", req.count, "sample size n")->capture_default_str();
  bench->add_option("--mu", req.mu, "lognormal mean of log X")->capture_default_str();
  bench->add_option("--s", req.log_sd, "lognormal sd of log X")->capture_default_str();
  bench->add_option("--trials", req.trials, "independent trials")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : spdmeans::cli::kExitInputError;
  }

  if (list) {
    std::cout << spdmeans::cli::registry_listing();
    return 0;
  }
  if (*scalar) req.command = Command::scalar;
  else if (*pair) req.command = Command::pair;
  else if (*multi) req.command = Command::multi;
  else if (*sample) req.command = Command::sample;
  else if (*bench) req.command = Command::bench;
  else {
    std::cerr << app.help();
    return spdmeans::cli::kExitInputError;
  }
  req.max_iterations = max_iter;
  return spdmeans::cli::run(req, std::cout, std::cerr);
}
