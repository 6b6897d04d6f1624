#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "../support/random_spd.hpp"
#include "spdmeans/cli.hpp"
#include "spdmeans/errors.hpp"
#include "spdmeans/io.hpp"

using namespace spdmeans;
using nlohmann::json;
using doctest::Approx;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(const cli::MeanRequest& req) {
  std::ostringstream out, err;
  const int code = cli::run(req, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("spdmeans_unit_" + name);
}

}  // namespace

TEST_CASE("matrix-set parsing") {
  auto two = parse_matrix_set(R"({"d":1,"matrices":[[4],[9]]})");
  REQUIRE(two.size() == 2);
  CHECK(two[1].matrix()(0, 0) == 9.0);
  auto id = parse_matrix_set(R"({"d":2,"matrices":[[1,0,0,1]]})");
  CHECK(id[0].matrix() == Eigen::MatrixXd::Identity(2, 2));

  try {
    parse_matrix_set(R"({"d":2,"matrices":[[1,0,0,1],[1,2,2,1]]})");
    FAIL("accepted an indefinite matrix");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("matrix 1") != std::string::npos);
    CHECK(msg.find("minimum eigenvalue -1") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(parse_matrix_set(R"({"d":2,"matrices":[[1,0.5,0,1]]})"),
                       doctest::Contains("matrix 0: not symmetric"), InputError);
  CHECK_THROWS_WITH_AS(parse_matrix_set(R"({"d":2,"matrices":[[1,0,1]]})"),
                       doctest::Contains("expected 4 row-major entries"), InputError);
  CHECK_THROWS_AS(parse_matrix_set("{not json"), InputError);
  CHECK_THROWS_AS(parse_matrix_set(R"({"d":0,"matrices":[[1]]})"), InputError);
  CHECK_THROWS_AS(parse_matrix_set(R"({"d":1,"matrices":[]})"), InputError);
  CHECK_THROWS_AS(parse_matrix_set(R"({"d":1,"matrices":[["a"]]})"), InputError);
  CHECK_THROWS_AS(read_matrix_set("/nonexistent/set.json"), InputError);
}

TEST_CASE("serialization round-trips exactly") {
  std::mt19937_64 rng(50);
  for (int d = 1; d <= 6; ++d) {
    std::vector<SpdMatrix> ps;
    for (int k = 0; k < 3; ++k) ps.push_back(spdmeans::testing::random_spd(rng, d, 3.0));
    const auto back = parse_matrix_set(serialize_matrix_set(ps));
    REQUIRE(back.size() == ps.size());
    for (std::size_t k = 0; k < ps.size(); ++k) CHECK(back[k].matrix() == ps[k].matrix());
  }
}

TEST_CASE("trace serialization") {
  ConvergenceTrace t;
  for (int k = 0; k < 5; ++k) t.record(k, std::pow(10.0, -std::pow(2.0, k)));
  t.set_iterations_used(4);
  t.finish(true);
  const auto doc = json::parse(trace_to_json(t));
  CHECK(doc["converged"] == true);
  CHECK(doc["steps"].size() == 5);
  CHECK(doc["steps"][2]["t"] == 2);
  CHECK(doc["steps"][2]["error"].get<double>() == Approx(1e-4));
  CHECK(doc["order_estimate"].get<double>() == Approx(2.0));

  ConvergenceTrace short_trace;
  short_trace.record(0, 1.0);
  short_trace.finish(false);
  CHECK(json::parse(trace_to_json(short_trace))["order_estimate"].is_null());

  const auto csv = trace_to_csv(t);
  CHECK(csv.rfind("# converged=true,order_estimate=", 0) == 0);
  CHECK(csv.find("\nt,error\n0,0.10000000000000001\n") != std::string::npos);
}

TEST_CASE("kind parsing") {
  CHECK(cli::parse_kind("agm").name == "agm");
  CHECK_FALSE(cli::parse_kind("agm").parameter.has_value());
  CHECK(*cli::parse_kind("power:-1").parameter == -1.0);
  CHECK(*cli::parse_kind("limpalfia:0.5").parameter == 0.5);
  CHECK_THROWS_AS(cli::parse_kind("nope"), InputError);
  CHECK_THROWS_AS(cli::parse_kind("power"), InputError);
  CHECK_THROWS_AS(cli::parse_kind("agm:2"), InputError);
  CHECK_THROWS_AS(cli::parse_kind("power:x"), InputError);
  CHECK(cli::mean_registry().size() == 15);
  CHECK(cli::registry_listing().find("circumcenter") != std::string::npos);
}

TEST_CASE("cli dispatch and exit codes") {
  cli::MeanRequest pair;
  pair.command = cli::Command::pair;
  pair.kind = "ahm";
  pair.inline_set = R"({"d":1,"matrices":[[4],[9]]})";
  auto r = run_cli(pair);
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "6\n");

  cli::MeanRequest scalar;
  scalar.command = cli::Command::scalar;
  scalar.kind = "agm";
  scalar.x = 1;
  scalar.y = 1;
  r = run_cli(scalar);
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "1\n");

  scalar.kind = "power:2";
  scalar.x = 3;
  scalar.y = 4;
  scalar.output = cli::OutputFormat::json;
  r = run_cli(scalar);
  CHECK(json::parse(r.out)["result"].get<double>() == Approx(std::sqrt(12.5)));

  cli::MeanRequest multi;
  multi.command = cli::Command::multi;
  multi.kind = "karcher";
  multi.inline_set = R"({"d":2,"matrices":[[2,1,1,2],[1,0,0,3],[5,0,0,1]]})";
  multi.max_iterations = 1;
  multi.trace_path = temp_path("karcher_trace.json").string();
  r = run_cli(multi);
  CHECK(r.code == cli::kExitNonConvergence);
  std::ifstream trace_in(*multi.trace_path);
  const auto trace = json::parse(trace_in);
  CHECK(trace["converged"] == false);
  CHECK(trace["steps"].size() >= 1);

  multi.max_iterations.reset();
  r = run_cli(multi);
  CHECK(r.code == cli::kExitOk);

  // Input errors.
  cli::MeanRequest bad = pair;
  bad.kind = "unknown";
  r = run_cli(bad);
  CHECK(r.code == cli::kExitInputError);
  CHECK(r.err.find("registered kinds") != std::string::npos);

  bad = pair;
  bad.kind = "karcher";  // not a pair kind
  CHECK(run_cli(bad).code == cli::kExitInputError);

  bad = pair;
  bad.inline_set = R"({"d":2,"matrices":[[1,2,2,1],[1,0,0,1]]})";
  r = run_cli(bad);
  CHECK(r.code == cli::kExitInputError);
  CHECK(r.err.find("matrix 0: not positive definite (minimum eigenvalue -1") !=
        std::string::npos);

  bad = pair;
  bad.inline_set = R"({"d":1,"matrices":[[4],[9],[2]]})";
  CHECK(run_cli(bad).code == cli::kExitInputError);

  bad = pair;
  bad.tolerance = -1;
  CHECK(run_cli(bad).code == cli::kExitInputError);

  bad = scalar;
  bad.x.reset();
  CHECK(run_cli(bad).code == cli::kExitInputError);
}

TEST_CASE("cli sample output parses back") {
  cli::MeanRequest sample;
  sample.command = cli::Command::sample;
  sample.dimension = 3;
  sample.count = 5;
  sample.seed = 11;
  sample.output = cli::OutputFormat::json;
  const auto r = run_cli(sample);
  REQUIRE(r.code == cli::kExitOk);
  const auto set = parse_matrix_set(r.out);
  CHECK(set.size() == 5);
  CHECK(run_cli(sample).out == r.out);
}
