#include "spdmeans/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spdmeans/errors.hpp"

namespace spdmeans {

using nlohmann::json;

MatrixTuple parse_matrix_set(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("matrix set: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("d") || !doc.contains("matrices"))
    throw InputError("matrix set: expected an object with \"d\" and \"matrices\"");
  if (!doc["d"].is_number_integer() || doc["d"].get<long long>() < 1)
    throw InputError("matrix set: \"d\" must be a positive integer");
  const auto d = doc["d"].get<long long>();
  const auto& list = doc["matrices"];
  if (!list.is_array() || list.empty())
    throw InputError("matrix set: \"matrices\" must be a nonempty array");

  std::vector<SpdMatrix> out;
  out.reserve(list.size());
  for (std::size_t idx = 0; idx < list.size(); ++idx) {
    const auto& entries = list[idx];
    const std::string where = "matrix " + std::to_string(idx);
    if (!entries.is_array() || static_cast<long long>(entries.size()) != d * d) {
      std::ostringstream msg;
      msg << where << ": expected " << d * d << " row-major entries for d = " << d;
      throw InputError(msg.str());
    }
    Eigen::MatrixXd m(d, d);
    for (long long i = 0; i < d; ++i) {
      for (long long j = 0; j < d; ++j) {
        const auto& v = entries[i * d + j];
        if (!v.is_number()) throw InputError(where + ": entries must be numbers");
        m(i, j) = v.get<double>();
      }
    }
    if (!m.allFinite()) throw InputError(where + ": entries must be finite");
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) {
      std::ostringstream msg;
      msg << where << ": not symmetric (max asymmetry " << asym << ")";
      throw InputError(msg.str());
    }
    try {
      out.emplace_back(m);
    } catch (const NotPositiveDefiniteError& e) {
      std::ostringstream msg;
      msg << where << ": not positive definite (minimum eigenvalue "
          << e.min_eigenvalue() << ")";
      throw InputError(msg.str());
    }
  }
  return MatrixTuple(std::move(out));
}

MatrixTuple read_matrix_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix set " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix_set(buf.str());
}

std::string serialize_matrix_set(std::span<const SpdMatrix> matrices) {
  if (matrices.empty()) throw ShapeError("serialize_matrix_set: empty list");
  const int d = matrices.front().dim();
  json list = json::array();
  for (const auto& p : matrices) {
    if (p.dim() != d) throw ShapeError("serialize_matrix_set: mixed dimensions");
    json entries = json::array();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) entries.push_back(p.matrix()(i, j));
    list.push_back(std::move(entries));
  }
  return json{{"d", d}, {"matrices", std::move(list)}}.dump();
}

namespace {

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string trace_to_json(const ConvergenceTrace& trace) {
  json steps = json::array();
  for (const auto& e : trace.entries())
    steps.push_back({{"t", e.step}, {"error", finite_or_null(e.error)}});
  json doc{{"steps", std::move(steps)},
           {"order_estimate", optional_number(trace.order_estimate())},
           {"converged", trace.converged()}};
  return doc.dump();
}

std::string trace_to_csv(const ConvergenceTrace& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "# converged=" << (trace.converged() ? "true" : "false") << ",order_estimate=";
  if (trace.order_estimate())
    out << *trace.order_estimate();
  else
    out << "nan";
  out << "\n";
  out << "t,error\n";
  for (const auto& e : trace.entries()) out << e.step << "," << e.error << "\n";
  return out.str();
}

std::string report_to_json(const QaExperimentReport& r) {
  json doc{{"generator", r.generator},
           {"n", r.n},
           {"trials", r.trials},
           {"seed", r.seed},
           {"analytic_expectation", r.analytic_expectation},
           {"first_trial_mean", r.first_trial_mean},
           {"mean_over_trials", r.mean_over_trials},
           {"analytic_clt_variance", r.analytic_clt_variance},
           {"empirical_clt_variance", r.empirical_clt_variance}};
  return doc.dump();
}

}  // namespace spdmeans
