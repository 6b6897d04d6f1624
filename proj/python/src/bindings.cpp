#include <optional>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spdmeans/binary_means.hpp"
#include "spdmeans/errors.hpp"
#include "spdmeans/io.hpp"
#include "spdmeans/multi_means.hpp"
#include "spdmeans/scalar_means.hpp"
#include "spdmeans/spd_core.hpp"
#include "spdmeans/stochastic.hpp"

namespace py = pybind11;
using namespace spdmeans;

namespace {

// Matrices cross the boundary as dense float64 arrays; validation happens in
// the SpdMatrix constructor.
SpdMatrix spd(const Eigen::MatrixXd& m) { return SpdMatrix(m); }

MatrixTuple tuple(const std::vector<Eigen::MatrixXd>& ms) {
  std::vector<SpdMatrix> v;
  v.reserve(ms.size());
  for (const auto& m : ms) v.push_back(spd(m));
  return MatrixTuple(std::move(v));
}

WeightVector weights_or_uniform(const std::optional<std::vector<double>>& w, std::size_t n) {
  return w ? WeightVector(*w) : WeightVector::uniform(n);
}

py::tuple with_trace(const MatrixMeanResult& r) {
  return py::make_tuple<py::return_value_policy::copy>(r.value.matrix(), r.trace);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Scalar, complex and SPD-matrix means by inductive iterations";

  auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  auto numeric = py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  // Registered after their bases so the more specific class wins.
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", numeric.ptr());
  py::register_exception<NotPositiveDefiniteError>(m, "NotPositiveDefiniteError", domain.ptr());
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<ConvergenceTrace>(m, "Trace")
      .def_property_readonly("steps",
                             [](const ConvergenceTrace& t) {
                               std::vector<int> s;
                               for (const auto& e : t.entries()) s.push_back(e.step);
                               return s;
                             })
      .def_property_readonly("errors", &ConvergenceTrace::errors)
      .def_property_readonly("converged", &ConvergenceTrace::converged)
      .def_property_readonly("iterations_used", &ConvergenceTrace::iterations_used)
      .def_property_readonly("order_estimate", &ConvergenceTrace::order_estimate)
      .def("__len__", &ConvergenceTrace::size)
      .def("__repr__", [](const ConvergenceTrace& t) {
        return "<Trace steps=" + std::to_string(t.size()) +
               " converged=" + (t.converged() ? "True" : "False") + ">";
      });

  // Scalars.
  m.def("agm", [](double x, double y) {
    auto r = agm(x, y);
    return py::make_tuple<py::return_value_policy::copy>(r.value, r.trace);
  }, py::arg("x"), py::arg("y"), "Arithmetic-geometric mean and its trace.");
  m.def("ahm", [](double x, double y) {
    auto r = ahm(x, y);
    return py::make_tuple<py::return_value_policy::copy>(r.value, r.trace);
  }, py::arg("x"), py::arg("y"), "Arithmetic-harmonic mean and its trace.");
  m.def("power_mean", &power_mean, py::arg("p"), py::arg("x"), py::arg("y"));
  m.def("elliptic_k", &elliptic_k, py::arg("u"), "Complete elliptic integral of the first kind.");
  m.def("complex_ahm", [](std::complex<double> z1, std::complex<double> z2) {
    auto r = complex_ahm(ComplexPolar::from_complex(z1), ComplexPolar::from_complex(z2));
    return py::make_tuple<py::return_value_policy::copy>(r.value.to_complex(), r.trace);
  }, py::arg("z1"), py::arg("z2"));

  // Two matrices.
  m.def("riemannian_distance", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return riemannian_distance(spd(a), spd(b));
  }, py::arg("a"), py::arg("b"));
  m.def("geodesic", [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double t) {
    return geodesic(spd(x), spd(y), t).matrix();
  }, py::arg("x"), py::arg("y"), py::arg("t"));
  m.def("geometric_mean", [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return geometric_mean(spd(x), spd(y)).matrix();
  }, py::arg("x"), py::arg("y"));
  m.def("ahm_iteration", [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double tol) {
    return with_trace(ahm_iteration(spd(x), spd(y), tol));
  }, py::arg("x"), py::arg("y"), py::arg("tol") = kAhmTolerance);
  m.def("s_divergence", [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return s_divergence(spd(x), spd(y));
  }, py::arg("x"), py::arg("y"));
  m.def("log_euclidean_mean",
        [](const std::vector<Eigen::MatrixXd>& ms, std::optional<std::vector<double>> w) {
          const auto ps = tuple(ms);
          return log_euclidean_mean(ps.view(), weights_or_uniform(w, ps.size())).matrix();
        },
        py::arg("matrices"), py::arg("weights") = py::none());
  m.def("power_mean_matrix", [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double p) {
    return lim_palfia_power_mean(spd(x), spd(y), p).matrix();
  }, py::arg("x"), py::arg("y"), py::arg("p"),
  "Solution of M = M #_p X / 2 + M #_p Y / 2 for p in (0, 1].");

  // n matrices.
  m.def("karcher_mean",
        [](const std::vector<Eigen::MatrixXd>& ms, std::optional<std::vector<double>> w,
           double tol) {
          const auto ps = tuple(ms);
          return with_trace(karcher_refine(ps[0], ps, weights_or_uniform(w, ps.size()), tol));
        },
        py::arg("matrices"), py::arg("weights") = py::none(), py::arg("tol") = 1e-12);
  m.def("karcher_residual", [](const Eigen::MatrixXd& g, const std::vector<Eigen::MatrixXd>& ms) {
    return karcher_residual(spd(g), tuple(ms));
  }, py::arg("g"), py::arg("matrices"));
  m.def("holbrook_mean", [](const std::vector<Eigen::MatrixXd>& ms, int steps) {
    return with_trace(holbrook_inductive_mean(tuple(ms), steps));
  }, py::arg("matrices"), py::arg("steps"));
  m.def("circumcenter", [](const std::vector<Eigen::MatrixXd>& ms, int steps) {
    return with_trace(riemannian_circumcenter(tuple(ms), steps));
  }, py::arg("matrices"), py::arg("steps") = kCircumcenterSteps);
  m.def("median", [](const std::vector<Eigen::MatrixXd>& ms, int sweeps) {
    return with_trace(bacak_median(tuple(ms), default_lambda, sweeps));
  }, py::arg("matrices"), py::arg("sweeps") = kMedianSweeps);
  m.def("bmp_mean", [](const std::vector<Eigen::MatrixXd>& ms, double tol) {
    const auto ps = tuple(ms);
    return with_trace(recursive_geometric_mean(ps, RecursiveMeanParams::bmp(ps.size()), tol));
  }, py::arg("matrices"), py::arg("tol") = 1e-12);
  m.def("alm_mean", [](const std::vector<Eigen::MatrixXd>& ms, double tol) {
    const auto ps = tuple(ms);
    return with_trace(recursive_geometric_mean(ps, RecursiveMeanParams::alm(ps.size()), tol));
  }, py::arg("matrices"), py::arg("tol") = 1e-12);

  // Sampling.
  m.def("sample_spd",
        [](int dimension, int count, double sigma, std::uint64_t seed,
           std::optional<Eigen::MatrixXd> center) {
          SampleConfig cfg{.seed = seed, .dimension = dimension, .scale = sigma, .count = count};
          if (center) cfg.center = spd(*center);
          std::vector<Eigen::MatrixXd> out;
          for (const auto& x : sample_spd(cfg)) out.push_back(x.matrix());
          return out;
        },
        py::arg("dimension"), py::arg("count"), py::arg("sigma"), py::arg("seed") = 0,
        py::arg("center") = py::none());
  m.def("inductive_expectation", [](const std::vector<Eigen::MatrixXd>& ms) {
    return inductive_expectation(tuple(ms).view()).value.matrix();
  }, py::arg("matrices"));
}
