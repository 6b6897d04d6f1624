#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "spdmeans/convergence.hpp"
#include "spdmeans/multi_means.hpp"
#include "spdmeans/stochastic.hpp"

namespace spdmeans {

/// Malformed or invalid user input (files, flags).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses {"d": int, "matrices": [[row-major entries], ...]}. Each matrix must
/// be symmetric to 1e-12 relative and positive definite; failures name the
/// matrix index.
MatrixTuple parse_matrix_set(std::string_view json_text);
MatrixTuple read_matrix_set(const std::filesystem::path& path);

/// Inverse of parse_matrix_set. Doubles use the shortest representation that
/// round-trips exactly.
std::string serialize_matrix_set(std::span<const SpdMatrix> matrices);

/// {"steps":[{"t":..,"error":..}],"order_estimate":..|null,"converged":..}
std::string trace_to_json(const ConvergenceTrace& trace);
/// Header "t,error", then one row per step. Order estimate and convergence
/// flag go in a leading "#" comment line.
std::string trace_to_csv(const ConvergenceTrace& trace);

std::string report_to_json(const QaExperimentReport& report);

}  // namespace spdmeans
