#pragma once

#include <string>

#include "ratlin/models.hpp"

namespace ratlin {

/// Reads a real Matrix Market file (coordinate or array, general or symmetric).
RMat read_matrix_market(const std::string& path);

/// Writes coordinate real format; symmetric=true stores the lower triangle only.
void write_matrix_market(const std::string& path, const RMat& M, bool symmetric = false);

/// Names accepted for nonlinear terms in a system manifest.
ScalarFunction builtin_function(const std::string& name);

/// Loads a split-form system from a JSON manifest:
///   {"A0": "k.mtx", "A1": "c.mtx", "A2": "m.mtx",
///    "terms": [{"matrix": "kp.mtx", "function": "porous_g1"}, ...]}
/// Paths are relative to the manifest. A1/A2 may be omitted (zero).
SplitFormSystem load_system_matrix_market(const std::string& manifest_path);

}  // namespace ratlin
