#pragma once

#include <string>

#include "augeig/pase.hpp"
#include "augeig/runconfig.hpp"

namespace augeig {

// Assemble a hierarchy from Matrix Market files. With no coarse paths the
// coarse pencil is the Galerkin product P^T A P, P^T B P. All matrices
// must be symmetric to 1e-12.
Hierarchy load_pencil(const std::string& a_path, const std::string& b_path,
                      const std::string& p_path, const std::string& coarse_a_path = "",
                      const std::string& coarse_b_path = "");

// Executes the configured mode and writes eigenvalues.csv, history.csv,
// and summary.json into the output directory. Exit codes:
//   0  every requested pair converged (and cross-checks held)
//   1  finished, but a pair missed the criterion or a cross-check failed
//   2  configuration error        3  file/format error
//   4  numerical failure          5  mesh or shape mismatch
//   6  unexpected error
int run(const RunConfig& cfg);

}  // namespace augeig
