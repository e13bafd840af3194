#pragma once

#include <optional>
#include <string>
#include <vector>

#include "augeig/block_ops.hpp"
#include "augeig/gcg.hpp"
#include "augeig/multivector.hpp"
#include "augeig/pencil.hpp"
#include "augeig/sparse.hpp"

namespace augeig {

// Nested pencil pair plus the connecting interpolation (fine_dim x coarse_dim).
struct Hierarchy {
    SparseMatrix a_coarse, b_coarse;
    SparseMatrix a_fine, b_fine;
    SparseMatrix prolong;
};

struct BatchConfig {
    // sizes k_i of the sequential batches; must sum to nev
    std::vector<int> batch_sizes;
    // extra pairs computed beyond each k_i so the wanted ones are captured;
    // defaults to max(2, ceil(k_i/4)) when unset
    std::optional<int> oversample;
};

struct PaseConfig {
    int nev = 1;
    double tol = 1e-8;  // fine-pencil residual criterion
    int max_outer = 30;
    BcgConfig cg;  // pre/post fine-space solves, 40-step cap by default
    PrecondMode precond_mode = PrecondMode::none;
    std::optional<BatchConfig> batch;
    // batch shift = (lam_first - lam_last)/2 instead of the midpoint
    bool batch_shift_minus = false;
    unsigned long seed = 0x5eedUL;
};

struct ConvergenceReport {
    // row l = criterion values after l correction steps (row 0: initial guess)
    std::vector<std::vector<double>> residual_history;
    int outer_iterations = 0;
    // ratio of consecutive worst-case residuals, one entry per correction step
    std::vector<double> contraction_factors;
    std::vector<double> eigenvalues;
    bool converged = false;
    std::vector<std::string> notes;
};

struct PaseResult {
    std::vector<double> eigenvalues;
    MultiVector eigenvectors;
    ConvergenceReport report;
};

struct BatchResult {
    std::vector<double> eigenvalues;
    MultiVector eigenvectors;
    std::vector<ConvergenceReport> reports;  // one per batch
};

// Residual criterion ||A x - lambda B x||_2 / |lambda| on unit-norm columns.
std::vector<double> criterion_residuals(const SparseMatrix& a, const SparseMatrix& b,
                                        const std::vector<double>& lam, const MultiVector& u);
std::vector<bool> check_convergence(const SparseMatrix& a, const SparseMatrix& b,
                                    const std::vector<double>& lam, const MultiVector& u,
                                    double tol);

struct CorrectionOutcome {
    std::vector<double> eigenvalues;
    MultiVector vectors;
};

// One outer pass: fine pre-solve, composite assembly, small augmented
// eigensolve started from the current iterates, combination, fine post-solve.
CorrectionOutcome correction_step(const Hierarchy& h, const std::vector<double>& lam,
                                  const MultiVector& u, const PaseConfig& cfg);

// Full outer iteration from the coarse eigenpairs to the fine criterion.
PaseResult pase_solve(const Hierarchy& h, const PaseConfig& cfg);

// Warm-started variant: iterate from the given fine-space approximations
// instead of the coarse solve (re-solves on refined meshes).
PaseResult pase_solve(const Hierarchy& h, const PaseConfig& cfg,
                      const std::vector<double>& lam0, const MultiVector& u0);

// Midpoint of the coarse eigenvalues bracketing the batch [first, first+count).
double compute_batch_shift(const std::vector<double>& lam_coarse, int first, int count,
                           bool minus = false);

// Indices of the `count` candidate columns whose mass-projection onto the
// span of the appended vectors is largest; ties go to the lower index.
std::vector<int> select_by_component(const AugVec& candidates, const AugmentedPencil& p,
                                     int count);

// Sequential batch scheme: shifted interior solves per batch after the first.
BatchResult batch_solve(const Hierarchy& h, const PaseConfig& cfg);

}  // namespace augeig
