#pragma once

#include <vector>

#include "augeig/block_ops.hpp"
#include "augeig/pencil.hpp"

namespace augeig {

// Block eigensolver over [X, P, W] subspaces: X carries the current
// iterates, P the previous search directions, W the preconditioned
// residual directions from an (inexact) shifted solve.
struct GcgConfig {
    int nev = 1;           // eigenpairs returned
    double tol = 1e-10;    // relative residual |Ax - lambda Bx| / (|lambda| |x|)
    int max_iters = 100;   // outer iterations
    double theta = 0.0;    // interior target (sparse shifted entry point)
    BcgConfig inner;       // W-step conjugate-gradient controls
    double drop_tol = 1e-10;
    bool exact_inner = false;  // solve the W step by factorization when possible
    unsigned long seed = 0x9e3779b9ul;  // deterministic basis completion
};

struct GcgIterRecord {
    double mu = 0.0;          // shift used by the W solve
    int inner_iters = 0;      // conjugate-gradient iterations spent
    double max_residual = 0;  // worst unconverged pair before this sweep
    int locked = 0;           // converged prefix size
};

struct GcgHistory {
    std::vector<GcgIterRecord> iterations;
    std::vector<double> final_residuals;  // per returned pair
    bool converged = false;
    bool exact_inner = false;             // W solves went through a factorization
    bool used_normal_equations = false;   // indefinite interior solve fell back to CGNR
};

template <class Block>
struct GcgOutcome {
    std::vector<double> eigenvalues;
    Block eigenvectors;  // B-orthonormal columns
    GcgHistory history;
};

// Smallest eigenpairs of the composite pencil. x0 (optional) seeds the
// iterate block; missing columns are completed deterministically.
GcgOutcome<AugVec> gcg_aug(const AugmentedPencil& p, const AugVec* x0,
                           const GcgConfig& cfg);

// Interior eigenpairs of a composite pencil whose stiffness side already
// stores A - shift*B (see apply_shift): harmonic projections steer the
// iteration toward the recorded shift; pairs return sorted by distance
// from it. Indefinite inner solves fall back to normal equations.
GcgOutcome<AugVec> gcg_aug_shifted(const AugmentedPencil& p, const AugVec* x0,
                                   const GcgConfig& cfg);

// Same two entry points over a plain sparse pencil (B must be SPD). The
// shifted form targets cfg.theta.
GcgOutcome<MultiVector> gcg_sparse(const SparseMatrix& a, const SparseMatrix& b,
                                   const MultiVector* x0, const GcgConfig& cfg);
GcgOutcome<MultiVector> gcg_sparse_shifted(const SparseMatrix& a, const SparseMatrix& b,
                                           const MultiVector* x0, const GcgConfig& cfg);

// One side combined with a multiple of the other: x + c*y (shared shapes).
AugSide combine_sides(const AugSide& x, double c, const AugSide& y);

}  // namespace augeig
