#pragma once

#include <memory>
#include <optional>

#include "augeig/dense.hpp"
#include "augeig/multivector.hpp"
#include "augeig/skyline.hpp"
#include "augeig/sparse.hpp"

namespace augeig {

// Vector block over the composite space: a coarse-space part `u` of height
// dim_u plus dense weights `g` (one row per appended fine iterate).
// Implements the column-block contract from block_ops.hpp so the generic
// orthonormalization and CG routines work on it unchanged.
struct AugVec {
    MultiVector u;
    DenseMatrix g;

    AugVec() = default;
    AugVec(int dim_u, int num_appended, int width)
        : u(dim_u, width), g(num_appended, width) {}

    int dim_u() const { return u.dim; }
    int num_appended() const { return g.nrows; }

    int block_width() const { return u.width; }
    AugVec like_width(int w) const;
    AugVec select_columns(const std::vector<int>& idx) const;
    void keep_columns(const std::vector<int>& idx);
    double col_dot(int j, const AugVec& other, int jo) const;
    void col_scale(int j, double s);
    void col_axpy(double alpha, const AugVec& src, int js, int jd);
    void col_assign(const AugVec& src, int js, int jd);
    void col_zero(int j);
    void append_columns(const AugVec& src);
    bool all_finite() const;
};

// One side (stiffness-like or mass-like) of the composite pencil:
//   [ corner    coupling ]
//   [ coupling^T    diag ]
struct AugSide {
    SparseMatrix corner;   // dim_u x dim_u, symmetric
    MultiVector coupling;  // dim_u x k
    DenseMatrix diag;      // k x k, symmetric
    bool decoupled = false;  // coupling is identically zero by construction

    int dim_u() const { return corner.nrows; }
    int num_appended() const { return diag.nrows; }
    int dim_total() const { return dim_u() + num_appended(); }
};

// How the coupling blocks were eliminated (congruence by a corner solve).
// corner_b_a additionally routes inner solves through the exact block
// factorization of the shifted stiffness side.
enum class PrecondMode { none, corner_a, corner_b, corner_b_a };

struct AugmentedPencil {
    AugSide a, b;
    PrecondMode mode = PrecondMode::none;
    double shift = 0.0;  // nonzero once side `a` stores A - shift*B

    int dim_u() const { return a.dim_u(); }
    int num_appended() const { return a.num_appended(); }
    int dim_total() const { return a.dim_total(); }
};

// Builds the composite pencil from coarse matrices, fine matrices, the
// coarse-to-fine prolongation and the current fine iterates (columns of
// u_fine). Rayleigh-quotient corners are symmetrized explicitly.
AugmentedPencil assemble_augmented(const SparseMatrix& a_coarse, const SparseMatrix& b_coarse,
                                   const SparseMatrix& a_fine, const SparseMatrix& b_fine,
                                   const SparseMatrix& prolong, const MultiVector& u_fine);

AugVec aug_matvec(const AugSide& s, const AugVec& x);

// y = (a - mu*b) x over the composite space
struct AugPencilOp {
    const AugmentedPencil& p;
    double mu = 0.0;
    AugVec operator()(const AugVec& x) const;
};

struct AugSideOp {
    const AugSide& s;
    AugVec operator()(const AugVec& x) const { return aug_matvec(s, x); }
};

// In-place spectral shift: side a becomes a - theta*b. Must happen before
// any coupling transform (throws ConfigError otherwise).
void apply_shift(AugmentedPencil& p, double theta);

// Congruence transform eliminating one coupling block. corner_a needs an
// SPD stiffness corner (throws IndefiniteError when the pencil was
// shifted into the spectrum); corner_b / corner_b_a factor the mass
// corner, which stays SPD under any shift.
struct TransformedPencil {
    AugmentedPencil pencil;
    MultiVector hat;  // corner^{-1} coupling of the eliminated side
};

TransformedPencil precond_transform(const AugmentedPencil& p, PrecondMode mode);

// Maps eigenvectors of the transformed pencil back: u <- u - hat*g.
AugVec back_transform(const TransformedPencil& t, const AugVec& x);

// Inverse map, for carrying an initial guess into transformed
// coordinates: u <- u + hat*g.
AugVec forward_transform(const TransformedPencil& t, const AugVec& x);

// Exact solver for an SPD composite matrix via corner factorization and a
// dense Schur complement on the appended block.
class AugFactor {
  public:
    explicit AugFactor(const AugSide& s);  // throws IndefiniteError
    static std::unique_ptr<AugFactor> try_factor(const AugSide& s);

    AugVec solve(const AugVec& r) const;

  private:
    SkylineCholesky corner_;
    MultiVector coupling_;
    MultiVector chat_;  // corner^{-1} coupling
    DenseCholesky schur_;
    bool decoupled_ = false;
};

// Flattened views for dense cross-checks and debug dumps.
SparseMatrix aug_to_csr(const AugSide& s);
DenseMatrix flatten(const AugVec& x);
AugVec unflatten(const DenseMatrix& m, int dim_u);

}  // namespace augeig
