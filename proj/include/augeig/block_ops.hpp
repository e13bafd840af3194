#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "augeig/dense.hpp"
#include "augeig/errors.hpp"
#include "augeig/multivector.hpp"
#include "augeig/sparse.hpp"

// Algorithms over column blocks. A block type provides:
//   block_width(), like_width(w), select_columns(idx), keep_columns(idx),
//   col_dot(j, other, jo), col_scale(j, s), col_axpy(a, src, js, jd),
//   col_assign(src, js, jd), col_zero(j), append_columns(src)
// Operators are functors mapping a block to a block of the same shape.

namespace augeig {

struct SpmvOp {
    const SparseMatrix& m;
    MultiVector operator()(const MultiVector& x) const { return spmv(m, x); }
};

struct EuclideanOp {
    template <class Block>
    Block operator()(const Block& x) const {
        return x;
    }
};

// Modified Gram-Schmidt in the inner product induced by apply_b, with one
// full re-orthogonalization pass. B-images of accepted columns are cached
// so each incoming column costs one operator application. Columns whose
// B-norm drops below drop_tol relative to the largest initial column
// B-norm are removed. When `locked` is given, columns are additionally
// orthogonalized against it (it is assumed B-orthonormal already).
// Returns the number of kept columns; v is compacted in place.
template <class Block, class ApplyB>
int mgs_b_orthonormalize(Block& v, ApplyB&& apply_b, double drop_tol,
                         const Block* locked = nullptr) {
    const int w = v.block_width();
    if (w == 0) return 0;

    Block bv_all = apply_b(v);
    double max_norm0 = 0.0;
    for (int j = 0; j < w; ++j) {
        double n2 = v.col_dot(j, bv_all, j);
        if (n2 > 0.0) max_norm0 = std::max(max_norm0, std::sqrt(n2));
    }
    if (max_norm0 == 0.0) {
        v.keep_columns({});
        return 0;
    }
    const double thresh = drop_tol * max_norm0;

    Block b_locked = locked ? apply_b(*locked) : v.like_width(0);
    const int nl = locked ? locked->block_width() : 0;

    Block kept = v.like_width(0);
    Block b_kept = v.like_width(0);
    for (int j = 0; j < w; ++j) {
        Block col = v.select_columns({j});
        Block bcol = bv_all.select_columns({j});
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < nl; ++i) {
                double c = col.col_dot(0, b_locked, i);
                col.col_axpy(-c, *locked, i, 0);
                bcol.col_axpy(-c, b_locked, i, 0);
            }
            for (int i = 0; i < kept.block_width(); ++i) {
                double c = col.col_dot(0, b_kept, i);
                col.col_axpy(-c, kept, i, 0);
                bcol.col_axpy(-c, b_kept, i, 0);
            }
        }
        double n2 = col.col_dot(0, bcol, 0);
        if (!(n2 > thresh * thresh)) continue;  // dropped (also drops NaN)
        double inv = 1.0 / std::sqrt(n2);
        col.col_scale(0, inv);
        kept.append_columns(col);
        // Refresh the cached image so roundoff does not accumulate.
        b_kept.append_columns(apply_b(col));
    }
    v = std::move(kept);
    return v.block_width();
}

// y = v * c  (column mixing through the block contract)
template <class Block>
Block block_mix(const Block& v, const DenseMatrix& c) {
    if (v.block_width() != c.nrows) throw DimensionError("block_mix: width mismatch");
    Block y = v.like_width(c.ncols);
    for (int j = 0; j < c.ncols; ++j)
        for (int i = 0; i < c.nrows; ++i) {
            const double w = c(i, j);
            if (w != 0.0) y.col_axpy(w, v, i, j);
        }
    return y;
}

// x^T y through the block contract (small widths only)
template <class Block>
DenseMatrix block_gram(const Block& x, const Block& y) {
    DenseMatrix m(x.block_width(), y.block_width());
    for (int i = 0; i < m.nrows; ++i)
        for (int j = 0; j < m.ncols; ++j) m(i, j) = x.col_dot(i, y, j);
    return m;
}

struct BcgConfig {
    int max_iters = 40;
    double rel_tol = 1e-12;
    double shift = 0.0;  // solve (A - shift*B) x = rhs in the sparse overload
};

struct BcgResult {
    int iters = 0;                        // block iterations executed
    std::vector<double> final_residuals;  // per column, relative to ||rhs||
    std::vector<int> column_iters;        // iteration at which each column froze
    bool all_converged = false;
};

// Conjugate gradient on independent columns with one shared operator
// application per iteration. Converged columns freeze (never touched
// again). Zero right-hand sides yield the zero solution immediately.
// Throws IndefiniteError naming the first column whose search direction
// has non-positive curvature.
template <class Op, class Block>
BcgResult block_cg(Op&& apply, const Block& rhs, Block& x, const BcgConfig& cfg) {
    const int w = rhs.block_width();
    BcgResult res;
    res.final_residuals.assign(w, 0.0);
    res.column_iters.assign(w, 0);
    if (w == 0) {
        res.all_converged = true;
        return res;
    }
    if (x.block_width() != w) throw DimensionError("block_cg: x width mismatch");

    Block r = rhs;
    {
        Block ax = apply(x);
        for (int j = 0; j < w; ++j) r.col_axpy(-1.0, ax, j, j);
    }
    std::vector<double> rhs_norm(w), rz(w), target(w);
    std::vector<int> active;
    for (int j = 0; j < w; ++j) {
        rhs_norm[j] = std::sqrt(rhs.col_dot(j, rhs, j));
        if (rhs_norm[j] == 0.0) {
            x.col_zero(j);
            continue;
        }
        rz[j] = r.col_dot(j, r, j);
        target[j] = cfg.rel_tol * rhs_norm[j];
        if (std::sqrt(rz[j]) > target[j]) active.push_back(j);
    }
    Block p = r;

    int it = 0;
    while (!active.empty() && it < cfg.max_iters) {
        ++it;
        Block p_act = p.select_columns(active);
        Block q = apply(p_act);
        std::vector<int> still;
        still.reserve(active.size());
        for (size_t a = 0; a < active.size(); ++a) {
            const int j = active[a];
            const int ia = static_cast<int>(a);
            double p_ap = p_act.col_dot(ia, q, ia);
            if (!(p_ap > 0.0))
                throw IndefiniteError("block_cg: non-positive curvature in column " +
                                      std::to_string(j));
            double alpha = rz[j] / p_ap;
            x.col_axpy(alpha, p_act, ia, j);
            r.col_axpy(-alpha, q, ia, j);
            double rz_new = r.col_dot(j, r, j);
            if (std::sqrt(rz_new) <= target[j]) {
                rz[j] = rz_new;
                res.column_iters[j] = it;
                continue;  // frozen from here on
            }
            double beta = rz_new / rz[j];
            rz[j] = rz_new;
            p.col_scale(j, beta);
            p.col_axpy(1.0, r, j, j);
            still.push_back(j);
        }
        active.swap(still);
    }
    res.iters = it;
    res.all_converged = active.empty();
    for (int j : active) res.column_iters[j] = it;
    for (int j = 0; j < w; ++j)
        res.final_residuals[j] = rhs_norm[j] == 0.0 ? 0.0 : std::sqrt(rz[j]) / rhs_norm[j];
    return res;
}

// Convenience form on sparse operators: solves (A - shift*B) X = RHS.
BcgResult block_cg(const SparseMatrix& a, const SparseMatrix* b, const MultiVector& rhs,
                   MultiVector& x, const BcgConfig& cfg);

}  // namespace augeig
