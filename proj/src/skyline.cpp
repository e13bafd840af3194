#include "augeig/skyline.hpp"

#include <algorithm>
#include <cmath>

#include "augeig/errors.hpp"
#include "augeig/multivector.hpp"
#include "augeig/sparse.hpp"

namespace augeig {

SkylineCholesky::SkylineCholesky(const SparseMatrix& a) {
    if (!factor(a)) throw IndefiniteError("SkylineCholesky: matrix is not positive definite");
}

std::unique_ptr<SkylineCholesky> SkylineCholesky::try_factor(const SparseMatrix& a) {
    std::unique_ptr<SkylineCholesky> f(new SkylineCholesky());
    if (!f->factor(a)) return nullptr;
    return f;
}

bool SkylineCholesky::factor(const SparseMatrix& a) {
    if (a.nrows != a.ncols) throw DimensionError("SkylineCholesky: matrix not square");
    n_ = a.nrows;
    first_col_.assign(n_, 0);
    // Profile must cover the union of the lower triangles of A and A^T so
    // unsymmetric storage of a symmetric matrix still factors correctly.
    for (int i = 0; i < n_; ++i) {
        int fc = i;
        for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            fc = std::min(fc, a.col_indices[p]);
        first_col_[i] = fc;
    }
    for (int i = 0; i < n_; ++i)
        for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            const int j = a.col_indices[p];
            if (j > i) first_col_[j] = std::min(first_col_[j], i);
        }
    row_start_.assign(n_ + 1, 0);
    for (int i = 0; i < n_; ++i) row_start_[i + 1] = row_start_[i] + (i - first_col_[i] + 1);
    l_.assign(static_cast<size_t>(row_start_[n_]), 0.0);

    auto entry = [&](int i, int j) -> double& { return l_[row_start_[i] + (j - first_col_[i])]; };

    for (int i = 0; i < n_; ++i)
        for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            const int j = a.col_indices[p];
            if (j <= i) entry(i, j) = a.values[p];
        }

    for (int i = 0; i < n_; ++i) {
        const int fi = first_col_[i];
        for (int j = fi; j < i; ++j) {
            double s = entry(i, j);
            const int fj = first_col_[j];
            const int k0 = std::max(fi, fj);
            for (int k = k0; k < j; ++k) s -= entry(i, k) * entry(j, k);
            entry(i, j) = s / entry(j, j);
        }
        double d = entry(i, i);
        for (int k = fi; k < i; ++k) d -= entry(i, k) * entry(i, k);
        if (!(d > 0.0)) return false;
        entry(i, i) = std::sqrt(d);
    }
    return true;
}

void SkylineCholesky::solve_in_place(MultiVector& x) const {
    if (x.dim != n_) throw DimensionError("SkylineCholesky::solve: dimension mismatch");
    for (int c = 0; c < x.width; ++c) {
        double* v = x.col(c);
        for (int i = 0; i < n_; ++i) {
            double s = v[i];
            const double* row = l_.data() + row_start_[i];
            const int fi = first_col_[i];
            for (int k = fi; k < i; ++k) s -= row[k - fi] * v[k];
            v[i] = s / row[i - fi];
        }
        for (int i = n_ - 1; i >= 0; --i) {
            const double* row = l_.data() + row_start_[i];
            const int fi = first_col_[i];
            const double xi = v[i] / row[i - fi];
            v[i] = xi;
            for (int k = fi; k < i; ++k) v[k] -= row[k - fi] * xi;
        }
    }
}

MultiVector SkylineCholesky::solve(const MultiVector& b) const {
    MultiVector x = b;
    solve_in_place(x);
    return x;
}

}  // namespace augeig
