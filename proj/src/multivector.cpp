#include "augeig/multivector.hpp"

#include <cmath>

#include "augeig/block_ops.hpp"
#include "augeig/dense.hpp"
#include "augeig/errors.hpp"
#include "augeig/sparse.hpp"

namespace augeig {

double MultiVector::col_dot(int j, const MultiVector& other, int jo) const {
    if (dim != other.dim) throw DimensionError("col_dot: dimension mismatch");
    const double* a = col(j);
    const double* b = other.col(jo);
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
}

double MultiVector::col_norm2(int j) const { return std::sqrt(col_dot(j, *this, j)); }

void MultiVector::col_scale(int j, double s) {
    double* a = col(j);
    for (int i = 0; i < dim; ++i) a[i] *= s;
}

void MultiVector::col_axpy(double a, const MultiVector& src, int js, int jd) {
    if (dim != src.dim) throw DimensionError("col_axpy: dimension mismatch");
    const double* s = src.col(js);
    double* d = col(jd);
    for (int i = 0; i < dim; ++i) d[i] += a * s[i];
}

void MultiVector::col_assign(const MultiVector& src, int js, int jd) {
    if (dim != src.dim) throw DimensionError("col_assign: dimension mismatch");
    const double* s = src.col(js);
    double* d = col(jd);
    for (int i = 0; i < dim; ++i) d[i] = s[i];
}

void MultiVector::col_zero(int j) {
    double* d = col(j);
    for (int i = 0; i < dim; ++i) d[i] = 0.0;
}

void MultiVector::keep_columns(const std::vector<int>& idx) { *this = select_columns(idx); }

MultiVector MultiVector::select_columns(const std::vector<int>& idx) const {
    MultiVector out(dim, static_cast<int>(idx.size()));
    for (size_t j = 0; j < idx.size(); ++j) out.col_assign(*this, idx[j], static_cast<int>(j));
    return out;
}

void MultiVector::append_columns(const MultiVector& src) {
    if (width == 0 && dim == 0) {
        *this = src;
        return;
    }
    if (dim != src.dim) throw DimensionError("append_columns: dimension mismatch");
    data.insert(data.end(), src.data.begin(), src.data.end());
    width += src.width;
}

bool MultiVector::all_finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

DenseMatrix block_inner(const MultiVector& x, const MultiVector& y, const SparseMatrix* b) {
    const MultiVector* ry = &y;
    MultiVector by;
    if (b) {
        by = spmv(*b, y);
        ry = &by;
    }
    if (x.dim != ry->dim) throw DimensionError("block_inner: dimension mismatch");
    DenseMatrix g(x.width, y.width);
    for (int i = 0; i < x.width; ++i)
        for (int j = 0; j < y.width; ++j) g(i, j) = x.col_dot(i, *ry, j);
    return g;
}

MultiVector mix_columns(const MultiVector& x, const DenseMatrix& c) {
    if (x.width != c.nrows) throw DimensionError("mix_columns: shape mismatch");
    MultiVector out(x.dim, c.ncols);
    for (int j = 0; j < c.ncols; ++j) {
        double* o = out.col(j);
        for (int k = 0; k < x.width; ++k) {
            const double w = c(k, j);
            if (w == 0.0) continue;
            const double* xc = x.col(k);
            for (int i = 0; i < x.dim; ++i) o[i] += w * xc[i];
        }
    }
    return out;
}

std::pair<MultiVector, int> b_orthonormalize(const MultiVector& v, const SparseMatrix& b,
                                             double drop_tol) {
    MultiVector w = v;
    SpmvOp op{b};
    int kept = mgs_b_orthonormalize(w, op, drop_tol, static_cast<const MultiVector*>(nullptr));
    return {std::move(w), kept};
}

}  // namespace augeig
