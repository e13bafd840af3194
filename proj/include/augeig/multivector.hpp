#pragma once

#include <utility>
#include <vector>

namespace augeig {

struct SparseMatrix;
struct DenseMatrix;

// Dense block of column vectors, stored column-major so each column is
// contiguous. Columns are the unit of work everywhere in this library.
struct MultiVector {
    int dim = 0;
    int width = 0;
    std::vector<double> data;

    MultiVector() = default;
    MultiVector(int d, int w) : dim(d), width(w), data(static_cast<size_t>(d) * w, 0.0) {}

    double* col(int j) { return data.data() + static_cast<size_t>(j) * dim; }
    const double* col(int j) const { return data.data() + static_cast<size_t>(j) * dim; }

    double& operator()(int i, int j) { return data[static_cast<size_t>(j) * dim + i]; }
    double operator()(int i, int j) const { return data[static_cast<size_t>(j) * dim + i]; }

    // Column-block interface shared with AugVec (see block_ops.hpp).
    int block_width() const { return width; }
    MultiVector like_width(int w) const { return MultiVector(dim, w); }
    double col_dot(int j, const MultiVector& other, int jo) const;
    double col_norm2(int j) const;
    void col_scale(int j, double s);
    // this[:, jd] += a * src[:, js]
    void col_axpy(double a, const MultiVector& src, int js, int jd);
    void col_assign(const MultiVector& src, int js, int jd);
    void col_zero(int j);
    void keep_columns(const std::vector<int>& idx);
    MultiVector select_columns(const std::vector<int>& idx) const;
    void append_columns(const MultiVector& src);

    bool all_finite() const;
};

// X^T Y, or X^T B Y when b is given. Result is X.width x Y.width.
DenseMatrix block_inner(const MultiVector& x, const MultiVector& y,
                        const SparseMatrix* b = nullptr);

// X * C for a small dense C (X.width x c.ncols). Mixes columns.
MultiVector mix_columns(const MultiVector& x, const DenseMatrix& c);

// Block modified Gram-Schmidt in the B inner product with one full
// re-orthogonalization pass. Columns whose B-norm falls below
// drop_tol relative to the largest initial column B-norm are removed.
// Returns the orthonormalized block and the number of kept columns.
std::pair<MultiVector, int> b_orthonormalize(const MultiVector& v, const SparseMatrix& b,
                                             double drop_tol = 1e-10);

}  // namespace augeig
