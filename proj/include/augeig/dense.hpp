#pragma once

#include <optional>
#include <vector>

namespace augeig {

struct MultiVector;

// Small dense matrix, row-major.
struct DenseMatrix {
    int nrows = 0;
    int ncols = 0;
    std::vector<double> a;

    DenseMatrix() = default;
    DenseMatrix(int nr, int nc) : nrows(nr), ncols(nc), a(static_cast<size_t>(nr) * nc, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * ncols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * ncols + j]; }

    static DenseMatrix identity(int n);

    // Column-block interface (columns are strided; rows are small here).
    int block_width() const { return ncols; }
    DenseMatrix like_width(int w) const { return DenseMatrix(nrows, w); }
    double col_dot(int j, const DenseMatrix& other, int jo) const;
    void col_scale(int j, double s);
    void col_axpy(double alpha, const DenseMatrix& src, int js, int jd);
    void col_assign(const DenseMatrix& src, int js, int jd);
    void col_zero(int j);
    void keep_columns(const std::vector<int>& idx);
    DenseMatrix select_columns(const std::vector<int>& idx) const;
    void append_columns(const DenseMatrix& src);

    double max_abs() const;
    double asymmetry() const;  // max |a(i,j) - a(j,i)|
    void symmetrize();         // a <- (a + a^T)/2
    bool all_finite() const;
};

DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix dense_transpose(const DenseMatrix& a);
DenseMatrix dense_add(const DenseMatrix& a, double c, const DenseMatrix& b);  // a + c*b

// Cholesky factorization of an SPD matrix; throws IndefiniteError on a
// non-positive pivot unless constructed through try_factor.
class DenseCholesky {
  public:
    explicit DenseCholesky(const DenseMatrix& a);
    static std::optional<DenseCholesky> try_factor(const DenseMatrix& a);

    int n() const { return n_; }
    // Solve A X = B in place (B may have several columns).
    void solve_in_place(DenseMatrix& b) const;
    std::vector<double> solve(const std::vector<double>& b) const;
    // Lower factor access for reductions: L(i,j), j <= i.
    double l(int i, int j) const { return l_(i, j); }

  private:
    DenseCholesky() = default;
    bool factor(const DenseMatrix& a);
    int n_ = 0;
    DenseMatrix l_;
};

// Eigendecomposition of a dense symmetric matrix: Householder
// tridiagonalization followed by the implicit-shift QL iteration.
// Eigenvalues ascending, eigenvectors orthonormal in columns of z.
void dense_sym_eig(const DenseMatrix& a, std::vector<double>& eigenvalues, DenseMatrix& z);

enum class EigSelect { SmallestK, NearestK };

struct GeigResult {
    std::vector<double> eigenvalues;
    DenseMatrix eigenvectors;  // columns, B-orthonormal
};

// Symmetric-definite generalized problem A x = lambda B x: Cholesky of B
// reduces to standard form, then dense_sym_eig, then back-substitution.
// SmallestK returns the k algebraically smallest pairs ascending;
// NearestK returns the k pairs closest to theta, ordered by |lambda-theta|.
GeigResult dense_sym_geig(const DenseMatrix& a, const DenseMatrix& b, EigSelect select, int k,
                          double theta = 0.0);

DenseMatrix dense_from_multivector(const MultiVector& x);
MultiVector multivector_from_dense(const DenseMatrix& a);

}  // namespace augeig
