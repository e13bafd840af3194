#pragma once

#include <vector>

namespace augeig {

struct MultiVector;

// Compressed sparse row matrix. Invariant: within each row the column
// indices are strictly increasing and duplicates have been summed.
struct SparseMatrix {
    int nrows = 0;
    int ncols = 0;
    std::vector<int> row_offsets;  // size nrows + 1
    std::vector<int> col_indices;  // size nnz
    std::vector<double> values;    // size nnz

    SparseMatrix() : row_offsets(1, 0) {}
    SparseMatrix(int nr, int nc) : nrows(nr), ncols(nc), row_offsets(nr + 1, 0) {}

    int nnz() const { return static_cast<int>(col_indices.size()); }

    // Entry lookup by binary search; absent entries read as zero.
    double at(int i, int j) const;

    bool in_canonical_form() const;
    bool is_symmetric(double tol) const;

    static SparseMatrix identity(int n);

    // Builds canonical CSR from (row, col, value) triplets; duplicate
    // positions are summed, explicit zeros kept.
    static SparseMatrix from_triplets(int nrows, int ncols,
                                      const std::vector<int>& rows,
                                      const std::vector<int>& cols,
                                      const std::vector<double>& vals);
};

SparseMatrix transpose(const SparseMatrix& a);

// a + c * b (patterns merged).
SparseMatrix csr_add(const SparseMatrix& a, double c, const SparseMatrix& b);

SparseMatrix csr_matmul(const SparseMatrix& a, const SparseMatrix& b);

// Submatrix with the given (ordered) row and column index sets.
SparseMatrix csr_extract(const SparseMatrix& a, const std::vector<int>& rows,
                         const std::vector<int>& cols);

double csr_max_abs(const SparseMatrix& a);

// y = A x for a block of column vectors.
MultiVector spmv(const SparseMatrix& a, const MultiVector& x);
void spmv_into(const SparseMatrix& a, const MultiVector& x, MultiVector& y);

}  // namespace augeig
