#pragma once

#include <memory>
#include <vector>

namespace augeig {

struct SparseMatrix;
struct MultiVector;

// Envelope (skyline) Cholesky for sparse SPD matrices. Fill stays inside
// the row profile, so no symbolic analysis is needed. Intended for
// coarse-space matrices and band-friendly FEM orderings.
class SkylineCholesky {
  public:
    explicit SkylineCholesky(const SparseMatrix& a);

    // Probe form: returns nullptr instead of throwing when a pivot fails.
    static std::unique_ptr<SkylineCholesky> try_factor(const SparseMatrix& a);

    int n() const { return n_; }
    void solve_in_place(MultiVector& x) const;
    MultiVector solve(const MultiVector& b) const;

  private:
    SkylineCholesky() = default;
    bool factor(const SparseMatrix& a);

    int n_ = 0;
    std::vector<int> first_col_;          // first stored column of each row
    std::vector<long long> row_start_;    // offset of row i's segment
    std::vector<double> l_;               // packed rows [first_col_[i] .. i]
};

}  // namespace augeig
