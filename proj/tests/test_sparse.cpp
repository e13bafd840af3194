#include <vector>

#include "augeig/errors.hpp"
#include "augeig/multivector.hpp"
#include "augeig/sparse.hpp"
#include "doctest.h"
#include "support/test_support.hpp"

using namespace augeig;

TEST_CASE("triplet assembly sums duplicates and sorts columns") {
    // rows/cols deliberately unsorted with a duplicated position
    std::vector<int> ri{1, 0, 1, 0, 1};
    std::vector<int> ci{2, 1, 0, 1, 2};
    std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0};
    SparseMatrix m = SparseMatrix::from_triplets(2, 3, ri, ci, v);
    CHECK(m.in_canonical_form());
    CHECK(m.nnz() == 3);
    CHECK(m.at(0, 1) == doctest::Approx(6.0));
    CHECK(m.at(1, 0) == doctest::Approx(3.0));
    CHECK(m.at(1, 2) == doctest::Approx(6.0));
    CHECK(m.at(0, 0) == 0.0);
}

TEST_CASE("spmv on the 2x2 example") {
    SparseMatrix a = SparseMatrix::from_triplets(2, 2, {0, 0, 1, 1}, {0, 1, 0, 1},
                                                 {2.0, 1.0, 1.0, 2.0});
    MultiVector x(2, 1);
    x(0, 0) = 1.0;
    x(1, 0) = 1.0;
    MultiVector y = spmv(a, x);
    CHECK(y(0, 0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(y(1, 0) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("spmv matches dense reference on random matrices up to dim 50") {
    auto g = testsup::rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(testsup::urand(g, 0.0, 48.0));
        int m = 2 + static_cast<int>(testsup::urand(g, 0.0, 48.0));
        std::vector<int> ri, ci;
        std::vector<double> v;
        int nnz = 1 + static_cast<int>(testsup::urand(g, 0.0, 4.0) * n);
        for (int t = 0; t < nnz; ++t) {
            ri.push_back(static_cast<int>(testsup::urand(g, 0.0, n - 1e-9)));
            ci.push_back(static_cast<int>(testsup::urand(g, 0.0, m - 1e-9)));
            v.push_back(testsup::urand(g));
        }
        SparseMatrix a = SparseMatrix::from_triplets(n, m, ri, ci, v);
        MultiVector x = testsup::random_mv(g, m, 3);
        MultiVector y = spmv(a, x);
        MultiVector yref = testsup::dense_apply(testsup::dense_of(a), x);
        double scale = 0.0, err = 0.0;
        for (size_t i = 0; i < y.data.size(); ++i) {
            scale = std::max(scale, std::abs(yref.data[i]));
            err = std::max(err, std::abs(y.data[i] - yref.data[i]));
        }
        CHECK(err <= 1e-13 * std::max(1.0, scale));
    }
}

TEST_CASE("spmv shape mismatch is a contract violation") {
    SparseMatrix a = SparseMatrix::identity(3);
    MultiVector x(4, 1);
    CHECK_THROWS_AS(spmv(a, x), DimensionError);
}

TEST_CASE("transpose, add and matmul agree with dense references") {
    auto g = testsup::rng(77);
    SparseMatrix a = testsup::random_sparse_spd(g, 12, 3);
    SparseMatrix b = testsup::random_sparse_spd(g, 12, 2);

    SparseMatrix at = transpose(a);
    CHECK(at.in_canonical_form());
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) CHECK(at.at(i, j) == doctest::Approx(a.at(j, i)).epsilon(1e-15));

    SparseMatrix s = csr_add(a, -2.5, b);
    CHECK(s.in_canonical_form());
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            CHECK(s.at(i, j) == doctest::Approx(a.at(i, j) - 2.5 * b.at(i, j)).epsilon(1e-14));

    SparseMatrix p = csr_matmul(a, b);
    auto da = testsup::dense_of(a);
    auto db = testsup::dense_of(b);
    auto dp = augeig::dense_matmul(da, db);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            CHECK(p.at(i, j) == doctest::Approx(dp(i, j)).epsilon(1e-13));
}

TEST_CASE("extract pulls a consistent submatrix") {
    auto g = testsup::rng(5);
    SparseMatrix a = testsup::random_sparse_spd(g, 10, 3);
    std::vector<int> rows{1, 3, 8};
    std::vector<int> cols{0, 3, 4, 9};
    SparseMatrix s = csr_extract(a, rows, cols);
    CHECK(s.nrows == 3);
    CHECK(s.ncols == 4);
    CHECK(s.in_canonical_form());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j)
            CHECK(s.at(static_cast<int>(i), static_cast<int>(j)) ==
                  doctest::Approx(a.at(rows[i], cols[j])).epsilon(1e-15));
}

TEST_CASE("symmetry detector") {
    auto g = testsup::rng(6);
    SparseMatrix a = testsup::random_sparse_spd(g, 15, 4);
    CHECK(a.is_symmetric(1e-14));
    SparseMatrix b = a;
    for (int i = 0; i < b.nrows; ++i) {
        bool done = false;
        for (int p = b.row_offsets[i]; p < b.row_offsets[i + 1]; ++p)
            if (b.col_indices[p] != i) {
                b.values[p] += 1e-6;  // perturb one off-diagonal entry
                done = true;
                break;
            }
        if (done) break;
    }
    CHECK_FALSE(b.is_symmetric(1e-9));
}
