#include <cmath>

#include "augeig/errors.hpp"
#include "augeig/multivector.hpp"
#include "augeig/skyline.hpp"
#include "augeig/sparse.hpp"
#include "doctest.h"
#include "support/test_support.hpp"

using namespace augeig;

TEST_CASE("skyline Cholesky solves banded SPD systems") {
    auto g = testsup::rng(301);
    for (int n : {5, 17, 60}) {
        SparseMatrix a = testsup::random_sparse_spd(g, n, 4);
        SkylineCholesky chol(a);
        MultiVector b = testsup::random_mv(g, n, 3);
        MultiVector x = chol.solve(b);
        MultiVector ax = spmv(a, x);
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < n; ++i) CHECK(ax(i, j) == doctest::Approx(b(i, j)).epsilon(1e-9));
    }
}

TEST_CASE("skyline probe reports indefiniteness without throwing") {
    SparseMatrix bad = SparseMatrix::from_triplets(2, 2, {0, 1}, {0, 1}, {1.0, -2.0});
    CHECK(SkylineCholesky::try_factor(bad) == nullptr);
    CHECK_THROWS_AS(SkylineCholesky{bad}, IndefiniteError);

    auto g = testsup::rng(302);
    SparseMatrix good = testsup::random_sparse_spd(g, 10, 3);
    CHECK(SkylineCholesky::try_factor(good) != nullptr);
}
