#include <cmath>

#include "augeig/block_ops.hpp"
#include "augeig/dense.hpp"
#include "augeig/errors.hpp"
#include "augeig/multivector.hpp"
#include "augeig/sparse.hpp"
#include "doctest.h"
#include "support/test_support.hpp"

using namespace augeig;

TEST_CASE("block_inner matches a double loop, with and without B") {
    auto g = testsup::rng(11);
    SparseMatrix b = testsup::random_sparse_spd(g, 9, 3);
    MultiVector x = testsup::random_mv(g, 9, 4);
    MultiVector y = testsup::random_mv(g, 9, 2);

    DenseMatrix plain = block_inner(x, y);
    DenseMatrix weighted = block_inner(x, y, &b);
    auto db = testsup::dense_of(b);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0.0, sb = 0.0;
            for (int r = 0; r < 9; ++r) {
                s += x(r, i) * y(r, j);
                for (int c = 0; c < 9; ++c) sb += x(r, i) * db(r, c) * y(c, j);
            }
            CHECK(plain(i, j) == doctest::Approx(s).epsilon(1e-14));
            CHECK(weighted(i, j) == doctest::Approx(sb).epsilon(1e-13));
        }
}

TEST_CASE("b_orthonormalize produces a B-orthonormal block") {
    auto g = testsup::rng(22);
    SparseMatrix b = testsup::random_sparse_spd(g, 20, 4);
    MultiVector v = testsup::random_mv(g, 20, 6);
    auto [q, kept] = b_orthonormalize(v, b);
    CHECK(kept == 6);
    DenseMatrix gram = block_inner(q, q, &b);
    for (int i = 0; i < kept; ++i)
        for (int j = 0; j < kept; ++j) {
            double expect = i == j ? 1.0 : 0.0;
            CHECK(std::abs(gram(i, j) - expect) <= 1e-10);
        }
}

TEST_CASE("duplicated column is dropped and kept count reflects it") {
    auto g = testsup::rng(23);
    SparseMatrix b = testsup::random_sparse_spd(g, 12, 3);
    MultiVector v = testsup::random_mv(g, 12, 4);
    v.col_assign(v, 1, 3);  // column 3 duplicates column 1
    auto [q, kept] = b_orthonormalize(v, b);
    CHECK(kept == 3);
    CHECK(q.width == 3);
}

TEST_CASE("b_orthonormalize is idempotent up to roundoff and signs") {
    auto g = testsup::rng(24);
    SparseMatrix b = testsup::random_sparse_spd(g, 15, 3);
    MultiVector v = testsup::random_mv(g, 15, 5);
    auto [q1, k1] = b_orthonormalize(v, b);
    auto [q2, k2] = b_orthonormalize(q1, b);
    REQUIRE(k1 == k2);
    for (int j = 0; j < k1; ++j) {
        double dsame = 0.0, dflip = 0.0;
        for (int i = 0; i < 15; ++i) {
            dsame = std::max(dsame, std::abs(q2(i, j) - q1(i, j)));
            dflip = std::max(dflip, std::abs(q2(i, j) + q1(i, j)));
        }
        CHECK(std::min(dsame, dflip) <= 1e-12);
    }
}

TEST_CASE("zero-width block round-trips") {
    SparseMatrix b = SparseMatrix::identity(5);
    MultiVector v(5, 0);
    auto [q, kept] = b_orthonormalize(v, b);
    CHECK(kept == 0);
    CHECK(q.width == 0);
}

TEST_CASE("mix_columns equals dense multiply") {
    auto g = testsup::rng(31);
    MultiVector x = testsup::random_mv(g, 7, 3);
    DenseMatrix c = testsup::random_dense(g, 3, 5);
    MultiVector y = mix_columns(x, c);
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 7; ++i) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += x(i, k) * c(k, j);
            CHECK(y(i, j) == doctest::Approx(s).epsilon(1e-14));
        }
}

TEST_CASE("block CG solves SPD systems and terminates within n iterations") {
    auto g = testsup::rng(41);
    for (int n : {6, 12, 20}) {
        SparseMatrix a = testsup::random_sparse_spd(g, n, 3);
        MultiVector rhs = testsup::random_mv(g, n, 3);
        MultiVector x(n, 3);
        BcgConfig cfg;
        cfg.max_iters = n + 2;
        cfg.rel_tol = 1e-10;
        BcgResult res = block_cg(a, nullptr, rhs, x, cfg);
        CHECK(res.all_converged);
        for (int j = 0; j < 3; ++j) CHECK(res.column_iters[j] <= n);
        MultiVector ax = spmv(a, x);
        for (int j = 0; j < 3; ++j) {
            double err = 0.0, scale = 0.0;
            for (int i = 0; i < n; ++i) {
                err = std::max(err, std::abs(ax(i, j) - rhs(i, j)));
                scale = std::max(scale, std::abs(rhs(i, j)));
            }
            CHECK(err <= 1e-8 * scale);
        }
    }
}

TEST_CASE("block CG freezes converged columns bit-stably") {
    auto g = testsup::rng(42);
    int n = 30;
    SparseMatrix a = testsup::random_sparse_spd(g, n, 2);
    // Column 0 already solved exactly: rhs = A * e, x0 = e.
    MultiVector e = testsup::random_mv(g, n, 1);
    MultiVector rhs(n, 2);
    MultiVector ae = spmv(a, e);
    rhs.col_assign(ae, 0, 0);
    MultiVector hard = testsup::random_mv(g, n, 1);
    rhs.col_assign(hard, 0, 1);
    MultiVector x(n, 2);
    x.col_assign(e, 0, 0);
    BcgConfig cfg;
    cfg.max_iters = 15;
    cfg.rel_tol = 1e-12;
    block_cg(a, nullptr, rhs, x, cfg);
    for (int i = 0; i < n; ++i) CHECK(x(i, 0) == e(i, 0));  // bitwise frozen
}

TEST_CASE("block CG quadratic energy is monotone nonincreasing") {
    auto g = testsup::rng(43);
    int n = 25;
    SparseMatrix a = testsup::random_sparse_spd(g, n, 3);
    MultiVector rhs = testsup::random_mv(g, n, 1);
    MultiVector x(n, 1);
    double prev_energy = 0.0;  // x=0 -> energy 0
    BcgConfig step;
    step.max_iters = 1;
    step.rel_tol = 0.0;  // force full iterations
    for (int it = 0; it < 12; ++it) {
        block_cg(a, nullptr, rhs, x, step);
        MultiVector ax = spmv(a, x);
        double e = 0.0;
        for (int i = 0; i < n; ++i) e += 0.5 * x(i, 0) * ax(i, 0) - x(i, 0) * rhs(i, 0);
        CHECK(e <= prev_energy + 1e-12);
        prev_energy = e;
    }
}

TEST_CASE("block CG reports indefinite operators naming the column") {
    SparseMatrix a = SparseMatrix::from_triplets(2, 2, {0, 1}, {0, 1}, {1.0, -1.0});
    MultiVector rhs(2, 1);
    rhs(0, 0) = 0.0;
    rhs(1, 0) = 1.0;
    MultiVector x(2, 1);
    BcgConfig cfg;
    CHECK_THROWS_AS(block_cg(a, nullptr, rhs, x, cfg), IndefiniteError);
}

TEST_CASE("zero right-hand side yields the zero solution immediately") {
    auto g = testsup::rng(44);
    SparseMatrix a = testsup::random_sparse_spd(g, 8, 2);
    MultiVector rhs(8, 1);
    MultiVector x = testsup::random_mv(g, 8, 1);
    BcgConfig cfg;
    BcgResult res = block_cg(a, nullptr, rhs, x, cfg);
    CHECK(res.all_converged);
    for (int i = 0; i < 8; ++i) CHECK(x(i, 0) == 0.0);
}
