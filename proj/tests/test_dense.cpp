#include <cmath>

#include "augeig/dense.hpp"
#include "augeig/errors.hpp"
#include "doctest.h"
#include "support/test_support.hpp"

using namespace augeig;

TEST_CASE("diagonal pencil: eigenvalues are the diagonal ratios") {
    DenseMatrix a(3, 3), b(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    a(2, 2) = 3.0;
    for (int i = 0; i < 3; ++i) b(i, i) = 2.0;
    GeigResult r = dense_sym_geig(a, b, EigSelect::SmallestK, 3);
    CHECK(r.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.eigenvalues[2] == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("random 5x5 pencils match the characteristic-polynomial oracle") {
    auto g = testsup::rng(202);
    for (int trial = 0; trial < 12; ++trial) {
        DenseMatrix a = testsup::random_sym(g, 5);
        DenseMatrix b = testsup::random_spd(g, 5, 1.0);
        std::vector<double> oracle = testsup::charpoly_eigenvalues(a, b);
        GeigResult r = dense_sym_geig(a, b, EigSelect::SmallestK, 5);
        REQUIRE(oracle.size() == 5);
        for (int i = 0; i < 5; ++i)
            CHECK(std::abs(r.eigenvalues[i] - oracle[i]) <= 1e-10 * std::max(1.0, std::abs(oracle[i])));
    }
}

TEST_CASE("indefinite B raises IndefiniteError") {
    DenseMatrix a = DenseMatrix::identity(2);
    DenseMatrix b = DenseMatrix::identity(2);
    b(1, 1) = -1.0;
    CHECK_THROWS_AS(dense_sym_geig(a, b, EigSelect::SmallestK, 2), IndefiniteError);
}

TEST_CASE("eigenpairs satisfy the residual and B-orthonormality contracts") {
    auto g = testsup::rng(203);
    for (int n : {4, 10, 25}) {
        DenseMatrix a = testsup::random_sym(g, n);
        DenseMatrix b = testsup::random_spd(g, n, 1.0);
        GeigResult r = dense_sym_geig(a, b, EigSelect::SmallestK, n);
        // residual max |A C - B C diag(lambda)|
        DenseMatrix ac = dense_matmul(a, r.eigenvectors);
        DenseMatrix bc = dense_matmul(b, r.eigenvectors);
        double res = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                res = std::max(res, std::abs(ac(i, j) - bc(i, j) * r.eigenvalues[j]));
        CHECK(res <= 1e-12 * std::max(1.0, a.max_abs()) * n);
        // B-orthonormality
        DenseMatrix gram = dense_matmul(dense_transpose(r.eigenvectors), bc);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-11);
        // ascending order
        for (int i = 1; i < n; ++i) CHECK(r.eigenvalues[i] >= r.eigenvalues[i - 1]);
    }
}

TEST_CASE("eigenvalues are invariant under congruence transforms") {
    auto g = testsup::rng(204);
    int n = 8;
    DenseMatrix a = testsup::random_sym(g, n);
    DenseMatrix b = testsup::random_spd(g, n, 1.0);
    // congruence by a random well-conditioned matrix S = I + small R
    DenseMatrix s = DenseMatrix::identity(n);
    DenseMatrix rnd = testsup::random_dense(g, n, n);
    for (int i = 0; i < n * n; ++i) s.a[i] += 0.2 * rnd.a[i];
    DenseMatrix st = dense_transpose(s);
    DenseMatrix a2 = dense_matmul(st, dense_matmul(a, s));
    DenseMatrix b2 = dense_matmul(st, dense_matmul(b, s));
    a2.symmetrize();
    b2.symmetrize();
    GeigResult r1 = dense_sym_geig(a, b, EigSelect::SmallestK, n);
    GeigResult r2 = dense_sym_geig(a2, b2, EigSelect::SmallestK, n);
    for (int i = 0; i < n; ++i)
        CHECK(r1.eigenvalues[i] ==
              doctest::Approx(r2.eigenvalues[i]).epsilon(1e-10).scale(std::abs(r1.eigenvalues[i]) + 1.0));
}

TEST_CASE("nearest-theta selector returns pairs ordered by distance") {
    DenseMatrix a(4, 4), b = DenseMatrix::identity(4);
    a(0, 0) = 1.0;
    a(1, 1) = 4.0;
    a(2, 2) = 6.0;
    a(3, 3) = 10.0;
    GeigResult r = dense_sym_geig(a, b, EigSelect::NearestK, 2, 5.2);
    CHECK(r.eigenvalues[0] == doctest::Approx(6.0));
    CHECK(r.eigenvalues[1] == doctest::Approx(4.0));
}

TEST_CASE("dense Cholesky solves against reference") {
    auto g = testsup::rng(205);
    int n = 9;
    DenseMatrix a = testsup::random_spd(g, n, 1.0);
    DenseCholesky chol(a);
    DenseMatrix rhs = testsup::random_dense(g, n, 2);
    DenseMatrix x = rhs;
    chol.solve_in_place(x);
    DenseMatrix ax = dense_matmul(a, x);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2; ++j) CHECK(ax(i, j) == doctest::Approx(rhs(i, j)).epsilon(1e-9));
}
