#include "augeig/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "augeig/errors.hpp"
#include "augeig/fespace.hpp"
#include "augeig/mesh.hpp"
#include "doctest.h"
#include "support/test_support.hpp"

using namespace augeig;

namespace {

std::shared_ptr<const MeshLevel> hand_mesh(std::vector<std::array<double, 2>> verts,
                                           std::vector<std::array<int, 3>> tris) {
    auto m = std::make_shared<MeshLevel>();
    m->vertices = std::move(verts);
    m->triangles = std::move(tris);
    m->boundary_flags.assign(m->vertices.size(), 1);
    m->parent_of.assign(m->triangles.size(), -1);
    m->refinement_edge.assign(m->triangles.size(), 0);
    validate_mesh(*m);
    return m;
}

std::shared_ptr<const MeshLevel> split_square(bool swap_triangle_order) {
    std::vector<std::array<int, 3>> tris{{0, 1, 2}, {0, 2, 3}};
    if (swap_triangle_order) std::swap(tris[0], tris[1]);
    return hand_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, std::move(tris));
}

// fit u = c0 + c1 x + c2 y through the triangle's vertices; return (c1, c2)
std::array<double, 2> affine_fit_gradient(const MeshLevel& m, const MultiVector& nodal,
                                          int t, int j) {
    DenseMatrix v(3, 3);
    std::vector<double> rhs(3);
    for (int k = 0; k < 3; ++k) {
        const int vid = m.triangles[t][k];
        v(k, 0) = 1.0;
        v(k, 1) = m.vertices[vid][0];
        v(k, 2) = m.vertices[vid][1];
        rhs[k] = nodal(vid, j);
    }
    // 3x3 Gaussian elimination with partial pivoting
    std::array<int, 3> piv{0, 1, 2};
    for (int c = 0; c < 3; ++c) {
        int best = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(v(piv[r], c)) > std::abs(v(piv[best], c))) best = r;
        std::swap(piv[c], piv[best]);
        for (int r = c + 1; r < 3; ++r) {
            const double f = v(piv[r], c) / v(piv[c], c);
            for (int cc = c; cc < 3; ++cc) v(piv[r], cc) -= f * v(piv[c], cc);
            rhs[piv[r]] -= f * rhs[piv[c]];
        }
    }
    std::array<double, 3> c{};
    for (int r = 2; r >= 0; --r) {
        double s = rhs[piv[r]];
        for (int cc = r + 1; cc < 3; ++cc) s -= v(piv[r], cc) * c[cc];
        c[r] = s / v(piv[r], r);
    }
    return {c[1], c[2]};
}

MultiVector nodal_from(const MeshLevel& m, const std::vector<double>& vals, int width = 1) {
    MultiVector u(m.num_vertices(), width);
    for (int i = 0; i < m.num_vertices(); ++i) u(i, 0) = vals[i];
    return u;
}

GeigResult first_pairs(const FeSpace& space, int k) {
    const AssembledForms f = assemble(space);
    return dense_sym_geig(testsup::dense_of(f.a), testsup::dense_of(f.b),
                          EigSelect::SmallestK, k, 0.0);
}

}  // namespace

TEST_CASE("element residual integrates the squared eigenpair term exactly") {
    const auto m = hand_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});

    SUBCASE("zero function") {
        const MultiVector u(3, 1);
        const auto r = element_residual(*m, {7.0}, u, 0);
        CHECK(r[0] == 0.0);
    }

    SUBCASE("single nodal value against the closed form") {
        const MultiVector u = nodal_from(*m, {1.0, 0.0, 0.0});
        const double lam = 3.0;
        const auto r = element_residual(*m, {lam}, u, 0);
        // lambda^2 |T| / 6 for a hat value at one vertex
        const double expect = lam * lam * m->triangle_area(0) / 6.0;
        CHECK(r[0] == doctest::Approx(expect).epsilon(1e-14));
        CHECK(r[0] == doctest::Approx(0.75).epsilon(1e-14));
    }

    SUBCASE("random values against the midpoint quadrature rule") {
        auto g = testsup::rng(11);
        const double v0 = testsup::urand(g), v1 = testsup::urand(g), v2 = testsup::urand(g);
        const MultiVector u = nodal_from(*m, {v0, v1, v2});
        const double lam = 1.7;
        const auto r = element_residual(*m, {lam}, u, 0);
        // 3-point edge-midpoint rule, exact for quadratics
        const double m01 = 0.5 * (v0 + v1), m12 = 0.5 * (v1 + v2), m02 = 0.5 * (v0 + v2);
        const double quad =
            m->triangle_area(0) / 3.0 * (m01 * m01 + m12 * m12 + m02 * m02);
        CHECK(r[0] == doctest::Approx(lam * lam * quad).epsilon(1e-13));
    }
}

TEST_CASE("gradient jump across an interior edge") {
    SUBCASE("a globally linear function has no jumps") {
        const auto m = build_unit_square_mesh(4);
        const EdgeTable edges = build_edge_table(*m);
        MultiVector u(m->num_vertices(), 1);
        for (int i = 0; i < m->num_vertices(); ++i)
            u(i, 0) = 2.0 * m->vertices[i][0] + 3.0 * m->vertices[i][1] - 1.0;
        for (int e = 0; e < edges.num_edges(); ++e) {
            if (edges.edge_triangles[e][0] < 0 || edges.edge_triangles[e][1] < 0) continue;
            const auto j = jump_residual(*m, edges, u, e);
            CHECK(std::abs(j[0]) < 1e-13);
        }
    }

    SUBCASE("hat function on a split square, against the hand value") {
        const auto m = split_square(false);
        const EdgeTable edges = build_edge_table(*m);
        int diag = -1;
        for (int e = 0; e < edges.num_edges(); ++e)
            if (edges.edge_triangles[e][0] >= 0 && edges.edge_triangles[e][1] >= 0) diag = e;
        REQUIRE(diag >= 0);
        const MultiVector u = nodal_from(*m, {0.0, 1.0, 0.0, 0.0});  // hat at (1,0)

        const auto j = jump_residual(*m, edges, u, diag);
        // phi = x - y on the lower triangle, 0 on the upper; outward normal
        // of the lower triangle across the diagonal is (-1,1)/sqrt(2)
        CHECK(j[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));

        // independent route: affine-fit gradients dotted with the normals
        const int tp = edges.edge_triangles[diag][0];
        const int tm = edges.edge_triangles[diag][1];
        const auto gp = affine_fit_gradient(*m, u, tp, 0);
        const auto gm = affine_fit_gradient(*m, u, tm, 0);
        const double s = std::sqrt(2.0);
        // diagonal runs (0,0)->(1,1); normals (1,-1)/s and (-1,1)/s outward
        double np_x = 1 / s, np_y = -1 / s;
        {
            // orient away from the third vertex of tp
            int c = 0;
            for (int k = 0; k < 3; ++k) {
                const int vtx = m->triangles[tp][k];
                if (vtx != 0 && vtx != 2) c = vtx;
            }
            if (np_x * m->vertices[c][0] + np_y * m->vertices[c][1] > 0) {
                np_x = -np_x;
                np_y = -np_y;
            }
        }
        const double oracle = 0.5 * ((gp[0] - gm[0]) * np_x + (gp[1] - gm[1]) * np_y);
        CHECK(j[0] == doctest::Approx(oracle).epsilon(1e-13));
    }

    SUBCASE("value does not depend on the triangle labeling") {
        const auto ma = split_square(false);
        const auto mb = split_square(true);
        const MultiVector ua = nodal_from(*ma, {0.0, 1.0, 0.25, -0.5});
        const MultiVector ub = nodal_from(*mb, {0.0, 1.0, 0.25, -0.5});
        const EdgeTable ea = build_edge_table(*ma);
        const EdgeTable eb = build_edge_table(*mb);
        int da = -1, db = -1;
        for (int e = 0; e < ea.num_edges(); ++e)
            if (ea.edge_triangles[e][0] >= 0 && ea.edge_triangles[e][1] >= 0) da = e;
        for (int e = 0; e < eb.num_edges(); ++e)
            if (eb.edge_triangles[e][0] >= 0 && eb.edge_triangles[e][1] >= 0) db = e;
        const auto ja = jump_residual(*ma, ea, ua, da);
        const auto jb = jump_residual(*mb, eb, ub, db);
        CHECK(ja[0] == doctest::Approx(jb[0]).epsilon(1e-15));
    }

    SUBCASE("boundary edge is rejected") {
        const auto m = split_square(false);
        const EdgeTable edges = build_edge_table(*m);
        int bdry = -1;
        for (int e = 0; e < edges.num_edges(); ++e)
            if (edges.edge_triangles[e][1] < 0) bdry = e;
        REQUIRE(bdry >= 0);
        const MultiVector u(m->num_vertices(), 1);
        CHECK_THROWS_AS(jump_residual(*m, edges, u, bdry), MeshError);
    }
}

TEST_CASE("indicator assembly combines element and edge terms") {
    const auto m = build_unit_square_mesh(4);
    const FeSpace space = make_space(m);
    const int k = 2;
    const MultiVector u = testsup::random_mv(space.num_dofs(), k, 31);
    const std::vector<double> lam{20.0, 50.0};

    const ErrorIndicators ind = error_indicator(space, lam, u);
    REQUIRE(static_cast<int>(ind.per_triangle.size()) == m->num_triangles());

    SUBCASE("matches a brute-force recomputation") {
        const MultiVector nodal = nodal_values(space, u);
        const EdgeTable edges = build_edge_table(*m);
        for (int t = 0; t < m->num_triangles(); ++t) {
            double ht = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = a + 1; b < 3; ++b) {
                    const auto& pa = m->vertices[m->triangles[t][a]];
                    const auto& pb = m->vertices[m->triangles[t][b]];
                    ht = std::max(ht, std::hypot(pb[0] - pa[0], pb[1] - pa[1]));
                }
            double eta = 0.0;
            for (double r : element_residual(*m, lam, nodal, t)) eta += r * ht * ht;
            for (int e = 0; e < 3; ++e) {
                const int eid = edges.triangle_edges[t][e];
                if (edges.edge_triangles[eid][0] < 0 || edges.edge_triangles[eid][1] < 0)
                    continue;
                const auto& pa = m->vertices[edges.edge_vertices[eid][0]];
                const auto& pb = m->vertices[edges.edge_vertices[eid][1]];
                const double he = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
                for (double j : jump_residual(*m, edges, nodal, eid)) eta += he * he * j * j;
            }
            CHECK(std::abs(ind.per_triangle[t] - eta) <=
                  1e-13 * (1.0 + std::abs(eta)));
        }
    }

    SUBCASE("invariants: nonnegative entries, exact fixed-order total") {
        double sum = 0.0;
        for (double v : ind.per_triangle) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(ind.total == sum);

        // permuted summation stays within roundoff of the total
        std::vector<int> perm(ind.per_triangle.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::reverse(perm.begin(), perm.end());
        std::swap(perm[0], perm[perm.size() / 2]);
        double psum = 0.0;
        for (int t : perm) psum += ind.per_triangle[t];
        CHECK(std::abs(psum - ind.total) <= 1e-13 * (1.0 + ind.total));
    }

    SUBCASE("zero block gives zero indicators") {
        const MultiVector z(space.num_dofs(), 1);
        const ErrorIndicators zi = error_indicator(space, {5.0}, z);
        CHECK(zi.total == 0.0);
        for (double v : zi.per_triangle) CHECK(v == 0.0);
    }
}

TEST_CASE("indicators stay balanced for a smooth eigenfunction") {
    const FeSpace space = make_space(build_unit_square_mesh(16));
    const GeigResult pair = first_pairs(space, 1);
    const MultiVector u = multivector_from_dense(pair.eigenvectors);
    const ErrorIndicators ind = error_indicator(space, pair.eigenvalues, u);
    const auto [lo, hi] =
        std::minmax_element(ind.per_triangle.begin(), ind.per_triangle.end());
    CHECK(*lo > 0.0);
    // the element and jump terms both dip near the boundary-edge midpoints,
    // so the squared-indicator spread sits near 120 here; it must stay a
    // bounded spread, not drift with an unresolved singularity
    CHECK(*hi / *lo <= 150.0);
}

TEST_CASE("the reentrant corner dominates the first indicator field") {
    const auto m = build_lshape_mesh(8);
    const FeSpace space = make_space(m);
    const GeigResult pair = first_pairs(space, 1);
    const MultiVector u = multivector_from_dense(pair.eigenvectors);
    const ErrorIndicators ind = error_indicator(space, pair.eigenvalues, u);
    const int argmax = static_cast<int>(
        std::max_element(ind.per_triangle.begin(), ind.per_triangle.end()) -
        ind.per_triangle.begin());
    bool touches_corner = false;
    for (int v : m->triangles[argmax])
        touches_corner = touches_corner ||
                         (m->vertices[v][0] == 0.0 && m->vertices[v][1] == 0.0);
    CHECK(touches_corner);
}

TEST_CASE("bulk marking picks a minimal descending prefix") {
    ErrorIndicators ind;

    SUBCASE("one dominant triangle suffices") {
        ind.per_triangle = {6.0, 2.0, 1.0, 1.0};
        ind.total = 10.0;
        const auto marked = dorfler_mark(ind, 0.5);
        REQUIRE(marked.size() == 1);
        CHECK(marked[0] == 0);
    }

    SUBCASE("ties at the cut go to the lower index") {
        ind.per_triangle = {5.0, 2.0, 2.0, 1.0};
        ind.total = 10.0;
        const auto marked = dorfler_mark(ind, 0.6);
        REQUIRE(marked.size() == 2);
        CHECK(marked[0] == 0);
        CHECK(marked[1] == 1);
    }

    SUBCASE("full fraction marks every triangle with a nonzero indicator") {
        ind.per_triangle = {1.0, 0.0, 2.0, 0.5};
        ind.total = 3.5;
        const auto marked = dorfler_mark(ind, 1.0);
        CHECK(marked == std::vector<int>{0, 2, 3});
    }

    SUBCASE("fraction range and degenerate totals are rejected") {
        ind.per_triangle = {1.0};
        ind.total = 1.0;
        CHECK_THROWS_AS(dorfler_mark(ind, 0.0), ConfigError);
        CHECK_THROWS_AS(dorfler_mark(ind, 1.5), ConfigError);
        ind.per_triangle = {0.0, 0.0};
        ind.total = 0.0;
        CHECK_THROWS_AS(dorfler_mark(ind, 0.4), DegenerateInputError);
    }
}

TEST_CASE("adaptive loop shrinks the estimate and the eigenvalue") {
    AdaptiveConfig cfg;
    cfg.nev = 1;
    cfg.tol = 1e-9;
    cfg.rounds = 4;
    const AdaptiveResult r = adaptive_solve(build_lshape_mesh(2), cfg);
    REQUIRE(static_cast<int>(r.rounds.size()) == cfg.rounds + 1);

    for (const auto& rec : r.rounds) CHECK(rec.converged);
    for (std::size_t i = 1; i < r.rounds.size(); ++i) {
        CHECK(r.rounds[i].num_dofs > r.rounds[i - 1].num_dofs);
        // nested spaces: the smallest eigenvalue cannot rise
        CHECK(r.rounds[i].eigenvalues[0] <= r.rounds[i - 1].eigenvalues[0] + 1e-10);
        // estimate decreases as the marked regions are resolved
        CHECK(r.rounds[i].total_eta2 < r.rounds[i - 1].total_eta2);
    }

    // the final eigenvalue matches a dense solve on the final mesh
    const GeigResult oracle = first_pairs(r.space, 1);
    CHECK(r.eigenvalues[0] == doctest::Approx(oracle.eigenvalues[0]).epsilon(1e-8));

    // bisection keeps the triangles well shaped
    CHECK(r.space.mesh->min_angle() >= 3.14159265358979 / 4.0 - 1e-12);
}
