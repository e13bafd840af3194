#include "augeig/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "augeig/errors.hpp"

namespace augeig {

namespace {

double edge_length(const MeshLevel& m, int a, int b) {
    const double dx = m.vertices[b][0] - m.vertices[a][0];
    const double dy = m.vertices[b][1] - m.vertices[a][1];
    return std::hypot(dx, dy);
}

double tri_diameter(const MeshLevel& m, int t) {
    const auto& tri = m.triangles[t];
    double h = 0.0;
    for (int e = 0; e < 3; ++e)
        h = std::max(h, edge_length(m, tri[(e + 1) % 3], tri[(e + 2) % 3]));
    return h;
}

// Constant gradient of the P1 interpolant of column j on triangle t.
std::array<double, 2> p1_gradient(const MeshLevel& m, const MultiVector& nodal, int t, int j) {
    const auto& tri = m.triangles[t];
    const double inv2a = 1.0 / (2.0 * m.triangle_area(t));
    double gx = 0.0, gy = 0.0;
    for (int k = 0; k < 3; ++k) {
        const auto& pn = m.vertices[tri[(k + 1) % 3]];
        const auto& pp = m.vertices[tri[(k + 2) % 3]];
        const double v = nodal(tri[k], j);
        gx += v * (pn[1] - pp[1]) * inv2a;
        gy += v * (pp[0] - pn[0]) * inv2a;
    }
    return {gx, gy};
}

// Unit normal to edge (a, b) of triangle t, pointing away from t's interior.
std::array<double, 2> outward_normal(const MeshLevel& m, int t, int a, int b) {
    const auto& pa = m.vertices[a];
    const auto& pb = m.vertices[b];
    const double h = edge_length(m, a, b);
    double nx = (pb[1] - pa[1]) / h;
    double ny = (pa[0] - pb[0]) / h;
    const auto& tri = m.triangles[t];
    int c = tri[0];
    for (int k = 0; k < 3; ++k)
        if (tri[k] != a && tri[k] != b) c = tri[k];
    const auto& pc = m.vertices[c];
    if (nx * (pc[0] - pa[0]) + ny * (pc[1] - pa[1]) > 0.0) {
        nx = -nx;
        ny = -ny;
    }
    return {nx, ny};
}

}  // namespace

std::vector<double> element_residual(const MeshLevel& mesh, const std::vector<double>& lam,
                                     const MultiVector& nodal_u, int t) {
    if (nodal_u.dim != mesh.num_vertices() ||
        static_cast<int>(lam.size()) != nodal_u.width)
        throw DimensionError("element residual: nodal block shape differs from the mesh");
    const auto& tri = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    std::vector<double> r(lam.size());
    for (int j = 0; j < nodal_u.width; ++j) {
        const double v0 = nodal_u(tri[0], j);
        const double v1 = nodal_u(tri[1], j);
        const double v2 = nodal_u(tri[2], j);
        const double s = v0 + v1 + v2;
        // exact integral of the square of a P1 function
        const double mass = area / 12.0 * (s * s + v0 * v0 + v1 * v1 + v2 * v2);
        r[j] = lam[j] * lam[j] * mass;
    }
    return r;
}

std::vector<double> jump_residual(const MeshLevel& mesh, const EdgeTable& edges,
                                  const MultiVector& nodal_u, int e) {
    if (nodal_u.dim != mesh.num_vertices())
        throw DimensionError("jump residual: nodal block shape differs from the mesh");
    const int tp = edges.edge_triangles[e][0];
    const int tm = edges.edge_triangles[e][1];
    if (tp < 0 || tm < 0)
        throw MeshError("jump residual: edge lies on the boundary");
    const int a = edges.edge_vertices[e][0];
    const int b = edges.edge_vertices[e][1];
    const auto np = outward_normal(mesh, tp, a, b);
    const auto nm = outward_normal(mesh, tm, a, b);
    std::vector<double> jump(nodal_u.width);
    for (int j = 0; j < nodal_u.width; ++j) {
        const auto gp = p1_gradient(mesh, nodal_u, tp, j);
        const auto gm = p1_gradient(mesh, nodal_u, tm, j);
        jump[j] = 0.5 * (gp[0] * np[0] + gp[1] * np[1] + gm[0] * nm[0] + gm[1] * nm[1]);
    }
    return jump;
}

ErrorIndicators error_indicator(const FeSpace& space, const std::vector<double>& lam,
                                const MultiVector& u) {
    if (u.dim != space.num_dofs() || static_cast<int>(lam.size()) != u.width)
        throw DimensionError("error indicator: block shape differs from the space");
    const MeshLevel& mesh = *space.mesh;
    const MultiVector nodal = nodal_values(space, u);
    const EdgeTable edges = build_edge_table(mesh);

    // h_e ||J||^2_{0,e} = h_e^2 J^2 per interior edge, summed over columns
    std::vector<double> edge_term(edges.num_edges(), 0.0);
    for (int e = 0; e < edges.num_edges(); ++e) {
        if (edges.edge_triangles[e][0] < 0 || edges.edge_triangles[e][1] < 0) continue;
        const double he = edge_length(mesh, edges.edge_vertices[e][0], edges.edge_vertices[e][1]);
        const std::vector<double> jump = jump_residual(mesh, edges, nodal, e);
        double s = 0.0;
        for (double j : jump) s += j * j;
        edge_term[e] = he * he * s;
    }

    ErrorIndicators ind;
    ind.per_triangle.resize(mesh.num_triangles(), 0.0);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double ht = tri_diameter(mesh, t);
        const std::vector<double> r = element_residual(mesh, lam, nodal, t);
        double eta = 0.0;
        for (double v : r) eta += v;
        eta *= ht * ht;
        for (int e = 0; e < 3; ++e) eta += edge_term[edges.triangle_edges[t][e]];
        ind.per_triangle[t] = eta;
    }
    ind.total = 0.0;
    for (double v : ind.per_triangle) ind.total += v;
    return ind;
}

std::vector<int> dorfler_mark(const ErrorIndicators& ind, double fraction) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw ConfigError("marking: fraction must lie in (0, 1]");
    if (!(ind.total > 0.0))
        throw DegenerateInputError("marking: indicators sum to zero");

    const int n = static_cast<int>(ind.per_triangle.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return ind.per_triangle[i] > ind.per_triangle[j];
    });

    const double target = fraction * ind.total;
    std::vector<int> marked;
    double sum = 0.0;
    for (int t : order) {
        if (sum >= target || ind.per_triangle[t] <= 0.0) break;
        marked.push_back(t);
        sum += ind.per_triangle[t];
    }
    std::sort(marked.begin(), marked.end());
    return marked;
}

AdaptiveResult adaptive_solve(std::shared_ptr<const MeshLevel> mesh0, const AdaptiveConfig& cfg,
                              const Coefficients& coeff) {
    if (cfg.rounds < 0) throw ConfigError("adaptive solve: negative round count");

    const FeSpace space0 = make_space(std::move(mesh0));
    const AssembledForms forms0 = assemble(space0, coeff);

    PaseConfig pcfg;
    pcfg.nev = cfg.nev;
    pcfg.tol = cfg.tol;
    pcfg.max_outer = cfg.max_outer;
    pcfg.cg = cfg.cg;
    pcfg.seed = cfg.seed;

    AdaptiveResult out;
    out.space = space0;
    {
        // level 0: the coarse and fine spaces coincide
        Hierarchy h{forms0.a, forms0.b, forms0.a, forms0.b,
                    SparseMatrix::identity(space0.num_dofs())};
        PaseResult r = pase_solve(h, pcfg);
        out.eigenvalues = std::move(r.eigenvalues);
        out.eigenvectors = std::move(r.eigenvectors);
        AdaptiveRoundRecord rec;
        rec.num_dofs = space0.num_dofs();
        rec.num_triangles = space0.mesh->num_triangles();
        rec.eigenvalues = out.eigenvalues;
        rec.residuals = r.report.residual_history.back();
        rec.converged = r.report.converged;
        out.rounds.push_back(std::move(rec));
    }

    for (int round = 0; round < cfg.rounds; ++round) {
        out.indicators = error_indicator(out.space, out.eigenvalues, out.eigenvectors);
        const std::vector<int> marked = dorfler_mark(out.indicators, cfg.fraction);
        out.rounds.back().indicators = out.indicators;
        out.rounds.back().total_eta2 = out.indicators.total;
        out.rounds.back().num_marked = static_cast<int>(marked.size());

        const FeSpace prev = out.space;
        FeSpace next = make_space(refine_bisection(prev.mesh, marked));
        const AssembledForms forms = assemble(next, coeff);

        // warm start: previous eigenvectors interpolated onto the new mesh
        const SparseMatrix step = build_prolongation(prev, next);
        const MultiVector u0 = spmv(step, out.eigenvectors);

        Hierarchy h{forms0.a, forms0.b, forms.a, forms.b, build_prolongation(space0, next)};
        PaseResult r = pase_solve(h, pcfg, out.eigenvalues, u0);

        out.space = std::move(next);
        out.eigenvalues = std::move(r.eigenvalues);
        out.eigenvectors = std::move(r.eigenvectors);
        AdaptiveRoundRecord rec;
        rec.num_dofs = out.space.num_dofs();
        rec.num_triangles = out.space.mesh->num_triangles();
        rec.eigenvalues = out.eigenvalues;
        rec.residuals = r.report.residual_history.back();
        rec.converged = r.report.converged;
        out.rounds.push_back(std::move(rec));
    }
    out.indicators = error_indicator(out.space, out.eigenvalues, out.eigenvectors);
    out.rounds.back().indicators = out.indicators;
    out.rounds.back().total_eta2 = out.indicators.total;
    return out;
}

}  // namespace augeig
