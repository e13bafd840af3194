#include "augeig/fespace.hpp"

#include <algorithm>
#include <vector>

#include "augeig/errors.hpp"

namespace augeig {

namespace {

// triplet accumulator feeding SparseMatrix::from_triplets
struct Triplets {
    std::vector<int> rows, cols;
    std::vector<double> vals;
    void add(int i, int j, double v) {
        rows.push_back(i);
        cols.push_back(j);
        vals.push_back(v);
    }
    SparseMatrix build(int nrows, int ncols) const {
        return SparseMatrix::from_triplets(nrows, ncols, rows, cols, vals);
    }
};

}  // namespace

FeSpace make_space(std::shared_ptr<const MeshLevel> mesh) {
    FeSpace s;
    s.mesh = std::move(mesh);
    s.dof_of_vertex.assign(s.mesh->num_vertices(), -1);
    for (int v = 0; v < s.mesh->num_vertices(); ++v) {
        if (!s.mesh->boundary_flags[v]) {
            s.dof_of_vertex[v] = s.num_dofs();
            s.free_dofs.push_back(v);
        }
    }
    return s;
}

AssembledForms assemble_full(const MeshLevel& mesh, const Coefficients& coeff) {
    Triplets ta, tb;
    ta.rows.reserve(mesh.triangles.size() * 9);
    tb.rows.reserve(mesh.triangles.size() * 9);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const auto& p0 = mesh.vertices[tri[0]];
        const auto& p1 = mesh.vertices[tri[1]];
        const auto& p2 = mesh.vertices[tri[2]];
        const double area = mesh.triangle_area(t);
        // P1 shape gradients, constant on the element
        const double gx[3] = {(p1[1] - p2[1]) / (2 * area), (p2[1] - p0[1]) / (2 * area),
                              (p0[1] - p1[1]) / (2 * area)};
        const double gy[3] = {(p2[0] - p1[0]) / (2 * area), (p0[0] - p2[0]) / (2 * area),
                              (p1[0] - p0[0]) / (2 * area)};

        double ke[3][3] = {};
        // edge-midpoint quadrature: point q is the midpoint of the edge
        // opposite vertex q, with barycentric weight 1/2 on the other two
        for (int q = 0; q < 3; ++q) {
            const auto& a = mesh.vertices[tri[(q + 1) % 3]];
            const auto& b = mesh.vertices[tri[(q + 2) % 3]];
            const double qx = 0.5 * (a[0] + b[0]), qy = 0.5 * (a[1] + b[1]);
            const std::array<double, 4> d =
                coeff.diffusion ? coeff.diffusion(qx, qy)
                                : std::array<double, 4>{1.0, 0.0, 0.0, 1.0};
            const double phi = coeff.potential ? coeff.potential(qx, qy) : 0.0;
            double lam[3];
            lam[q] = 0.0;
            lam[(q + 1) % 3] = 0.5;
            lam[(q + 2) % 3] = 0.5;
            const double w = area / 3.0;
            for (int i = 0; i < 3; ++i) {
                const double dgx = d[0] * gx[i] + d[1] * gy[i];
                const double dgy = d[2] * gx[i] + d[3] * gy[i];
                for (int j = 0; j < 3; ++j)
                    ke[i][j] += w * (dgx * gx[j] + dgy * gy[j] + phi * lam[i] * lam[j]);
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                ta.add(tri[i], tri[j], ke[i][j]);
                tb.add(tri[i], tri[j], area / 12.0 * (i == j ? 2.0 : 1.0));
            }
        }
    }
    const int nv = mesh.num_vertices();
    return {ta.build(nv, nv), tb.build(nv, nv)};
}

AssembledForms assemble(const FeSpace& space, const Coefficients& coeff) {
    AssembledForms full = assemble_full(*space.mesh, coeff);
    return {csr_extract(full.a, space.free_dofs, space.free_dofs),
            csr_extract(full.b, space.free_dofs, space.free_dofs)};
}

SparseMatrix build_prolongation(const FeSpace& coarse, const FeSpace& fine) {
    // climb the parent chain from fine to coarse
    std::vector<const MeshLevel*> chain;  // coarse..fine, successive levels
    for (const MeshLevel* m = fine.mesh.get();; m = m->parent.get()) {
        chain.push_back(m);
        if (m == coarse.mesh.get()) break;
        if (!m->parent) throw NestingError("fine space does not descend from coarse space");
    }
    std::reverse(chain.begin(), chain.end());

    // full per-vertex prolongation, composed over the levels
    SparseMatrix p = SparseMatrix::identity(chain.front()->num_vertices());
    for (std::size_t k = 1; k < chain.size(); ++k) {
        const MeshLevel& child = *chain[k];
        const int np = chain[k - 1]->num_vertices();
        Triplets tp;
        tp.rows.reserve(child.num_vertices() * 2);
        for (int v = 0; v < np; ++v) tp.add(v, v, 1.0);
        for (std::size_t i = 0; i < child.midpoint_parents.size(); ++i) {
            const auto [a, b] = child.midpoint_parents[i];
            tp.add(np + static_cast<int>(i), a, 0.5);
            tp.add(np + static_cast<int>(i), b, 0.5);
        }
        p = csr_matmul(tp.build(child.num_vertices(), np), p);
    }
    // boundary columns of the coarse space carry homogeneous values, so
    // restricting to free dofs on both sides is exact
    return csr_extract(p, fine.free_dofs, coarse.free_dofs);
}

MultiVector nodal_values(const FeSpace& space, const MultiVector& u) {
    if (u.dim != space.num_dofs())
        throw DimensionError("nodal_values: dof count mismatch");
    MultiVector full(space.mesh->num_vertices(), u.width);
    for (int j = 0; j < u.width; ++j)
        for (int i = 0; i < space.num_dofs(); ++i)
            full.col(j)[space.free_dofs[i]] = u.col(j)[i];
    return full;
}

}  // namespace augeig
