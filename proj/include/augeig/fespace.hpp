#pragma once

#include <array>
#include <functional>
#include <memory>

#include "augeig/mesh.hpp"
#include "augeig/multivector.hpp"
#include "augeig/sparse.hpp"

namespace augeig {

// P1 space on a mesh level with homogeneous Dirichlet conditions: degrees
// of freedom are the interior vertices, numbered in increasing vertex order.
struct FeSpace {
    std::shared_ptr<const MeshLevel> mesh;
    std::vector<int> free_dofs;     // vertex id of each dof
    std::vector<int> dof_of_vertex; // -1 on the boundary
    int num_dofs() const { return static_cast<int>(free_dofs.size()); }
};

FeSpace make_space(std::shared_ptr<const MeshLevel> mesh);

// Problem data for -div(A grad u) + phi u = lambda u. `diffusion` returns
// the symmetric 2x2 matrix A(x) in row-major order. Defaults: A = I, phi = 0.
struct Coefficients {
    std::function<std::array<double, 4>(double, double)> diffusion;
    std::function<double(double, double)> potential;
};

struct AssembledForms {
    SparseMatrix a;  // stiffness (+ potential)
    SparseMatrix b;  // mass
};

// Matrices over the free dofs. Variable coefficients are integrated with
// the three-point edge-midpoint rule (exact for the constant-coefficient
// stiffness); the mass matrix uses the exact closed form.
AssembledForms assemble(const FeSpace& space, const Coefficients& coeff = {});

// Same matrices over all vertices, boundary included (no elimination).
AssembledForms assemble_full(const MeshLevel& mesh, const Coefficients& coeff = {});

// Prolongation from the free dofs of `coarse` to the free dofs of `fine`.
// The fine mesh must descend from the coarse mesh through its parent
// chain; otherwise throws NestingError. Coarse vertices keep their values
// (unit rows); refinement midpoints average their two edge endpoints.
SparseMatrix build_prolongation(const FeSpace& coarse, const FeSpace& fine);

// Scatter free-dof columns into per-vertex columns, zero on the boundary.
MultiVector nodal_values(const FeSpace& space, const MultiVector& u);

}  // namespace augeig
