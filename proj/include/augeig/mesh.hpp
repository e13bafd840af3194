#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace augeig {

// One level of a conforming triangle mesh. Refinement keeps the parent
// level's vertices as a prefix (same indices) and appends edge midpoints,
// whose provenance is recorded for prolongation. Levels are chained via
// `parent` so nested spaces can be recognized later.
struct MeshLevel {
    std::vector<std::array<double, 2>> vertices;
    std::vector<std::array<int, 3>> triangles;   // counterclockwise
    std::vector<std::uint8_t> boundary_flags;    // per vertex
    std::vector<int> parent_of;                  // per triangle; -1 at level 0
    std::vector<int> refinement_edge;            // local edge index, edge e is opposite vertex e
    int level = 0;

    std::shared_ptr<const MeshLevel> parent;
    // For vertices appended by refinement: the two endpoint ids (in the
    // parent level) of the split edge. Entry i describes vertex
    // parent->num_vertices() + i.
    std::vector<std::array<int, 2>> midpoint_parents;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
    double triangle_area(int t) const;
    double min_angle() const;  // radians, over all triangles
};

// Edge connectivity. Edge e of triangle t is opposite local vertex e.
struct EdgeTable {
    std::vector<std::array<int, 2>> edge_vertices;   // (a, b) with a < b
    std::vector<std::array<int, 2>> edge_triangles;  // incident triangles, -1 if boundary
    std::vector<std::array<int, 3>> triangle_edges;  // edge ids per triangle
    int num_edges() const { return static_cast<int>(edge_vertices.size()); }
};

EdgeTable build_edge_table(const MeshLevel& m);

// Structured unit-square mesh: (n+1)^2 vertices, 2n^2 triangles, every
// cell split along its lower-left-to-upper-right diagonal.
std::shared_ptr<const MeshLevel> build_unit_square_mesh(int n);

// L-shaped domain (-1,1)^2 minus the closed square [0,1]^2, meshed on a
// grid with spacing 1/n (n even). Cells inside the removed square are
// dropped; vertices are compacted in scan order.
std::shared_ptr<const MeshLevel> build_lshape_mesh(int n);

// Red refinement: each triangle is split into four similar children.
std::shared_ptr<const MeshLevel> refine_uniform(std::shared_ptr<const MeshLevel> m);

// Newest-vertex bisection of the marked triangles plus the closure needed
// to keep the mesh conforming.
std::shared_ptr<const MeshLevel> refine_bisection(std::shared_ptr<const MeshLevel> m,
                                                  const std::vector<int>& marked);

// Throws MeshError if the mesh has inverted/degenerate triangles,
// non-conforming edges, or inconsistent array sizes.
void validate_mesh(const MeshLevel& m);

std::string mesh_to_text(const MeshLevel& m);

}  // namespace augeig
