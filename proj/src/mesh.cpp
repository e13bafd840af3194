#include "augeig/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "augeig/errors.hpp"

namespace augeig {

namespace {

double signed_area2(const std::array<double, 2>& p, const std::array<double, 2>& q,
                    const std::array<double, 2>& r) {
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
}

double edge_len2(const std::array<double, 2>& p, const std::array<double, 2>& q) {
    const double dx = q[0] - p[0], dy = q[1] - p[1];
    return dx * dx + dy * dy;
}

// Local index of the longest edge (edge e is opposite vertex e); ties go
// to the lowest index so the choice is deterministic.
int longest_edge(const MeshLevel& m, const std::array<int, 3>& tri) {
    int best = 0;
    double best_len = -1.0;
    for (int e = 0; e < 3; ++e) {
        const double len =
            edge_len2(m.vertices[tri[(e + 1) % 3]], m.vertices[tri[(e + 2) % 3]]);
        if (len > best_len + 1e-14 * (1.0 + best_len)) {
            best_len = len;
            best = e;
        }
    }
    return best;
}

void flag_boundary_by_edge_incidence(MeshLevel& m) {
    const EdgeTable et = build_edge_table(m);
    m.boundary_flags.assign(m.vertices.size(), 0);
    for (int e = 0; e < et.num_edges(); ++e) {
        if (et.edge_triangles[e][1] < 0) {
            m.boundary_flags[et.edge_vertices[e][0]] = 1;
            m.boundary_flags[et.edge_vertices[e][1]] = 1;
        }
    }
}

}  // namespace

double MeshLevel::triangle_area(int t) const {
    const auto& tri = triangles[t];
    return 0.5 * signed_area2(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

double MeshLevel::min_angle() const {
    double worst = 3.15;
    for (const auto& tri : triangles) {
        for (int v = 0; v < 3; ++v) {
            const auto& p = vertices[tri[v]];
            const auto& q = vertices[tri[(v + 1) % 3]];
            const auto& r = vertices[tri[(v + 2) % 3]];
            const double ux = q[0] - p[0], uy = q[1] - p[1];
            const double vx = r[0] - p[0], vy = r[1] - p[1];
            const double dot = ux * vx + uy * vy;
            const double cross = ux * vy - uy * vx;
            worst = std::min(worst, std::atan2(std::abs(cross), dot));
        }
    }
    return worst;
}

EdgeTable build_edge_table(const MeshLevel& m) {
    EdgeTable et;
    et.triangle_edges.resize(m.triangles.size());
    std::map<std::pair<int, int>, int> edge_id;
    for (int t = 0; t < m.num_triangles(); ++t) {
        for (int e = 0; e < 3; ++e) {
            int a = m.triangles[t][(e + 1) % 3];
            int b = m.triangles[t][(e + 2) % 3];
            if (a > b) std::swap(a, b);
            auto [it, inserted] = edge_id.try_emplace({a, b}, et.num_edges());
            if (inserted) {
                et.edge_vertices.push_back({a, b});
                et.edge_triangles.push_back({t, -1});
            } else {
                auto& inc = et.edge_triangles[it->second];
                if (inc[1] >= 0)
                    throw MeshError("edge shared by more than two triangles");
                inc[1] = t;
            }
            et.triangle_edges[t][e] = it->second;
        }
    }
    return et;
}

std::shared_ptr<const MeshLevel> build_unit_square_mesh(int n) {
    if (n < 1) throw MeshError("unit square mesh needs n >= 1");
    auto m = std::make_shared<MeshLevel>();
    const double h = 1.0 / n;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m->vertices.push_back({i * h, j * h});
    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int a = vid(i, j), b = vid(i + 1, j);
            const int c = vid(i + 1, j + 1), d = vid(i, j + 1);
            m->triangles.push_back({a, b, c});
            m->triangles.push_back({a, c, d});
        }
    }
    m->parent_of.assign(m->triangles.size(), -1);
    m->refinement_edge.resize(m->triangles.size());
    for (int t = 0; t < m->num_triangles(); ++t)
        m->refinement_edge[t] = longest_edge(*m, m->triangles[t]);
    flag_boundary_by_edge_incidence(*m);
    validate_mesh(*m);
    return m;
}

std::shared_ptr<const MeshLevel> build_lshape_mesh(int n) {
    if (n < 2 || n % 2 != 0) throw MeshError("L-shape mesh needs even n >= 2");
    auto m = std::make_shared<MeshLevel>();
    const double h = 1.0 / n;
    const int side = 2 * n + 1;  // grid points per direction over [-1,1]
    // Cell (i,j) spans [-1 + i*h, -1 + (i+1)*h] x [-1 + j*h, -1 + (j+1)*h];
    // it lies in the removed square [0,1]^2 exactly when i >= n and j >= n.
    auto cell_kept = [n](int i, int j) { return i < n || j < n; };
    std::vector<int> compact(side * side, -1);
    auto gid = [side](int i, int j) { return j * side + i; };
    for (int j = 0; j < side; ++j) {
        for (int i = 0; i < side; ++i) {
            bool used = false;
            for (int dj = -1; dj <= 0 && !used; ++dj)
                for (int di = -1; di <= 0 && !used; ++di) {
                    const int ci = i + di, cj = j + dj;
                    if (ci >= 0 && ci < 2 * n && cj >= 0 && cj < 2 * n && cell_kept(ci, cj))
                        used = true;
                }
            if (used) {
                compact[gid(i, j)] = m->num_vertices();
                m->vertices.push_back({-1.0 + i * h, -1.0 + j * h});
            }
        }
    }
    for (int j = 0; j < 2 * n; ++j) {
        for (int i = 0; i < 2 * n; ++i) {
            if (!cell_kept(i, j)) continue;
            const int a = compact[gid(i, j)], b = compact[gid(i + 1, j)];
            const int c = compact[gid(i + 1, j + 1)], d = compact[gid(i, j + 1)];
            m->triangles.push_back({a, b, c});
            m->triangles.push_back({a, c, d});
        }
    }
    m->parent_of.assign(m->triangles.size(), -1);
    m->refinement_edge.resize(m->triangles.size());
    for (int t = 0; t < m->num_triangles(); ++t)
        m->refinement_edge[t] = longest_edge(*m, m->triangles[t]);
    flag_boundary_by_edge_incidence(*m);
    validate_mesh(*m);
    return m;
}

std::shared_ptr<const MeshLevel> refine_uniform(std::shared_ptr<const MeshLevel> coarse) {
    const MeshLevel& c = *coarse;
    auto m = std::make_shared<MeshLevel>();
    m->level = c.level + 1;
    m->parent = coarse;
    m->vertices = c.vertices;

    const EdgeTable et = build_edge_table(c);
    std::vector<int> midpoint(et.num_edges());
    for (int e = 0; e < et.num_edges(); ++e) {
        const auto [a, b] = et.edge_vertices[e];
        midpoint[e] = m->num_vertices();
        m->vertices.push_back({0.5 * (c.vertices[a][0] + c.vertices[b][0]),
                               0.5 * (c.vertices[a][1] + c.vertices[b][1])});
        m->midpoint_parents.push_back({a, b});
    }

    for (int t = 0; t < c.num_triangles(); ++t) {
        const auto [v0, v1, v2] = c.triangles[t];
        const int m01 = midpoint[et.triangle_edges[t][2]];
        const int m12 = midpoint[et.triangle_edges[t][0]];
        const int m02 = midpoint[et.triangle_edges[t][1]];
        m->triangles.push_back({v0, m01, m02});
        m->triangles.push_back({v1, m12, m01});
        m->triangles.push_back({v2, m02, m12});
        m->triangles.push_back({m01, m12, m02});
        for (int k = 0; k < 4; ++k) m->parent_of.push_back(t);
    }
    m->refinement_edge.resize(m->triangles.size());
    for (int t = 0; t < m->num_triangles(); ++t)
        m->refinement_edge[t] = longest_edge(*m, m->triangles[t]);
    flag_boundary_by_edge_incidence(*m);
    validate_mesh(*m);
    return m;
}

std::shared_ptr<const MeshLevel> refine_bisection(std::shared_ptr<const MeshLevel> coarse,
                                                  const std::vector<int>& marked) {
    const MeshLevel& c = *coarse;
    const EdgeTable et = build_edge_table(c);

    std::vector<std::uint8_t> edge_marked(et.num_edges(), 0);
    for (int t : marked) {
        if (t < 0 || t >= c.num_triangles())
            throw MeshError("marked triangle index out of range");
        edge_marked[et.triangle_edges[t][c.refinement_edge[t]]] = 1;
    }
    // Closure: a triangle with any marked edge must also have its
    // refinement edge marked, so bisections meet conformingly.
    for (bool changed = true; changed;) {
        changed = false;
        for (int t = 0; t < c.num_triangles(); ++t) {
            const int re = et.triangle_edges[t][c.refinement_edge[t]];
            if (edge_marked[re]) continue;
            for (int e = 0; e < 3; ++e) {
                if (edge_marked[et.triangle_edges[t][e]]) {
                    edge_marked[re] = 1;
                    changed = true;
                    break;
                }
            }
        }
    }

    auto m = std::make_shared<MeshLevel>();
    m->level = c.level + 1;
    m->parent = coarse;
    m->vertices = c.vertices;

    std::vector<int> midpoint(et.num_edges(), -1);
    for (int e = 0; e < et.num_edges(); ++e) {
        if (!edge_marked[e]) continue;
        const auto [a, b] = et.edge_vertices[e];
        midpoint[e] = m->num_vertices();
        m->vertices.push_back({0.5 * (c.vertices[a][0] + c.vertices[b][0]),
                               0.5 * (c.vertices[a][1] + c.vertices[b][1])});
        m->midpoint_parents.push_back({a, b});
    }
    auto emit = [&](int parent_tri, std::array<int, 3> tri, int refedge) {
        m->triangles.push_back(tri);
        m->parent_of.push_back(parent_tri);
        m->refinement_edge.push_back(refedge);
    };

    std::map<std::pair<int, int>, int> mid_by_pair;
    for (int e = 0; e < et.num_edges(); ++e)
        if (midpoint[e] >= 0)
            mid_by_pair[{et.edge_vertices[e][0], et.edge_vertices[e][1]}] = midpoint[e];
    auto find_mid = [&](int a, int b) -> int {
        if (a > b) std::swap(a, b);
        const auto it = mid_by_pair.find({a, b});
        return it == mid_by_pair.end() ? -1 : it->second;
    };

    // Bisect (p, a, b) across its marked refinement edge (a, b); children's
    // refinement edges lie opposite the new midpoint, and only edges of the
    // original triangle can carry marks, so recursion depth is at most two.
    auto bisect = [&](auto&& self, int parent_tri, int p, int a, int b) -> void {
        const int mab = find_mid(a, b);
        if (mab < 0) throw MeshError("bisection reached an unmarked refinement edge");
        if (find_mid(p, a) >= 0)
            self(self, parent_tri, mab, p, a);
        else
            emit(parent_tri, {mab, p, a}, 0);  // refinement edge (p, a), opposite mab
        if (find_mid(b, p) >= 0)
            self(self, parent_tri, mab, b, p);
        else
            emit(parent_tri, {mab, b, p}, 0);  // refinement edge (b, p), opposite mab
    };

    for (int t = 0; t < c.num_triangles(); ++t) {
        const auto& tri = c.triangles[t];
        const int re = c.refinement_edge[t];
        const int p = tri[re], a = tri[(re + 1) % 3], b = tri[(re + 2) % 3];
        if (find_mid(a, b) < 0) {
            emit(t, tri, re);  // untouched (closure guarantees no other edge is marked)
        } else {
            bisect(bisect, t, p, a, b);
        }
    }
    flag_boundary_by_edge_incidence(*m);
    validate_mesh(*m);
    return m;
}

void validate_mesh(const MeshLevel& m) {
    const auto nt = m.triangles.size();
    if (m.parent_of.size() != nt || m.refinement_edge.size() != nt ||
        m.boundary_flags.size() != m.vertices.size())
        throw MeshError("mesh arrays have inconsistent sizes");
    for (int t = 0; t < m.num_triangles(); ++t) {
        for (int v : m.triangles[t])
            if (v < 0 || v >= m.num_vertices())
                throw MeshError("triangle vertex index out of range");
        if (m.triangle_area(t) <= 0.0)
            throw MeshError("triangle is degenerate or negatively oriented");
        if (m.refinement_edge[t] < 0 || m.refinement_edge[t] > 2)
            throw MeshError("refinement edge index out of range");
    }
    build_edge_table(m);  // throws on non-conforming edges
}

std::string mesh_to_text(const MeshLevel& m) {
    std::ostringstream os;
    os.precision(17);
    os << "vertices " << m.num_vertices() << "\n";
    for (int v = 0; v < m.num_vertices(); ++v)
        os << m.vertices[v][0] << " " << m.vertices[v][1] << " "
           << int(m.boundary_flags[v]) << "\n";
    os << "triangles " << m.num_triangles() << "\n";
    for (int t = 0; t < m.num_triangles(); ++t)
        os << m.triangles[t][0] << " " << m.triangles[t][1] << " " << m.triangles[t][2]
           << " " << m.parent_of[t] << " " << m.refinement_edge[t] << "\n";
    return os.str();
}

}  // namespace augeig
