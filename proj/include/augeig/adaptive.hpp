#pragma once

#include <memory>
#include <vector>

#include "augeig/fespace.hpp"
#include "augeig/mesh.hpp"
#include "augeig/multivector.hpp"
#include "augeig/pase.hpp"

namespace augeig {

// Residual-based a posteriori indicators, one eta^2 per triangle. `total`
// is the sum of `per_triangle` taken in triangle order.
struct ErrorIndicators {
    std::vector<double> per_triangle;
    double total = 0.0;
};

// Squared element residual per eigenpair on triangle t: the strong-form
// residual of a piecewise-linear function has no second-derivative part,
// so this is ||lam_i u_i||^2_{0,T} from the exact P1 mass form.
// `nodal_u` holds per-vertex values (see nodal_values).
std::vector<double> element_residual(const MeshLevel& mesh, const std::vector<double>& lam,
                                     const MultiVector& nodal_u, int t);

// Normal-derivative jump across interior edge e, per eigenpair:
// 1/2 (grad u|_{T+} . n+ + grad u|_{T-} . n-) with the outward unit normals
// of the two incident triangles. Symmetric in the triangle labels.
// Throws MeshError for a boundary edge.
std::vector<double> jump_residual(const MeshLevel& mesh, const EdgeTable& edges,
                                  const MultiVector& nodal_u, int e);

// eta^2(T) = h_T^2 sum_i ||R_i||^2_{0,T} + sum_{e in dT interior} h_e sum_i ||J_i||^2_{0,e}
// with h_T the triangle diameter and h_e the edge length, summed over all
// columns of u (free-dof layout). Interior edges charge both triangles.
ErrorIndicators error_indicator(const FeSpace& space, const std::vector<double>& lam,
                                const MultiVector& u);

// Greedy bulk marking: the smallest set of triangles, taken by descending
// indicator (ties to the lower index), whose sum reaches fraction * total.
// Returns ascending triangle ids. fraction must lie in (0, 1].
std::vector<int> dorfler_mark(const ErrorIndicators& ind, double fraction = 0.4);

struct AdaptiveConfig {
    int nev = 1;
    double tol = 1e-8;        // outer-solve tolerance per round
    int rounds = 12;          // estimate-mark-bisect passes after the initial solve
    double fraction = 0.4;    // bulk parameter
    int max_outer = 30;
    BcgConfig cg;
    unsigned long seed = 0x5eedUL;
};

struct AdaptiveRoundRecord {
    int num_dofs = 0;
    int num_triangles = 0;
    std::vector<double> eigenvalues;
    std::vector<double> residuals;
    ErrorIndicators indicators;  // estimate on this round's mesh
    double total_eta2 = 0.0;
    int num_marked = 0;  // triangles marked for the next round
    bool converged = false;
};

struct AdaptiveResult {
    std::vector<AdaptiveRoundRecord> rounds;  // rounds[0] is the initial mesh
    std::vector<double> eigenvalues;          // final round
    MultiVector eigenvectors;                 // free dofs of the final space
    FeSpace space;                            // final space
    ErrorIndicators indicators;               // final-round estimate
};

// Adaptive eigenvalue loop: solve on mesh0, then repeat estimate, mark,
// bisect, and re-solve. The level-0 space stays the coarse space of every
// outer solve (prolongation composed through the bisection history), and
// each round warm-starts from the previous eigenvectors interpolated onto
// the new mesh. `coeff` selects the bilinear forms on every level.
AdaptiveResult adaptive_solve(std::shared_ptr<const MeshLevel> mesh0, const AdaptiveConfig& cfg,
                              const Coefficients& coeff = {});

}  // namespace augeig
