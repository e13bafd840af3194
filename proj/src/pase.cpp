#include "augeig/pase.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "augeig/dense.hpp"
#include "augeig/errors.hpp"

namespace augeig {

namespace {

DenseMatrix to_dense(const SparseMatrix& a) {
    DenseMatrix m(a.nrows, a.ncols);
    for (int i = 0; i < a.nrows; ++i)
        for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            m(i, a.col_indices[p]) += a.values[p];
    return m;
}

std::vector<int> index_range(int lo, int hi) {
    std::vector<int> idx(hi - lo);
    std::iota(idx.begin(), idx.end(), lo);
    return idx;
}

// Fine-space solve A u = B u0 diag(lam), warm-started at u0.
MultiVector smooth(const SparseMatrix& a, const SparseMatrix& b, const MultiVector& u0,
                   const std::vector<double>& lam, const BcgConfig& cg) {
    MultiVector rhs = spmv(b, u0);
    for (int j = 0; j < rhs.width; ++j) rhs.col_scale(j, lam[j]);
    MultiVector x = u0;
    block_cg(a, nullptr, rhs, x, cg);
    return x;
}

// P u_H + Uhat gamma: fine-space representative of an augmented vector.
MultiVector combine(const SparseMatrix& prolong, const MultiVector& uhat, const AugVec& x) {
    MultiVector fine = spmv(prolong, x.u);
    const MultiVector mixed = mix_columns(uhat, x.g);
    for (int j = 0; j < fine.width; ++j) fine.col_axpy(1.0, mixed, j, j);
    return fine;
}

// Mass-orthonormalize and project the pencil onto span(u): restores
// ascending Ritz values and B-orthonormal columns after the smoothing solves.
void fine_rayleigh_ritz(const SparseMatrix& a, const SparseMatrix& b, MultiVector& u,
                        std::vector<double>& lam) {
    auto [q, kept] = b_orthonormalize(u, b, 1e-12);
    if (kept < u.width) throw DegenerateInputError("outer iterate block lost rank");
    DenseMatrix ma = block_inner(q, spmv(a, q));
    DenseMatrix mb = block_inner(q, spmv(b, q));
    ma.symmetrize();
    mb.symmetrize();
    const GeigResult rr = dense_sym_geig(ma, mb, EigSelect::SmallestK, q.width, 0.0);
    u = mix_columns(q, rr.eigenvectors);
    lam = rr.eigenvalues;
}

struct InnerSolve {
    GcgOutcome<AugVec> sol;  // eigenvectors already mapped back to pencil coordinates
    std::string note;
};

// Shift, optionally transform, run the augmented eigensolver, map back.
InnerSolve solve_augmented(AugmentedPencil p, double theta, int want, const AugVec& x0,
                           PrecondMode mode, GcgConfig gcfg) {
    gcfg.nev = want;
    if (mode == PrecondMode::corner_b_a) gcfg.exact_inner = true;
    InnerSolve r;
    if (theta != 0.0) {
        apply_shift(p, theta);
        if (mode == PrecondMode::corner_a) {
            // the shifted stiffness corner is indefinite, so this
            // elimination cannot run; fall back to the plain pencil
            mode = PrecondMode::none;
            r.note = "stiffness-corner elimination skipped for a shifted solve";
        }
    }
    if (mode == PrecondMode::none) {
        r.sol = theta != 0.0 ? gcg_aug_shifted(p, &x0, gcfg) : gcg_aug(p, &x0, gcfg);
    } else {
        const TransformedPencil tp = precond_transform(p, mode);
        const AugVec x0t = forward_transform(tp, x0);
        r.sol = theta != 0.0 ? gcg_aug_shifted(tp.pencil, &x0t, gcfg)
                             : gcg_aug(tp.pencil, &x0t, gcfg);
        r.sol.eigenvectors = back_transform(tp, r.sol.eigenvectors);
    }
    return r;
}

// initial coarse pairs: dense below 2000 dofs, iterative above
std::pair<std::vector<double>, MultiVector> coarse_eigenpairs(const Hierarchy& h, int nev,
                                                              const PaseConfig& cfg) {
    const int n = h.a_coarse.nrows;
    if (nev > n) throw ConfigError("outer solve: coarse space has fewer dofs than pairs requested");
    if (n <= 2000) {
        const GeigResult rr = dense_sym_geig(to_dense(h.a_coarse), to_dense(h.b_coarse),
                                             EigSelect::SmallestK, nev, 0.0);
        return {rr.eigenvalues, multivector_from_dense(rr.eigenvectors)};
    }
    GcgConfig g;
    g.nev = nev;
    g.tol = std::min(1e-10, cfg.tol / 10.0);
    g.seed = cfg.seed;
    auto r = gcg_sparse(h.a_coarse, h.b_coarse, nullptr, g);
    return {std::move(r.eigenvalues), std::move(r.eigenvectors)};
}

void validate(const Hierarchy& h, const PaseConfig& cfg) {
    if (cfg.nev < 1) throw ConfigError("outer solve: nev must be positive");
    if (cfg.tol <= 0.0) throw ConfigError("outer solve: tol must be positive");
    if (h.prolong.nrows != h.a_fine.nrows || h.prolong.ncols != h.a_coarse.nrows)
        throw DimensionError("outer solve: interpolation shape does not connect the pencils");
}

void record_progress(ConvergenceReport& rep, std::vector<double> res) {
    if (!rep.residual_history.empty()) {
        const auto& prev = rep.residual_history.back();
        const double worst_prev = *std::max_element(prev.begin(), prev.end());
        const double worst = *std::max_element(res.begin(), res.end());
        rep.contraction_factors.push_back(worst_prev > 0.0 ? worst / worst_prev : 0.0);
    }
    rep.residual_history.push_back(std::move(res));
}

}  // namespace

std::vector<double> criterion_residuals(const SparseMatrix& a, const SparseMatrix& b,
                                        const std::vector<double>& lam, const MultiVector& u) {
    if (static_cast<int>(lam.size()) != u.width)
        throw DimensionError("residual criterion: eigenvalue count differs from the block width");
    const MultiVector au = spmv(a, u);
    const MultiVector bu = spmv(b, u);
    std::vector<double> res(lam.size());
    for (int j = 0; j < u.width; ++j) {
        if (lam[j] == 0.0)
            throw DegenerateInputError("residual criterion: undefined for a zero eigenvalue");
        double rr = 0.0, xx = 0.0;
        const double* pa = au.col(j);
        const double* pb = bu.col(j);
        const double* px = u.col(j);
        for (int i = 0; i < u.dim; ++i) {
            const double d = pa[i] - lam[j] * pb[i];
            rr += d * d;
            xx += px[i] * px[i];
        }
        res[j] = std::sqrt(rr) / (std::abs(lam[j]) * std::sqrt(xx));
    }
    return res;
}

std::vector<bool> check_convergence(const SparseMatrix& a, const SparseMatrix& b,
                                    const std::vector<double>& lam, const MultiVector& u,
                                    double tol) {
    const std::vector<double> res = criterion_residuals(a, b, lam, u);
    std::vector<bool> ok(res.size());
    for (std::size_t j = 0; j < res.size(); ++j) ok[j] = res[j] <= tol;
    return ok;
}

CorrectionOutcome correction_step(const Hierarchy& h, const std::vector<double>& lam,
                                  const MultiVector& u, const PaseConfig& cfg) {
    validate(h, cfg);
    const int k = u.width;
    if (k < 1 || static_cast<int>(lam.size()) != k)
        throw DimensionError("correction step: eigenvalue count differs from the block width");

    MultiVector uhat = smooth(h.a_fine, h.b_fine, u, lam, cfg.cg);
    auto [q, kept] = b_orthonormalize(uhat, h.b_fine, 1e-12);
    if (kept < k) throw DegenerateInputError("correction step: iterate block lost rank");
    uhat = std::move(q);

    const AugmentedPencil p =
        assemble_augmented(h.a_coarse, h.b_coarse, h.a_fine, h.b_fine, h.prolong, uhat);

    AugVec x0(p.dim_u(), k, k);  // current iterates: u_H = 0, gamma = I
    for (int j = 0; j < k; ++j) x0.g(j, j) = 1.0;

    GcgConfig gcfg;
    gcfg.tol = cfg.tol / 10.0;
    gcfg.seed = cfg.seed;
    const InnerSolve inner = solve_augmented(p, 0.0, k, x0, cfg.precond_mode, gcfg);

    CorrectionOutcome out;
    out.vectors = combine(h.prolong, uhat, inner.sol.eigenvectors);
    out.eigenvalues = inner.sol.eigenvalues;
    out.vectors = smooth(h.a_fine, h.b_fine, out.vectors, out.eigenvalues, cfg.cg);
    return out;
}

PaseResult pase_solve(const Hierarchy& h, const PaseConfig& cfg) {
    validate(h, cfg);
    auto [lam, u_coarse] = coarse_eigenpairs(h, cfg.nev, cfg);
    return pase_solve(h, cfg, lam, spmv(h.prolong, u_coarse));
}

PaseResult pase_solve(const Hierarchy& h, const PaseConfig& cfg,
                      const std::vector<double>& lam0, const MultiVector& u0) {
    validate(h, cfg);
    if (u0.width != cfg.nev || static_cast<int>(lam0.size()) != cfg.nev ||
        u0.dim != h.a_fine.nrows)
        throw DimensionError("outer solve: starting block shape differs from the request");

    PaseResult out;
    ConvergenceReport& rep = out.report;
    std::vector<double> lam = lam0;
    MultiVector u = u0;
    fine_rayleigh_ritz(h.a_fine, h.b_fine, u, lam);
    record_progress(rep, criterion_residuals(h.a_fine, h.b_fine, lam, u));

    for (int outer = 0; outer < cfg.max_outer && !rep.converged; ++outer) {
        CorrectionOutcome c = correction_step(h, lam, u, cfg);
        lam = std::move(c.eigenvalues);
        u = std::move(c.vectors);
        fine_rayleigh_ritz(h.a_fine, h.b_fine, u, lam);
        std::vector<double> res = criterion_residuals(h.a_fine, h.b_fine, lam, u);
        rep.converged = std::all_of(res.begin(), res.end(),
                                    [&](double r) { return r <= cfg.tol; });
        record_progress(rep, std::move(res));
        rep.outer_iterations = outer + 1;
    }
    rep.eigenvalues = lam;
    out.eigenvalues = std::move(lam);
    out.eigenvectors = std::move(u);
    return out;
}

double compute_batch_shift(const std::vector<double>& lam_coarse, int first, int count,
                           bool minus) {
    if (first < 0 || count < 1 || first + count > static_cast<int>(lam_coarse.size()))
        throw ConfigError("batch shift: eigenvalue indices out of range");
    const double lo = lam_coarse[first];
    const double hi = lam_coarse[first + count - 1];
    return minus ? 0.5 * (lo - hi) : 0.5 * (lo + hi);
}

std::vector<int> select_by_component(const AugVec& candidates, const AugmentedPencil& p,
                                     int count) {
    const int n = candidates.block_width();
    const int k = p.num_appended();
    if (candidates.num_appended() != k || candidates.dim_u() != p.dim_u())
        throw DimensionError("component selection: candidate shapes differ from the pencil");
    if (count < 1 || count > n) throw ConfigError("component selection: invalid count");

    // row i of X from X beta = u_H^T b_h + gamma^T beta
    DenseMatrix m = block_inner(candidates.u, p.b.coupling);
    m = dense_add(m, 1.0, dense_matmul(dense_transpose(candidates.g), p.b.diag));
    const auto beta = DenseCholesky::try_factor(p.b.diag);
    if (!beta) throw DegenerateInputError("component selection: singular projection basis");
    DenseMatrix xt = dense_transpose(m);
    beta->solve_in_place(xt);  // X^T = beta^{-1} m^T

    // score_i = X(i,:) beta X(i,:)^T = (m X^T)_{ii}
    std::vector<double> score(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) score[i] += m(i, j) * xt(j, i);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return score[i] > score[j]; });
    std::vector<int> pick(order.begin(), order.begin() + count);
    std::sort(pick.begin(), pick.end());
    return pick;
}

namespace {

struct BatchOutcome {
    std::vector<double> lam;
    MultiVector u;
    ConvergenceReport report;
};

// One full outer loop for one batch; throws CaptureError when a selected
// pair duplicates one already owned by an earlier batch.
BatchOutcome run_batch(const Hierarchy& h, const PaseConfig& cfg,
                       const std::vector<double>& lam_coarse, const MultiVector& u_coarse,
                       int first, int k, int extra, bool first_batch,
                       const MultiVector& prior) {
    const double theta =
        first_batch ? 0.0 : compute_batch_shift(lam_coarse, first, k, cfg.batch_shift_minus);

    BatchOutcome out;
    ConvergenceReport& rep = out.report;
    if (!first_batch) rep.notes.push_back("shift " + std::to_string(theta));

    // nearby coarse pairs (outside the batch) seed the extra candidate columns
    std::vector<int> neighbors;
    for (int j = 0; j < static_cast<int>(lam_coarse.size()); ++j)
        if (j < first || j >= first + k) neighbors.push_back(j);
    std::stable_sort(neighbors.begin(), neighbors.end(), [&](int i, int j) {
        return std::abs(lam_coarse[i] - theta) < std::abs(lam_coarse[j] - theta);
    });
    if (static_cast<int>(neighbors.size()) > extra) neighbors.resize(extra);

    std::vector<double> lam(lam_coarse.begin() + first, lam_coarse.begin() + first + k);
    MultiVector u = spmv(h.prolong, u_coarse.select_columns(index_range(first, first + k)));
    fine_rayleigh_ritz(h.a_fine, h.b_fine, u, lam);
    record_progress(rep, criterion_residuals(h.a_fine, h.b_fine, lam, u));

    GcgConfig gcfg;
    gcfg.tol = cfg.tol / 10.0;
    gcfg.seed = cfg.seed;

    for (int outer = 0; outer < cfg.max_outer && !rep.converged; ++outer) {
        MultiVector uhat = smooth(h.a_fine, h.b_fine, u, lam, cfg.cg);
        auto [q, kept] = b_orthonormalize(uhat, h.b_fine, 1e-12);
        if (kept < k) throw DegenerateInputError("batch solve: iterate block lost rank");
        uhat = std::move(q);
        const AugmentedPencil p =
            assemble_augmented(h.a_coarse, h.b_coarse, h.a_fine, h.b_fine, h.prolong, uhat);

        if (first_batch) {
            AugVec x0(p.dim_u(), k, k);
            for (int j = 0; j < k; ++j) x0.g(j, j) = 1.0;
            InnerSolve inner = solve_augmented(p, 0.0, k, x0, cfg.precond_mode, gcfg);
            if (!inner.note.empty()) rep.notes.push_back(std::move(inner.note));
            lam = std::move(inner.sol.eigenvalues);
            u = combine(h.prolong, uhat, inner.sol.eigenvectors);
        } else {
            const int want = k + extra;
            AugVec x0(p.dim_u(), k, k + static_cast<int>(neighbors.size()));
            for (int j = 0; j < k; ++j) x0.g(j, j) = 1.0;
            for (std::size_t t = 0; t < neighbors.size(); ++t)
                x0.u.col_axpy(1.0, u_coarse, neighbors[t], k + static_cast<int>(t));
            InnerSolve inner = solve_augmented(p, theta, want, x0, cfg.precond_mode, gcfg);
            if (!inner.note.empty()) rep.notes.push_back(std::move(inner.note));

            const std::vector<int> pick = select_by_component(inner.sol.eigenvectors, p, k);
            AugVec sel = inner.sol.eigenvectors.select_columns(pick);
            std::vector<double> lam_sel(k);
            for (int j = 0; j < k; ++j) lam_sel[j] = inner.sol.eigenvalues[pick[j]];

            // keep the batch internally ascending
            std::vector<int> byval(k);
            std::iota(byval.begin(), byval.end(), 0);
            std::stable_sort(byval.begin(), byval.end(),
                             [&](int i, int j) { return lam_sel[i] < lam_sel[j]; });
            sel = sel.select_columns(byval);
            std::sort(lam_sel.begin(), lam_sel.end());

            MultiVector u_new = combine(h.prolong, uhat, sel);

            // near-degenerate clusters straddling the batch boundary mix the
            // inner solve's vectors with pairs earlier batches own; project
            // those components out (priors are B-orthonormal, so the removed
            // mass is the coefficient square sum) and fail only when almost
            // nothing of the column survives the projection
            if (prior.width > 0) {
                const MultiVector bu = spmv(h.b_fine, u_new);
                const DenseMatrix coef = block_inner(prior, bu);
                const MultiVector shadow = mix_columns(prior, coef);
                for (int j = 0; j < u_new.width; ++j) {
                    const double total = u_new.col_dot(j, bu, j);
                    double inside = 0.0;
                    for (int i = 0; i < prior.width; ++i) inside += coef(i, j) * coef(i, j);
                    if (inside > 0.75 * total)
                        throw CaptureError(
                            "batch solve: selected pair duplicates an earlier batch");
                    u_new.col_axpy(-1.0, shadow, j, j);
                }
            }
            lam = std::move(lam_sel);
            u = std::move(u_new);
        }

        u = smooth(h.a_fine, h.b_fine, u, lam, cfg.cg);
        fine_rayleigh_ritz(h.a_fine, h.b_fine, u, lam);
        std::vector<double> res = criterion_residuals(h.a_fine, h.b_fine, lam, u);
        rep.converged =
            std::all_of(res.begin(), res.end(), [&](double r) { return r <= cfg.tol; });
        record_progress(rep, std::move(res));
        rep.outer_iterations = outer + 1;
    }
    rep.eigenvalues = lam;
    out.lam = std::move(lam);
    out.u = std::move(u);
    return out;
}

}  // namespace

BatchResult batch_solve(const Hierarchy& h, const PaseConfig& cfg) {
    validate(h, cfg);
    if (!cfg.batch) throw ConfigError("batch solve: no batch layout configured");
    const BatchConfig& bc = *cfg.batch;
    int total = 0;
    for (int k : bc.batch_sizes) {
        if (k < 1) throw ConfigError("batch solve: batch sizes must be positive");
        total += k;
    }
    if (total != cfg.nev) throw ConfigError("batch solve: batch sizes must sum to nev");
    if (bc.oversample && *bc.oversample < 1)
        throw ConfigError("batch solve: oversample must be positive");

    const auto [lam_coarse, u_coarse] = coarse_eigenpairs(h, cfg.nev, cfg);

    BatchResult out;
    out.eigenvectors = MultiVector(h.a_fine.nrows, 0);
    int first = 0;
    for (std::size_t t = 0; t < bc.batch_sizes.size(); ++t) {
        const int k = bc.batch_sizes[t];
        const int base_extra =
            bc.oversample ? *bc.oversample : std::max(2, (k + 3) / 4);
        int extra = base_extra;
        BatchOutcome batch;
        std::vector<std::string> retry_notes;
        for (int attempt = 0;; ++attempt) {
            try {
                batch = run_batch(h, cfg, lam_coarse, u_coarse, first, k, extra, t == 0,
                                  out.eigenvectors);
                break;
            } catch (const CaptureError&) {
                if (attempt >= 2)
                    throw CaptureError("batch solve: batch " + std::to_string(t) +
                                       " failed to capture its pairs after raising oversample");
                extra = base_extra << (attempt + 1);  // doubled increment per redo
                retry_notes.push_back("capture retry with oversample " + std::to_string(extra));
            }
        }
        for (auto& n : retry_notes) batch.report.notes.push_back(std::move(n));
        out.eigenvalues.insert(out.eigenvalues.end(), batch.lam.begin(), batch.lam.end());
        out.eigenvectors.append_columns(batch.u);
        out.reports.push_back(std::move(batch.report));
        first += k;
    }

    // global ascending order (batches can interleave at multiplicities)
    std::vector<int> order(out.eigenvalues.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return out.eigenvalues[i] < out.eigenvalues[j];
    });
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    out.eigenvectors = out.eigenvectors.select_columns(order);
    return out;
}

}  // namespace augeig
