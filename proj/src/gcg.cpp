#include "augeig/gcg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <random>

#include "augeig/errors.hpp"

namespace augeig {

AugSide combine_sides(const AugSide& x, double c, const AugSide& y) {
    if (x.dim_u() != y.dim_u() || x.num_appended() != y.num_appended())
        throw DimensionError("combine_sides: shapes differ");
    AugSide r;
    r.corner = csr_add(x.corner, c, y.corner);
    r.coupling = x.coupling;
    for (int j = 0; j < r.coupling.width; ++j) r.coupling.col_axpy(c, y.coupling, j, j);
    r.diag = dense_add(x.diag, c, y.diag);
    r.decoupled = x.decoupled && y.decoupled;
    return r;
}

namespace {

// Adapters present both pencil representations to the iteration through
// one small surface: matvecs per side, shifted matvec, factorization
// probes, and an exact mass solve for the harmonic projection.

struct AugAdapter {
    const AugmentedPencil& p;
    using Block = AugVec;

    int dim() const { return p.dim_total(); }
    double theta() const { return p.shift; }
    Block zeros(int w) const { return AugVec(p.dim_u(), p.num_appended(), w); }
    Block random(int w, std::mt19937_64& g) const {
        Block x = zeros(w);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (auto& v : x.u.data) v = d(g);
        for (auto& v : x.g.a) v = d(g);
        return x;
    }
    Block apply_s(const Block& x) const { return aug_matvec(p.a, x); }
    Block apply_b(const Block& x) const { return aug_matvec(p.b, x); }
    Block apply_shifted(const Block& x, double mu) const {
        return AugPencilOp{p, mu}(x);
    }
    std::function<Block(const Block&)> factor_solver(double mu) const {
        std::shared_ptr<AugFactor> f =
            AugFactor::try_factor(mu == 0.0 ? p.a : combine_sides(p.a, -mu, p.b));
        if (!f) return {};
        return [f](const Block& r) { return f->solve(r); };
    }
    std::function<Block(const Block&)> mass_solver() const {
        auto f = std::make_shared<AugFactor>(p.b);
        return [f](const Block& r) { return f->solve(r); };
    }
};

struct SparseAdapter {
    const SparseMatrix& s;  // stiffness side; any target shift already folded in
    const SparseMatrix& b;
    double target = 0.0;
    using Block = MultiVector;

    int dim() const { return s.nrows; }
    double theta() const { return target; }
    Block zeros(int w) const { return MultiVector(s.nrows, w); }
    Block random(int w, std::mt19937_64& g) const {
        Block x = zeros(w);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (auto& v : x.data) v = d(g);
        return x;
    }
    Block apply_s(const Block& x) const { return spmv(s, x); }
    Block apply_b(const Block& x) const { return spmv(b, x); }
    Block apply_shifted(const Block& x, double mu) const {
        Block y = spmv(s, x);
        if (mu != 0.0) {
            const Block by = spmv(b, x);
            for (int j = 0; j < y.width; ++j) y.col_axpy(-mu, by, j, j);
        }
        return y;
    }
    std::function<Block(const Block&)> factor_solver(double mu) const {
        std::shared_ptr<SkylineCholesky> f =
            SkylineCholesky::try_factor(mu == 0.0 ? s : csr_add(s, -mu, b));
        if (!f) return {};
        return [f](const Block& r) { return f->solve(r); };
    }
    std::function<Block(const Block&)> mass_solver() const {
        auto f = std::make_shared<SkylineCholesky>(b);
        return [f](const Block& r) { return f->solve(r); };
    }
};

// Orthonormalizes x0 in the `ip` inner product and appends deterministic
// random directions until the block holds m independent columns.
template <class Adapter, class Ip>
typename Adapter::Block complete_block(const Adapter& ad,
                                       const typename Adapter::Block* x0, int m, Ip&& ip,
                                       double drop_tol, unsigned long seed) {
    using Block = typename Adapter::Block;
    Block x = x0 ? *x0 : ad.zeros(0);
    mgs_b_orthonormalize(x, ip, drop_tol);
    std::mt19937_64 g(seed);
    for (int tries = 0; x.block_width() < m; ++tries) {
        if (tries > 8) throw DegenerateInputError("eigensolver: basis completion failed");
        Block extra = ad.random(m - x.block_width(), g);
        mgs_b_orthonormalize(extra, ip, drop_tol, x.block_width() ? &x : nullptr);
        x.append_columns(extra);
    }
    return x;
}

template <class Block>
std::vector<double> residual_norms(Block sx, const Block& bx, const Block& x,
                                   const std::vector<double>& nu,
                                   const std::vector<double>& lam) {
    // ||S x - nu B x|| / (|lam| ||x||); S and nu are the shifted pair, lam
    // the eigenvalue that normalizes the criterion
    std::vector<double> r(x.block_width());
    for (int j = 0; j < x.block_width(); ++j) {
        sx.col_axpy(-nu[j], bx, j, j);
        const double denom = std::max(std::abs(lam[j]), 1e-300) *
                             std::sqrt(x.col_dot(j, x, j));
        r[j] = std::sqrt(sx.col_dot(j, sx, j)) / denom;
    }
    return r;
}

std::vector<int> index_range(int from, int to) {
    std::vector<int> idx(to - from);
    std::iota(idx.begin(), idx.end(), from);
    return idx;
}

// P candidate: the part of the new iterates outside the old X block
// (rows [0, mx) of the Ritz coefficients are zeroed before mixing).
template <class Block>
Block p_candidate(const Block& basis, const DenseMatrix& coeff, int mx) {
    DenseMatrix c = coeff;
    for (int i = 0; i < mx && i < c.nrows; ++i)
        for (int j = 0; j < c.ncols; ++j) c(i, j) = 0.0;
    return block_mix(basis, c);
}

// ---------------------------------------------------------------------
// standard variant: smallest eigenpairs, Rayleigh-Ritz on [X, P, W]

template <class Adapter>
GcgOutcome<typename Adapter::Block> gcg_smallest(const Adapter& ad,
                                                 const typename Adapter::Block* x0,
                                                 const GcgConfig& cfg) {
    using Block = typename Adapter::Block;
    if (cfg.nev < 1) throw ConfigError("eigensolver: nev must be positive");
    const int m = std::max(cfg.nev, x0 ? x0->block_width() : cfg.nev);
    if (m > ad.dim()) throw ConfigError("eigensolver: block wider than the problem");

    auto bop = [&](const Block& v) { return ad.apply_b(v); };

    GcgOutcome<Block> out;
    GcgHistory& hist = out.history;
    hist.exact_inner = cfg.exact_inner;

    Block x = complete_block(ad, x0, m, bop, cfg.drop_tol, cfg.seed);
    std::vector<double> lam(m, 0.0);
    {
        DenseMatrix ma = block_gram(x, ad.apply_s(x));
        DenseMatrix mb = block_gram(x, ad.apply_b(x));
        ma.symmetrize();
        mb.symmetrize();
        const GeigResult rr = dense_sym_geig(ma, mb, EigSelect::SmallestK, m, 0.0);
        x = block_mix(x, rr.eigenvectors);
        lam = rr.eigenvalues;
    }

    Block p_dirs = ad.zeros(0);
    std::vector<double> res;
    bool converged = false;

    for (int it = 0;; ++it) {
        if (x.block_width() < m)
            x = complete_block(ad, &x, m, bop, cfg.drop_tol, cfg.seed + it + 1);
        res = residual_norms(ad.apply_s(x), ad.apply_b(x), x, lam, lam);
        int locked = 0;
        while (locked < static_cast<int>(res.size()) && res[locked] <= cfg.tol) ++locked;
        if (locked >= cfg.nev) {
            converged = true;
            break;
        }
        if (it >= cfg.max_iters) break;

        double worst = 0.0;
        for (int j = locked; j < m; ++j) worst = std::max(worst, res[j]);

        // shift below the current spectrum, validated by a factorization
        // probe; the step widens geometrically until the probe accepts
        const double spread = lam[m - 1] - lam[0];
        double delta = 0.1 * (spread > 0 ? spread : std::max(1.0, std::abs(lam[0])));
        double mu = 0.0;
        std::function<Block(const Block&)> solver;
        for (int tries = 0; tries < 14 && !solver; ++tries) {
            mu = lam[0] - delta;
            solver = ad.factor_solver(mu);
            if (!solver) delta *= 4.0;
        }
        if (!solver) throw IndefiniteError("eigensolver: no admissible inner shift");

        // W step on the unconverged columns. Solving against the residual
        // S xa - B xa diag(lam) yields the correction directly: the exact
        // solution then carries no large X component for the
        // orthogonalization below to cancel, which would otherwise floor
        // the attainable accuracy. Per column it differs from the
        // B xa diag(lam) right-hand side only by a multiple of the x
        // column already in the basis, so the search space is the same.
        Block xa = x.select_columns(index_range(locked, m));
        Block rhs = ad.apply_s(xa);
        {
            const Block bxa = ad.apply_b(xa);
            for (int j = 0; j < rhs.block_width(); ++j)
                rhs.col_axpy(-lam[locked + j], bxa, j, j);
        }
        Block w = xa.like_width(xa.block_width());
        int inner_used = 0;
        if (cfg.exact_inner) {
            w = solver(rhs);
        } else {
            auto op = [&](const Block& v) { return ad.apply_shifted(v, mu); };
            const BcgResult r = block_cg(op, rhs, w, cfg.inner);
            inner_used = r.iters;
        }

        // subspace [X | P | W], orthonormalized in stages so the block
        // boundaries stay known for the P update
        Block basis = x;
        mgs_b_orthonormalize(basis, bop, cfg.drop_tol);
        const int mx = basis.block_width();
        mgs_b_orthonormalize(p_dirs, bop, cfg.drop_tol, &basis);
        basis.append_columns(p_dirs);
        mgs_b_orthonormalize(w, bop, cfg.drop_tol, &basis);
        basis.append_columns(w);

        DenseMatrix ma = block_gram(basis, ad.apply_s(basis));
        DenseMatrix mb = block_gram(basis, ad.apply_b(basis));
        ma.symmetrize();
        mb.symmetrize();
        const int want = std::min(m, basis.block_width());
        const GeigResult rr = dense_sym_geig(ma, mb, EigSelect::SmallestK, want, 0.0);
        x = block_mix(basis, rr.eigenvectors);
        lam = rr.eigenvalues;
        p_dirs = p_candidate(basis, rr.eigenvectors, mx);

        hist.iterations.push_back({mu, inner_used, worst, locked});
    }

    const std::vector<int> keep = index_range(0, cfg.nev);
    out.eigenvectors = x.select_columns(keep);
    out.eigenvalues.assign(lam.begin(), lam.begin() + cfg.nev);
    hist.final_residuals.assign(res.begin(), res.begin() + cfg.nev);
    hist.converged = converged;
    return out;
}

// ---------------------------------------------------------------------
// interior variant: harmonic projection around the recorded shift

struct HarmonicPairs {
    std::vector<double> nu;  // shifted eigenvalue estimates, |nu| ascending
    DenseMatrix coeff;       // basis mixing coefficients
};

template <class Adapter>
HarmonicPairs harmonic_project(const Adapter& ad, const typename Adapter::Block& basis,
                               const std::function<typename Adapter::Block(
                                   const typename Adapter::Block&)>& mass_inv,
                               int want) {
    using Block = typename Adapter::Block;
    const Block sv = ad.apply_s(basis);
    const Block minv_sv = mass_inv(sv);
    DenseMatrix h = block_gram(sv, minv_sv);  // V^T S B^-1 S V, SPD
    DenseMatrix k = block_gram(basis, sv);    // V^T S V, symmetric
    h.symmetrize();
    k.symmetrize();
    // Harmonic condition K c = mu H c with nu = 1/mu; H is the definite
    // side, so the flipped problem fits the symmetric solver. The closest
    // pairs to the shift have the largest |mu|.
    const GeigResult flip =
        dense_sym_geig(k, h, EigSelect::SmallestK, k.nrows, 0.0);
    std::vector<int> order(flip.eigenvalues.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return std::abs(flip.eigenvalues[i]) > std::abs(flip.eigenvalues[j]);
    });
    const int take = std::min<int>(want, order.size());
    HarmonicPairs hp;
    hp.coeff = DenseMatrix(k.nrows, take);
    for (int j = 0; j < take; ++j) {
        const int src = order[j];
        const double mu = flip.eigenvalues[src];
        // a vanishing mu marks a direction with no spectral content near
        // the shift; cap its estimate so downstream scaling stays finite
        hp.nu.push_back(std::abs(mu) > 1e-14 ? 1.0 / mu : 1e14);
        for (int i = 0; i < k.nrows; ++i) hp.coeff(i, j) = flip.eigenvectors(i, src);
    }
    return hp;
}

template <class Adapter>
GcgOutcome<typename Adapter::Block> gcg_interior(const Adapter& ad,
                                                 const typename Adapter::Block* x0,
                                                 const GcgConfig& cfg) {
    using Block = typename Adapter::Block;
    if (cfg.nev < 1) throw ConfigError("eigensolver: nev must be positive");
    const int m = std::max(cfg.nev, x0 ? x0->block_width() : cfg.nev);
    if (m > ad.dim()) throw ConfigError("eigensolver: block wider than the problem");
    const double theta = ad.theta();

    auto euclid = [](const Block& v) { return v; };
    const auto mass_inv = ad.mass_solver();

    GcgOutcome<Block> out;
    GcgHistory& hist = out.history;

    // the shifted operator is factorable only when the shift lies outside
    // the spectrum; otherwise W solves run on the normal equations
    const auto exact = ad.factor_solver(0.0);
    hist.exact_inner = static_cast<bool>(exact);
    hist.used_normal_equations = !exact;

    Block x = complete_block(ad, x0, m, euclid, cfg.drop_tol, cfg.seed);
    std::vector<double> nu(m, 0.0), lam(m, theta);
    {
        const HarmonicPairs hp = harmonic_project(ad, x, mass_inv, m);
        x = block_mix(x, hp.coeff);
        nu = hp.nu;
        for (int j = 0; j < x.block_width(); ++j) {
            const double n = std::sqrt(x.col_dot(j, x, j));
            if (n > 0) x.col_scale(j, 1.0 / n);
        }
        lam.resize(nu.size());
        for (std::size_t j = 0; j < nu.size(); ++j) lam[j] = theta + nu[j];
    }

    Block p_dirs = ad.zeros(0);
    std::vector<double> res;

    for (int it = 0;; ++it) {
        if (x.block_width() < m)
            x = complete_block(ad, &x, m, euclid, cfg.drop_tol, cfg.seed + it + 1);
        res = residual_norms(ad.apply_s(x), ad.apply_b(x), x, nu, lam);
        int locked = 0;
        while (locked < static_cast<int>(res.size()) && res[locked] <= cfg.tol) ++locked;
        if (locked >= cfg.nev || it >= cfg.max_iters) break;

        double worst = 0.0;
        for (int j = locked; j < m; ++j) worst = std::max(worst, res[j]);

        // residual right-hand side, for the same cancellation-free reason
        // as in the smallest-pair sweep above
        Block xa = x.select_columns(index_range(locked, m));
        Block rhs = ad.apply_s(xa);
        {
            const Block bxa = ad.apply_b(xa);
            for (int j = 0; j < rhs.block_width(); ++j)
                rhs.col_axpy(-nu[locked + j], bxa, j, j);
        }
        Block w = xa.like_width(xa.block_width());
        int inner_used = 0;
        if (exact) {
            w = exact(rhs);
        } else {
            auto op = [&](const Block& v) { return ad.apply_s(ad.apply_s(v)); };
            const Block rhs_n = ad.apply_s(rhs);
            const BcgResult r = block_cg(op, rhs_n, w, cfg.inner);
            inner_used = r.iters;
        }

        Block basis = x;
        mgs_b_orthonormalize(basis, euclid, cfg.drop_tol);
        const int mx = basis.block_width();
        mgs_b_orthonormalize(p_dirs, euclid, cfg.drop_tol, &basis);
        basis.append_columns(p_dirs);
        mgs_b_orthonormalize(w, euclid, cfg.drop_tol, &basis);
        basis.append_columns(w);

        const HarmonicPairs hp = harmonic_project(ad, basis, mass_inv, m);
        x = block_mix(basis, hp.coeff);
        for (int j = 0; j < x.block_width(); ++j) {
            const double n = std::sqrt(x.col_dot(j, x, j));
            if (n > 0) x.col_scale(j, 1.0 / n);
        }
        nu = hp.nu;
        lam.resize(nu.size());
        for (std::size_t j = 0; j < nu.size(); ++j) lam[j] = theta + nu[j];
        p_dirs = p_candidate(basis, hp.coeff, mx);

        hist.iterations.push_back({theta, inner_used, worst, locked});
    }

    // final Rayleigh-Ritz on the original pencil over span(x): restores
    // B-orthonormal vectors and removes the harmonic bias
    auto apply_a = [&](const Block& v) {
        Block y = ad.apply_s(v);
        if (theta != 0.0) {
            const Block bv = ad.apply_b(v);
            for (int j = 0; j < y.block_width(); ++j) y.col_axpy(theta, bv, j, j);
        }
        return y;
    };
    DenseMatrix ma = block_gram(x, apply_a(x));
    DenseMatrix mb = block_gram(x, ad.apply_b(x));
    ma.symmetrize();
    mb.symmetrize();
    const GeigResult rr =
        dense_sym_geig(ma, mb, EigSelect::NearestK, cfg.nev, theta);
    out.eigenvectors = block_mix(x, rr.eigenvectors);
    out.eigenvalues = rr.eigenvalues;

    std::vector<double> nu_final(cfg.nev), lam_final = rr.eigenvalues;
    for (int j = 0; j < cfg.nev; ++j) nu_final[j] = lam_final[j] - theta;
    hist.final_residuals = residual_norms(ad.apply_s(out.eigenvectors),
                                          ad.apply_b(out.eigenvectors),
                                          out.eigenvectors, nu_final, lam_final);
    hist.converged = true;
    for (double r : hist.final_residuals) hist.converged = hist.converged && r <= cfg.tol;
    return out;
}

}  // namespace

GcgOutcome<AugVec> gcg_aug(const AugmentedPencil& p, const AugVec* x0,
                           const GcgConfig& cfg) {
    return gcg_smallest(AugAdapter{p}, x0, cfg);
}

GcgOutcome<AugVec> gcg_aug_shifted(const AugmentedPencil& p, const AugVec* x0,
                                   const GcgConfig& cfg) {
    return gcg_interior(AugAdapter{p}, x0, cfg);
}

GcgOutcome<MultiVector> gcg_sparse(const SparseMatrix& a, const SparseMatrix& b,
                                   const MultiVector* x0, const GcgConfig& cfg) {
    const SparseAdapter ad{a, b, 0.0};
    return gcg_smallest(ad, x0, cfg);
}

GcgOutcome<MultiVector> gcg_sparse_shifted(const SparseMatrix& a, const SparseMatrix& b,
                                           const MultiVector* x0, const GcgConfig& cfg) {
    const SparseMatrix s = csr_add(a, -cfg.theta, b);
    const SparseAdapter ad{s, b, cfg.theta};
    return gcg_interior(ad, x0, cfg);
}

}  // namespace augeig
