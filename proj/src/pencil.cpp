#include "augeig/pencil.hpp"

#include "augeig/errors.hpp"

namespace augeig {

namespace {

void add_columns(MultiVector& dst, const MultiVector& src, double alpha) {
    for (int j = 0; j < dst.width; ++j) dst.col_axpy(alpha, src, j, j);
}

}  // namespace

AugVec AugVec::like_width(int w) const {
    return AugVec(dim_u(), num_appended(), w);
}

AugVec AugVec::select_columns(const std::vector<int>& idx) const {
    AugVec r;
    r.u = u.select_columns(idx);
    r.g = g.select_columns(idx);
    return r;
}

void AugVec::keep_columns(const std::vector<int>& idx) {
    u.keep_columns(idx);
    g.keep_columns(idx);
}

double AugVec::col_dot(int j, const AugVec& other, int jo) const {
    return u.col_dot(j, other.u, jo) + g.col_dot(j, other.g, jo);
}

void AugVec::col_scale(int j, double s) {
    u.col_scale(j, s);
    g.col_scale(j, s);
}

void AugVec::col_axpy(double alpha, const AugVec& src, int js, int jd) {
    u.col_axpy(alpha, src.u, js, jd);
    g.col_axpy(alpha, src.g, js, jd);
}

void AugVec::col_assign(const AugVec& src, int js, int jd) {
    u.col_assign(src.u, js, jd);
    g.col_assign(src.g, js, jd);
}

void AugVec::col_zero(int j) {
    u.col_zero(j);
    g.col_zero(j);
}

void AugVec::append_columns(const AugVec& src) {
    u.append_columns(src.u);
    g.append_columns(src.g);
}

bool AugVec::all_finite() const { return u.all_finite() && g.all_finite(); }

AugmentedPencil assemble_augmented(const SparseMatrix& a_coarse, const SparseMatrix& b_coarse,
                                   const SparseMatrix& a_fine, const SparseMatrix& b_fine,
                                   const SparseMatrix& prolong, const MultiVector& u_fine) {
    if (prolong.ncols != a_coarse.nrows || prolong.nrows != a_fine.nrows)
        throw DimensionError("assemble_augmented: prolongation shape mismatch");
    if (u_fine.dim != a_fine.nrows)
        throw DimensionError("assemble_augmented: iterate height mismatch");

    const SparseMatrix restrict_op = transpose(prolong);
    AugmentedPencil p;
    auto build_side = [&](const SparseMatrix& coarse, const SparseMatrix& fine) {
        AugSide s;
        s.corner = coarse;
        const MultiVector image = spmv(fine, u_fine);
        s.coupling = spmv(restrict_op, image);
        s.diag = block_inner(u_fine, image);
        s.diag.symmetrize();  // Rayleigh-quotient block, symmetric up to roundoff
        return s;
    };
    p.a = build_side(a_coarse, a_fine);
    p.b = build_side(b_coarse, b_fine);
    return p;
}

AugVec aug_matvec(const AugSide& s, const AugVec& x) {
    if (x.dim_u() != s.dim_u() || x.num_appended() != s.num_appended())
        throw DimensionError("aug_matvec: composite shapes differ");
    AugVec y(s.dim_u(), s.num_appended(), x.block_width());
    spmv_into(s.corner, x.u, y.u);
    if (!s.decoupled) {
        add_columns(y.u, mix_columns(s.coupling, x.g), 1.0);
        y.g = block_inner(s.coupling, x.u);
        y.g = dense_add(y.g, 1.0, dense_matmul(s.diag, x.g));
    } else {
        y.g = dense_matmul(s.diag, x.g);
    }
    return y;
}

AugVec AugPencilOp::operator()(const AugVec& x) const {
    AugVec y = aug_matvec(p.a, x);
    if (mu != 0.0) {
        const AugVec by = aug_matvec(p.b, x);
        for (int j = 0; j < y.block_width(); ++j) y.col_axpy(-mu, by, j, j);
    }
    return y;
}

void apply_shift(AugmentedPencil& p, double theta) {
    if (p.mode != PrecondMode::none)
        throw ConfigError("apply_shift: shift must precede the coupling transform");
    if (theta == 0.0) return;
    p.a.corner = csr_add(p.a.corner, -theta, p.b.corner);
    add_columns(p.a.coupling, p.b.coupling, -theta);
    p.a.diag = dense_add(p.a.diag, -theta, p.b.diag);
    p.a.decoupled = p.a.decoupled && p.b.decoupled;
    p.shift += theta;
}

TransformedPencil precond_transform(const AugmentedPencil& p, PrecondMode mode) {
    if (p.mode != PrecondMode::none)
        throw ConfigError("precond_transform: pencil already transformed");
    if (mode == PrecondMode::none)
        return {p, MultiVector(p.dim_u(), 0)};

    const bool on_a = (mode == PrecondMode::corner_a);
    const AugSide& elim = on_a ? p.a : p.b;   // side whose coupling is eliminated
    const AugSide& kept = on_a ? p.b : p.a;   // side that keeps (transformed) coupling

    const SkylineCholesky corner(elim.corner);  // throws on an indefinite corner
    const MultiVector hat = corner.solve(elim.coupling);

    AugSide elim_t;
    elim_t.corner = elim.corner;
    elim_t.coupling = MultiVector(elim.dim_u(), elim.num_appended());
    elim_t.decoupled = true;
    elim_t.diag = dense_add(elim.diag, -1.0, block_inner(elim.coupling, hat));
    elim_t.diag.symmetrize();

    AugSide kept_t;
    kept_t.corner = kept.corner;
    kept_t.coupling = kept.coupling;
    const MultiVector corner_hat = spmv(kept.corner, hat);
    add_columns(kept_t.coupling, corner_hat, -1.0);
    const DenseMatrix cross = block_inner(kept.coupling, hat);  // kept_coupling^T hat
    const DenseMatrix quad = block_inner(hat, corner_hat);
    kept_t.diag = dense_add(kept.diag, -1.0, dense_add(cross, 1.0, dense_transpose(cross)));
    kept_t.diag = dense_add(kept_t.diag, 1.0, quad);
    kept_t.diag.symmetrize();

    TransformedPencil out;
    out.pencil.a = on_a ? std::move(elim_t) : std::move(kept_t);
    out.pencil.b = on_a ? std::move(kept_t) : std::move(elim_t);
    out.pencil.mode = mode;
    out.pencil.shift = p.shift;
    out.hat = hat;
    return out;
}

AugVec back_transform(const TransformedPencil& t, const AugVec& x) {
    AugVec y = x;
    if (t.hat.width > 0) {
        if (t.hat.width != x.num_appended())
            throw DimensionError("back_transform: hat width mismatch");
        add_columns(y.u, mix_columns(t.hat, x.g), -1.0);
    }
    return y;
}

AugVec forward_transform(const TransformedPencil& t, const AugVec& x) {
    AugVec y = x;
    if (t.hat.width > 0) {
        if (t.hat.width != x.num_appended())
            throw DimensionError("forward_transform: hat width mismatch");
        add_columns(y.u, mix_columns(t.hat, x.g), 1.0);
    }
    return y;
}

AugFactor::AugFactor(const AugSide& s)
    : corner_(s.corner),
      coupling_(s.coupling),
      chat_(corner_.solve(s.coupling)),
      schur_([&] {
          DenseMatrix m = dense_add(s.diag, -1.0, block_inner(s.coupling, chat_));
          m.symmetrize();
          return DenseCholesky(m);
      }()),
      decoupled_(s.decoupled) {}

std::unique_ptr<AugFactor> AugFactor::try_factor(const AugSide& s) {
    try {
        return std::make_unique<AugFactor>(s);
    } catch (const IndefiniteError&) {
        return nullptr;
    }
}

AugVec AugFactor::solve(const AugVec& r) const {
    // block elimination: corner solve, dense Schur solve, back-substitution
    AugVec x(r.dim_u(), r.num_appended(), r.block_width());
    MultiVector t = corner_.solve(r.u);
    DenseMatrix rhs_g = r.g;
    if (!decoupled_) rhs_g = dense_add(rhs_g, -1.0, block_inner(coupling_, t));
    schur_.solve_in_place(rhs_g);
    x.g = std::move(rhs_g);
    x.u = std::move(t);
    if (!decoupled_) add_columns(x.u, mix_columns(chat_, x.g), -1.0);
    return x;
}

SparseMatrix aug_to_csr(const AugSide& s) {
    const int n = s.dim_u(), k = s.num_appended();
    std::vector<int> rows, cols;
    std::vector<double> vals;
    for (int i = 0; i < n; ++i) {
        for (int off = s.corner.row_offsets[i]; off < s.corner.row_offsets[i + 1]; ++off) {
            rows.push_back(i);
            cols.push_back(s.corner.col_indices[off]);
            vals.push_back(s.corner.values[off]);
        }
    }
    if (!s.decoupled) {
        for (int j = 0; j < k; ++j) {
            const double* c = s.coupling.col(j);
            for (int i = 0; i < n; ++i) {
                if (c[i] == 0.0) continue;
                rows.push_back(i);
                cols.push_back(n + j);
                vals.push_back(c[i]);
                rows.push_back(n + j);
                cols.push_back(i);
                vals.push_back(c[i]);
            }
        }
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            rows.push_back(n + i);
            cols.push_back(n + j);
            vals.push_back(s.diag(i, j));
        }
    return SparseMatrix::from_triplets(n + k, n + k, rows, cols, vals);
}

DenseMatrix flatten(const AugVec& x) {
    DenseMatrix m(x.dim_u() + x.num_appended(), x.block_width());
    for (int j = 0; j < x.block_width(); ++j) {
        const double* c = x.u.col(j);
        for (int i = 0; i < x.dim_u(); ++i) m(i, j) = c[i];
        for (int i = 0; i < x.num_appended(); ++i) m(x.dim_u() + i, j) = x.g(i, j);
    }
    return m;
}

AugVec unflatten(const DenseMatrix& m, int dim_u) {
    if (dim_u > m.nrows) throw DimensionError("unflatten: dim_u exceeds rows");
    AugVec x(dim_u, m.nrows - dim_u, m.ncols);
    for (int j = 0; j < m.ncols; ++j) {
        double* c = x.u.col(j);
        for (int i = 0; i < dim_u; ++i) c[i] = m(i, j);
        for (int i = dim_u; i < m.nrows; ++i) x.g(i - dim_u, j) = m(i, j);
    }
    return x;
}

}  // namespace augeig
