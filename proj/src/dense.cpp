#include "augeig/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "augeig/errors.hpp"
#include "augeig/multivector.hpp"

namespace augeig {

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double DenseMatrix::col_dot(int j, const DenseMatrix& other, int jo) const {
    if (nrows != other.nrows) throw DimensionError("DenseMatrix::col_dot: row mismatch");
    double s = 0.0;
    for (int i = 0; i < nrows; ++i) s += (*this)(i, j) * other(i, jo);
    return s;
}

void DenseMatrix::col_scale(int j, double s) {
    for (int i = 0; i < nrows; ++i) (*this)(i, j) *= s;
}

void DenseMatrix::col_axpy(double alpha, const DenseMatrix& src, int js, int jd) {
    if (nrows != src.nrows) throw DimensionError("DenseMatrix::col_axpy: row mismatch");
    for (int i = 0; i < nrows; ++i) (*this)(i, jd) += alpha * src(i, js);
}

void DenseMatrix::col_assign(const DenseMatrix& src, int js, int jd) {
    if (nrows != src.nrows) throw DimensionError("DenseMatrix::col_assign: row mismatch");
    for (int i = 0; i < nrows; ++i) (*this)(i, jd) = src(i, js);
}

void DenseMatrix::col_zero(int j) {
    for (int i = 0; i < nrows; ++i) (*this)(i, j) = 0.0;
}

void DenseMatrix::keep_columns(const std::vector<int>& idx) { *this = select_columns(idx); }

DenseMatrix DenseMatrix::select_columns(const std::vector<int>& idx) const {
    DenseMatrix out(nrows, static_cast<int>(idx.size()));
    for (size_t j = 0; j < idx.size(); ++j)
        for (int i = 0; i < nrows; ++i) out(i, static_cast<int>(j)) = (*this)(i, idx[j]);
    return out;
}

void DenseMatrix::append_columns(const DenseMatrix& src) {
    if (ncols == 0 && nrows == 0) {
        *this = src;
        return;
    }
    if (nrows != src.nrows) throw DimensionError("DenseMatrix::append_columns: row mismatch");
    DenseMatrix out(nrows, ncols + src.ncols);
    for (int i = 0; i < nrows; ++i) {
        for (int j = 0; j < ncols; ++j) out(i, j) = (*this)(i, j);
        for (int j = 0; j < src.ncols; ++j) out(i, ncols + j) = src(i, j);
    }
    *this = std::move(out);
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

bool DenseMatrix::all_finite() const {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

double DenseMatrix::asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < nrows; ++i)
        for (int j = i + 1; j < ncols; ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
    return m;
}

void DenseMatrix::symmetrize() {
    for (int i = 0; i < nrows; ++i)
        for (int j = i + 1; j < ncols; ++j) {
            double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
            (*this)(i, j) = v;
            (*this)(j, i) = v;
        }
}

DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.ncols != b.nrows) throw DimensionError("dense_matmul: inner dimension mismatch");
    DenseMatrix c(a.nrows, b.ncols);
    for (int i = 0; i < a.nrows; ++i)
        for (int k = 0; k < a.ncols; ++k) {
            const double v = a(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < b.ncols; ++j) c(i, j) += v * b(k, j);
        }
    return c;
}

DenseMatrix dense_transpose(const DenseMatrix& a) {
    DenseMatrix t(a.ncols, a.nrows);
    for (int i = 0; i < a.nrows; ++i)
        for (int j = 0; j < a.ncols; ++j) t(j, i) = a(i, j);
    return t;
}

DenseMatrix dense_add(const DenseMatrix& a, double c, const DenseMatrix& b) {
    if (a.nrows != b.nrows || a.ncols != b.ncols) throw DimensionError("dense_add: shape mismatch");
    DenseMatrix m = a;
    for (size_t i = 0; i < m.a.size(); ++i) m.a[i] += c * b.a[i];
    return m;
}

DenseCholesky::DenseCholesky(const DenseMatrix& a) {
    if (!factor(a)) throw IndefiniteError("DenseCholesky: matrix is not positive definite");
}

std::optional<DenseCholesky> DenseCholesky::try_factor(const DenseMatrix& a) {
    DenseCholesky c;
    if (!c.factor(a)) return std::nullopt;
    return c;
}

bool DenseCholesky::factor(const DenseMatrix& a) {
    if (a.nrows != a.ncols) throw DimensionError("DenseCholesky: matrix not square");
    n_ = a.nrows;
    l_ = a;
    for (int j = 0; j < n_; ++j) {
        double d = l_(j, j);
        for (int k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        l_(j, j) = ljj;
        for (int i = j + 1; i < n_; ++i) {
            double s = l_(i, j);
            for (int k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
            l_(i, j) = s / ljj;
        }
    }
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) l_(i, j) = 0.0;
    return true;
}

void DenseCholesky::solve_in_place(DenseMatrix& b) const {
    if (b.nrows != n_) throw DimensionError("DenseCholesky::solve: shape mismatch");
    for (int c = 0; c < b.ncols; ++c) {
        for (int i = 0; i < n_; ++i) {
            double s = b(i, c);
            for (int k = 0; k < i; ++k) s -= l_(i, k) * b(k, c);
            b(i, c) = s / l_(i, i);
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double s = b(i, c);
            for (int k = i + 1; k < n_; ++k) s -= l_(k, i) * b(k, c);
            b(i, c) = s / l_(i, i);
        }
    }
}

std::vector<double> DenseCholesky::solve(const std::vector<double>& b) const {
    if (static_cast<int>(b.size()) != n_) throw DimensionError("DenseCholesky::solve: size mismatch");
    DenseMatrix m(n_, 1);
    for (int i = 0; i < n_; ++i) m(i, 0) = b[i];
    solve_in_place(m);
    std::vector<double> x(n_);
    for (int i = 0; i < n_; ++i) x[i] = m(i, 0);
    return x;
}

namespace {

// Householder reduction of a symmetric matrix (stored in z) to
// tridiagonal form, accumulating the transformation in z.
void tred2(DenseMatrix& z, std::vector<double>& d, std::vector<double>& e) {
    const int n = z.nrows;
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (int j = 0; j < n; ++j) d[j] = z(n - 1, j);

    for (int i = n - 1; i > 0; --i) {
        double scale = 0.0, h = 0.0;
        for (int k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (int j = 0; j < i; ++j) {
                d[j] = z(i - 1, j);
                z(i, j) = 0.0;
                z(j, i) = 0.0;
            }
        } else {
            for (int k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = f > 0.0 ? -std::sqrt(h) : std::sqrt(h);
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (int j = 0; j < i; ++j) e[j] = 0.0;
            for (int j = 0; j < i; ++j) {
                f = d[j];
                z(j, i) = f;
                g = e[j] + z(j, j) * f;
                for (int k = j + 1; k < i; ++k) {
                    g += z(k, j) * d[k];
                    e[k] += z(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (int j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (int j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (int k = j; k < i; ++k) z(k, j) -= f * e[k] + g * d[k];
                d[j] = z(i - 1, j);
                z(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    for (int i = 0; i < n - 1; ++i) {
        z(n - 1, i) = z(i, i);
        z(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (int k = 0; k <= i; ++k) d[k] = z(k, i + 1) / h;
            for (int j = 0; j <= i; ++j) {
                double g = 0.0;
                for (int k = 0; k <= i; ++k) g += z(k, i + 1) * z(k, j);
                for (int k = 0; k <= i; ++k) z(k, j) -= g * d[k];
            }
        }
        for (int k = 0; k <= i; ++k) z(k, i + 1) = 0.0;
    }
    for (int j = 0; j < n; ++j) {
        d[j] = z(n - 1, j);
        z(n - 1, j) = 0.0;
    }
    z(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

// Implicit-shift QL iteration on a symmetric tridiagonal matrix,
// rotations applied to the columns of z.
void tql2(std::vector<double>& d, std::vector<double>& e, DenseMatrix& z) {
    const int n = static_cast<int>(d.size());
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0, tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        int m = l;
        while (m < n && std::abs(e[m]) > eps * tst1) ++m;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 64) throw SingularError("tql2: QL iteration failed to converge");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0.0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (int i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (int k = 0; k < n; ++k) {
                        h = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * h;
                        z(k, i) = c * z(k, i) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

void sort_pairs_ascending(std::vector<double>& d, DenseMatrix& z) {
    const int n = static_cast<int>(d.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });
    std::vector<double> ds(n);
    DenseMatrix zs(z.nrows, z.ncols);
    for (int j = 0; j < n; ++j) {
        ds[j] = d[idx[j]];
        for (int i = 0; i < z.nrows; ++i) zs(i, j) = z(i, idx[j]);
    }
    d = std::move(ds);
    z = std::move(zs);
}

}  // namespace

void dense_sym_eig(const DenseMatrix& a, std::vector<double>& eigenvalues, DenseMatrix& z) {
    if (a.nrows != a.ncols) throw DimensionError("dense_sym_eig: matrix not square");
    z = a;
    z.symmetrize();
    std::vector<double> e;
    if (a.nrows == 0) {
        eigenvalues.clear();
        return;
    }
    tred2(z, eigenvalues, e);
    tql2(eigenvalues, e, z);
    sort_pairs_ascending(eigenvalues, z);
}

GeigResult dense_sym_geig(const DenseMatrix& a, const DenseMatrix& b, EigSelect select, int k,
                          double theta) {
    if (a.nrows != a.ncols || b.nrows != b.ncols || a.nrows != b.nrows)
        throw DimensionError("dense_sym_geig: shape mismatch");
    const int n = a.nrows;
    if (k < 0 || k > n) throw DimensionError("dense_sym_geig: bad subset size");

    DenseCholesky chol(b);  // throws IndefiniteError if B is not SPD

    // C = L^{-1} A L^{-T}, formed by two triangular solves.
    DenseMatrix m = a;  // will become L^{-1} A
    for (int c = 0; c < n; ++c)
        for (int i = 0; i < n; ++i) {
            double s = m(i, c);
            for (int t = 0; t < i; ++t) s -= chol.l(i, t) * m(t, c);
            m(i, c) = s / chol.l(i, i);
        }
    DenseMatrix mt = dense_transpose(m);
    for (int c = 0; c < n; ++c)
        for (int i = 0; i < n; ++i) {
            double s = mt(i, c);
            for (int t = 0; t < i; ++t) s -= chol.l(i, t) * mt(t, c);
            mt(i, c) = s / chol.l(i, i);
        }
    mt.symmetrize();

    std::vector<double> d;
    DenseMatrix q;
    dense_sym_eig(mt, d, q);

    // Back-transform eigenvectors: X = L^{-T} Q.
    for (int c = 0; c < n; ++c)
        for (int i = n - 1; i >= 0; --i) {
            double s = q(i, c);
            for (int t = i + 1; t < n; ++t) s -= chol.l(t, i) * q(t, c);
            q(i, c) = s / chol.l(i, i);
        }

    std::vector<int> pick(n);
    std::iota(pick.begin(), pick.end(), 0);
    if (select == EigSelect::NearestK) {
        std::stable_sort(pick.begin(), pick.end(), [&](int x, int y) {
            return std::abs(d[x] - theta) < std::abs(d[y] - theta);
        });
    }
    pick.resize(k);

    GeigResult res;
    res.eigenvalues.reserve(k);
    res.eigenvectors = DenseMatrix(n, k);
    for (int j = 0; j < k; ++j) {
        res.eigenvalues.push_back(d[pick[j]]);
        for (int i = 0; i < n; ++i) res.eigenvectors(i, j) = q(i, pick[j]);
    }
    return res;
}

DenseMatrix dense_from_multivector(const MultiVector& x) {
    DenseMatrix m(x.dim, x.width);
    for (int j = 0; j < x.width; ++j)
        for (int i = 0; i < x.dim; ++i) m(i, j) = x(i, j);
    return m;
}

MultiVector multivector_from_dense(const DenseMatrix& a) {
    MultiVector x(a.nrows, a.ncols);
    for (int j = 0; j < a.ncols; ++j)
        for (int i = 0; i < a.nrows; ++i) x(i, j) = a(i, j);
    return x;
}

}  // namespace augeig
