#pragma once

// Shared helpers for the test suites: seeded random data generators and
// reference routines that stay independent of the library's own kernels
// (dense double-loop products, LU determinants, polynomial root finding).

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "augeig/dense.hpp"
#include "augeig/multivector.hpp"
#include "augeig/sparse.hpp"

namespace testsup {

using augeig::DenseMatrix;
using augeig::MultiVector;
using augeig::SparseMatrix;

inline std::mt19937_64 rng(unsigned long seed) { return std::mt19937_64(seed); }

inline double urand(std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline DenseMatrix random_dense(std::mt19937_64& g, int nr, int nc) {
    DenseMatrix m(nr, nc);
    for (auto& v : m.a) v = urand(g);
    return m;
}

inline DenseMatrix random_sym(std::mt19937_64& g, int n) {
    DenseMatrix m = random_dense(g, n, n);
    m.symmetrize();
    return m;
}

// Random SPD dense matrix R^T R + shift*I.
inline DenseMatrix random_spd(std::mt19937_64& g, int n, double shift = 0.5) {
    DenseMatrix r = random_dense(g, n, n);
    DenseMatrix m = augeig::dense_matmul(augeig::dense_transpose(r), r);
    for (int i = 0; i < n; ++i) m(i, i) += shift;
    return m;
}

inline MultiVector random_mv(std::mt19937_64& g, int dim, int width) {
    MultiVector x(dim, width);
    for (auto& v : x.data) v = urand(g);
    return x;
}

inline MultiVector random_mv(int dim, int width, unsigned long seed) {
    auto g = rng(seed);
    return random_mv(g, dim, width);
}

// Random banded symmetric diagonally dominant (hence SPD) sparse matrix.
inline SparseMatrix random_sparse_spd(std::mt19937_64& g, int n, int bandwidth) {
    std::vector<int> ri, ci;
    std::vector<double> v;
    std::vector<double> diag(n, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - bandwidth); j < i; ++j) {
            if (urand(g, 0.0, 1.0) < 0.4) continue;
            double w = urand(g);
            ri.push_back(i); ci.push_back(j); v.push_back(w);
            ri.push_back(j); ci.push_back(i); v.push_back(w);
            diag[i] += std::abs(w);
            diag[j] += std::abs(w);
        }
    for (int i = 0; i < n; ++i) {
        ri.push_back(i); ci.push_back(i);
        v.push_back(diag[i] + urand(g, 0.0, 1.0));
    }
    return SparseMatrix::from_triplets(n, n, ri, ci, v);
}

inline DenseMatrix dense_of(const SparseMatrix& a) {
    DenseMatrix m(a.nrows, a.ncols);
    for (int i = 0; i < a.nrows; ++i)
        for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            m(i, a.col_indices[p]) += a.values[p];
    return m;
}

// Reference dense multiply, independent of spmv.
inline MultiVector dense_apply(const DenseMatrix& m, const MultiVector& x) {
    MultiVector y(m.nrows, x.width);
    for (int j = 0; j < x.width; ++j)
        for (int i = 0; i < m.nrows; ++i) {
            double s = 0.0;
            for (int k = 0; k < m.ncols; ++k) s += m(i, k) * x(k, j);
            y(i, j) = s;
        }
    return y;
}

// Determinant by LU with partial pivoting (independent of the library's
// Cholesky-based paths).
inline double lu_det(DenseMatrix m) {
    const int n = m.nrows;
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
        if (m(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(k, j));
            det = -det;
        }
        det *= m(k, k);
        for (int i = k + 1; i < n; ++i) {
            double f = m(i, k) / m(k, k);
            for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return det;
}

// Characteristic-polynomial oracle for det(A - x B) = 0: coefficients by
// Newton interpolation of the determinant at n+1 nodes, roots by
// Durand-Kerner iteration. Returns the real roots sorted ascending.
inline std::vector<double> charpoly_eigenvalues(const DenseMatrix& a, const DenseMatrix& b) {
    const int n = a.nrows;
    const int deg = n;
    // Sample nodes spread over a scale estimated from the matrices.
    double scale = std::max(1.0, a.max_abs() / std::max(1e-30, b.max_abs()) * n);
    std::vector<double> xs(deg + 1), fs(deg + 1);
    for (int i = 0; i <= deg; ++i) {
        xs[i] = scale * (2.0 * i / deg - 1.0);
        fs[i] = lu_det(augeig::dense_add(a, -xs[i], b));
    }
    // Newton divided differences.
    std::vector<double> dd = fs;
    for (int j = 1; j <= deg; ++j)
        for (int i = deg; i >= j; --i) dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
    // Expand to monomial coefficients c[0..deg] (c[k] multiplies x^k).
    std::vector<double> c(deg + 1, 0.0);
    for (int i = deg; i >= 0; --i) {
        for (int k = deg; k > 0; --k) c[k] = c[k - 1] - xs[i] * c[k];
        c[0] = -xs[i] * c[0];
        // after the shift-multiply, add the divided difference
        c[0] += dd[i];
    }
    // Durand-Kerner on the monic polynomial.
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    const int d = static_cast<int>(c.size()) - 1;
    for (int k = 0; k <= d; ++k) c[k] /= c[d];
    std::vector<std::complex<double>> z(d);
    for (int i = 0; i < d; ++i)
        z[i] = std::polar(scale * (0.4 + 0.5 * i / std::max(1, d - 1)),
                          0.7 + 2.0 * M_PI * i / d);
    auto eval = [&](std::complex<double> x) {
        std::complex<double> p = 1.0;
        for (int k = d - 1; k >= 0; --k) p = p * x + c[k];
        // monic: leading coefficient folded in above starting from 1
        return p;
    };
    for (int it = 0; it < 500; ++it) {
        double move = 0.0;
        for (int i = 0; i < d; ++i) {
            std::complex<double> denom = 1.0;
            for (int j = 0; j < d; ++j)
                if (j != i) denom *= (z[i] - z[j]);
            std::complex<double> step = eval(z[i]) / denom;
            z[i] -= step;
            move = std::max(move, std::abs(step));
        }
        if (move < 1e-15 * scale) break;
    }
    std::vector<double> roots;
    for (auto& r : z) roots.push_back(r.real());
    std::sort(roots.begin(), roots.end());
    return roots;
}

// Largest principal angle (radians) between the spans of two blocks that
// are both B-orthonormal: cos(theta_min over the spectrum of X^T B Y).
inline double max_principal_angle(const MultiVector& x, const MultiVector& y,
                                  const SparseMatrix& b) {
    DenseMatrix m = augeig::block_inner(x, y, &b);
    DenseMatrix mtm = augeig::dense_matmul(augeig::dense_transpose(m), m);
    std::vector<double> ev;
    DenseMatrix z;
    augeig::dense_sym_eig(mtm, ev, z);
    double smin2 = ev.front();  // smallest squared singular value
    smin2 = std::min(std::max(smin2, 0.0), 1.0);
    return std::acos(std::sqrt(smin2));
}

}  // namespace testsup
