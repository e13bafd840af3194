#include "augeig/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "augeig/errors.hpp"
#include "augeig/multivector.hpp"

namespace augeig {

double SparseMatrix::at(int i, int j) const {
    if (i < 0 || i >= nrows || j < 0 || j >= ncols) throw DimensionError("SparseMatrix::at: index out of range");
    const int* begin = col_indices.data() + row_offsets[i];
    const int* end = col_indices.data() + row_offsets[i + 1];
    const int* it = std::lower_bound(begin, end, j);
    if (it != end && *it == j) return values[it - col_indices.data()];
    return 0.0;
}

bool SparseMatrix::in_canonical_form() const {
    if (static_cast<int>(row_offsets.size()) != nrows + 1) return false;
    for (int i = 0; i < nrows; ++i) {
        for (int p = row_offsets[i]; p < row_offsets[i + 1]; ++p) {
            if (col_indices[p] < 0 || col_indices[p] >= ncols) return false;
            if (p > row_offsets[i] && col_indices[p] <= col_indices[p - 1]) return false;
        }
    }
    return true;
}

bool SparseMatrix::is_symmetric(double tol) const {
    if (nrows != ncols) return false;
    SparseMatrix t = transpose(*this);
    for (int i = 0; i < nrows; ++i) {
        int pa = row_offsets[i], pb = t.row_offsets[i];
        const int ea = row_offsets[i + 1], eb = t.row_offsets[i + 1];
        while (pa < ea || pb < eb) {
            int ca = pa < ea ? col_indices[pa] : ncols;
            int cb = pb < eb ? t.col_indices[pb] : ncols;
            double va = 0.0, vb = 0.0;
            if (ca <= cb) va = values[pa++];
            if (cb <= ca) vb = t.values[pb++];
            if (std::abs(va - vb) > tol) return false;
        }
    }
    return true;
}

SparseMatrix SparseMatrix::identity(int n) {
    SparseMatrix m(n, n);
    m.col_indices.resize(n);
    m.values.assign(n, 1.0);
    std::iota(m.col_indices.begin(), m.col_indices.end(), 0);
    std::iota(m.row_offsets.begin(), m.row_offsets.end(), 0);
    return m;
}

SparseMatrix SparseMatrix::from_triplets(int nrows, int ncols, const std::vector<int>& rows,
                                         const std::vector<int>& cols,
                                         const std::vector<double>& vals) {
    if (rows.size() != cols.size() || rows.size() != vals.size())
        throw DimensionError("from_triplets: array lengths differ");
    const size_t nt = rows.size();
    for (size_t t = 0; t < nt; ++t) {
        if (rows[t] < 0 || rows[t] >= nrows || cols[t] < 0 || cols[t] >= ncols)
            throw DimensionError("from_triplets: index out of range");
    }
    // Counting sort by row, then sort each row segment by column and
    // merge duplicates.
    SparseMatrix m(nrows, ncols);
    std::vector<int> count(nrows + 1, 0);
    for (size_t t = 0; t < nt; ++t) count[rows[t] + 1]++;
    for (int i = 0; i < nrows; ++i) count[i + 1] += count[i];
    std::vector<int> order(nt);
    {
        std::vector<int> next(count.begin(), count.end() - 1);
        for (size_t t = 0; t < nt; ++t) order[next[rows[t]]++] = static_cast<int>(t);
    }
    m.col_indices.reserve(nt);
    m.values.reserve(nt);
    for (int i = 0; i < nrows; ++i) {
        int b = count[i], e = count[i + 1];
        std::sort(order.begin() + b, order.begin() + e,
                  [&](int x, int y) { return cols[x] < cols[y]; });
        int last_col = -1;
        for (int p = b; p < e; ++p) {
            int c = cols[order[p]];
            double v = vals[order[p]];
            if (c == last_col) {
                m.values.back() += v;
            } else {
                m.col_indices.push_back(c);
                m.values.push_back(v);
                last_col = c;
            }
        }
        m.row_offsets[i + 1] = static_cast<int>(m.col_indices.size());
    }
    return m;
}

SparseMatrix transpose(const SparseMatrix& a) {
    SparseMatrix t(a.ncols, a.nrows);
    t.col_indices.resize(a.nnz());
    t.values.resize(a.nnz());
    std::vector<int> count(a.ncols + 1, 0);
    for (int c : a.col_indices) count[c + 1]++;
    for (int i = 0; i < a.ncols; ++i) count[i + 1] += count[i];
    t.row_offsets.assign(count.begin(), count.end());
    std::vector<int> next(count.begin(), count.end() - 1);
    for (int i = 0; i < a.nrows; ++i) {
        for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            int pos = next[a.col_indices[p]]++;
            t.col_indices[pos] = i;
            t.values[pos] = a.values[p];
        }
    }
    return t;
}

SparseMatrix csr_add(const SparseMatrix& a, double c, const SparseMatrix& b) {
    if (a.nrows != b.nrows || a.ncols != b.ncols) throw DimensionError("csr_add: shape mismatch");
    SparseMatrix m(a.nrows, a.ncols);
    m.col_indices.reserve(a.nnz() + b.nnz());
    m.values.reserve(a.nnz() + b.nnz());
    for (int i = 0; i < a.nrows; ++i) {
        int pa = a.row_offsets[i], pb = b.row_offsets[i];
        const int ea = a.row_offsets[i + 1], eb = b.row_offsets[i + 1];
        while (pa < ea || pb < eb) {
            int ca = pa < ea ? a.col_indices[pa] : a.ncols;
            int cb = pb < eb ? b.col_indices[pb] : a.ncols;
            int col = std::min(ca, cb);
            double v = 0.0;
            if (ca == col) v += a.values[pa++];
            if (cb == col) v += c * b.values[pb++];
            m.col_indices.push_back(col);
            m.values.push_back(v);
        }
        m.row_offsets[i + 1] = static_cast<int>(m.col_indices.size());
    }
    return m;
}

SparseMatrix csr_matmul(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.ncols != b.nrows) throw DimensionError("csr_matmul: inner dimension mismatch");
    SparseMatrix m(a.nrows, b.ncols);
    std::vector<double> acc(b.ncols, 0.0);
    std::vector<int> touched;
    touched.reserve(64);
    for (int i = 0; i < a.nrows; ++i) {
        touched.clear();
        for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            const int k = a.col_indices[p];
            const double v = a.values[p];
            for (int q = b.row_offsets[k]; q < b.row_offsets[k + 1]; ++q) {
                const int c = b.col_indices[q];
                if (acc[c] == 0.0 && std::find(touched.begin(), touched.end(), c) == touched.end())
                    touched.push_back(c);
                acc[c] += v * b.values[q];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int c : touched) {
            m.col_indices.push_back(c);
            m.values.push_back(acc[c]);
            acc[c] = 0.0;
        }
        m.row_offsets[i + 1] = static_cast<int>(m.col_indices.size());
    }
    return m;
}

SparseMatrix csr_extract(const SparseMatrix& a, const std::vector<int>& rows,
                         const std::vector<int>& cols) {
    std::vector<int> colmap(a.ncols, -1);
    for (size_t j = 0; j < cols.size(); ++j) {
        if (cols[j] < 0 || cols[j] >= a.ncols) throw DimensionError("csr_extract: column out of range");
        colmap[cols[j]] = static_cast<int>(j);
    }
    SparseMatrix m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    std::vector<std::pair<int, double>> row_buf;
    for (size_t r = 0; r < rows.size(); ++r) {
        const int i = rows[r];
        if (i < 0 || i >= a.nrows) throw DimensionError("csr_extract: row out of range");
        row_buf.clear();
        for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            int c = colmap[a.col_indices[p]];
            if (c >= 0) row_buf.emplace_back(c, a.values[p]);
        }
        std::sort(row_buf.begin(), row_buf.end());
        for (auto& [c, v] : row_buf) {
            m.col_indices.push_back(c);
            m.values.push_back(v);
        }
        m.row_offsets[r + 1] = static_cast<int>(m.col_indices.size());
    }
    return m;
}

double csr_max_abs(const SparseMatrix& a) {
    double m = 0.0;
    for (double v : a.values) m = std::max(m, std::abs(v));
    return m;
}

void spmv_into(const SparseMatrix& a, const MultiVector& x, MultiVector& y) {
    if (x.dim != a.ncols) throw DimensionError("spmv: dimension mismatch");
    if (y.dim != a.nrows || y.width != x.width) y = MultiVector(a.nrows, x.width);
    for (int j = 0; j < x.width; ++j) {
        const double* xc = x.col(j);
        double* yc = y.col(j);
        for (int i = 0; i < a.nrows; ++i) {
            double s = 0.0;
            for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
                s += a.values[p] * xc[a.col_indices[p]];
            yc[i] = s;
        }
    }
}

MultiVector spmv(const SparseMatrix& a, const MultiVector& x) {
    MultiVector y(a.nrows, x.width);
    spmv_into(a, x, y);
    return y;
}

}  // namespace augeig
