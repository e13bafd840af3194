#include "augeig/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "augeig/errors.hpp"

namespace augeig {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("matrix market: empty file");
    std::istringstream hdr(line);
    std::string banner, object, format, field, symmetry;
    hdr >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        throw IoError("matrix market: malformed header");
    if (lower(format) != "coordinate" || lower(field) != "real")
        throw IoError("matrix market: only real coordinate files are supported");
    const std::string sym = lower(symmetry);
    if (sym != "general" && sym != "symmetric")
        throw IoError("matrix market: unsupported symmetry '" + symmetry + "'");
    const bool symmetric = sym == "symmetric";

    do {
        if (!std::getline(in, line)) throw IoError("matrix market: missing size line");
    } while (!line.empty() && line[0] == '%');

    long nrows = 0, ncols = 0, nnz = 0;
    {
        std::istringstream sz(line);
        if (!(sz >> nrows >> ncols >> nnz) || nrows < 0 || ncols < 0 || nnz < 0)
            throw IoError("matrix market: malformed size line");
    }

    std::map<std::pair<int, int>, double> entries;
    for (long k = 0; k < nnz; ++k) {
        long i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v)) throw IoError("matrix market: file truncated");
        if (i < 1 || i > nrows || j < 1 || j > ncols)
            throw IoError("matrix market: entry index out of bounds");
        const auto key = std::make_pair(static_cast<int>(i - 1), static_cast<int>(j - 1));
        if (entries.count(key))
            throw IoError("matrix market: duplicate entry");
        entries[key] = v;
    }

    if (symmetric) {
        if (nrows != ncols) throw IoError("matrix market: symmetric file is not square");
        std::map<std::pair<int, int>, double> full;
        for (const auto& [key, v] : entries) {
            const auto mirror = std::make_pair(key.second, key.first);
            auto it = entries.find(mirror);
            if (key.first != key.second && it != entries.end() &&
                std::abs(it->second - v) > 1e-12)
                throw IoError("matrix market: symmetric file is asymmetric beyond 1e-12");
            full[key] = v;
            full[mirror] = v;  // mirrored copy; identical pairs overwrite harmlessly
        }
        entries = std::move(full);
    }

    std::vector<int> rows, cols;
    std::vector<double> vals;
    rows.reserve(entries.size());
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (const auto& [key, v] : entries) {
        rows.push_back(key.first);
        cols.push_back(key.second);
        vals.push_back(v);
    }
    return SparseMatrix::from_triplets(static_cast<int>(nrows), static_cast<int>(ncols),
                                       rows, cols, vals);
}

SparseMatrix read_matrix_market_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("matrix market: cannot open '" + path + "'");
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m, bool symmetric) {
    if (symmetric && !m.is_symmetric(1e-12))
        throw IoError("matrix market: matrix is not symmetric enough for symmetric output");
    long nnz = 0;
    for (int i = 0; i < m.nrows; ++i)
        for (int k = m.row_offsets[i]; k < m.row_offsets[i + 1]; ++k)
            if (!symmetric || m.col_indices[k] <= i) ++nnz;

    out << "%%MatrixMarket matrix coordinate real "
        << (symmetric ? "symmetric" : "general") << "\n";
    out << m.nrows << " " << m.ncols << " " << nnz << "\n";
    char buf[64];
    for (int i = 0; i < m.nrows; ++i)
        for (int k = m.row_offsets[i]; k < m.row_offsets[i + 1]; ++k) {
            const int j = m.col_indices[k];
            if (symmetric && j > i) continue;
            std::snprintf(buf, sizeof buf, "%d %d %.16e\n", i + 1, j + 1, m.values[k]);
            out << buf;
        }
}

void write_matrix_market_file(const std::string& path, const SparseMatrix& m, bool symmetric) {
    std::ofstream out(path);
    if (!out) throw IoError("matrix market: cannot open '" + path + "' for writing");
    write_matrix_market(out, m, symmetric);
    if (!out) throw IoError("matrix market: write to '" + path + "' failed");
}

}  // namespace augeig
