#pragma once

#include <iosfwd>
#include <string>

#include "augeig/sparse.hpp"

namespace augeig {

// Matrix Market coordinate format, real entries, 1-based indices.
// Symmetric-declared files are expanded to full storage on read; a file
// carrying both (i,j) and (j,i) with values differing by more than 1e-12
// is rejected, as are duplicate entries and out-of-range indices.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market_file(const std::string& path);

// Writes with 17 significant digits so values round-trip bit-exactly.
// With `symmetric` set, only the lower triangle is stored and the matrix
// must be symmetric to 1e-12 (relative to its largest entry).
void write_matrix_market(std::ostream& out, const SparseMatrix& m, bool symmetric);
void write_matrix_market_file(const std::string& path, const SparseMatrix& m, bool symmetric);

}  // namespace augeig
