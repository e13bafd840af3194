#include "augeig/block_ops.hpp"

namespace augeig {

namespace {
struct ShiftedOp {
    const SparseMatrix& a;
    const SparseMatrix* b;
    double shift;
    MultiVector operator()(const MultiVector& x) const {
        MultiVector y = spmv(a, x);
        if (shift != 0.0) {
            MultiVector by = spmv(*b, x);
            for (int j = 0; j < y.width; ++j) y.col_axpy(-shift, by, j, j);
        }
        return y;
    }
};
}  // namespace

BcgResult block_cg(const SparseMatrix& a, const SparseMatrix* b, const MultiVector& rhs,
                   MultiVector& x, const BcgConfig& cfg) {
    if (cfg.shift != 0.0 && b == nullptr)
        throw DimensionError("block_cg: shift requested without a B matrix");
    ShiftedOp op{a, b, cfg.shift};
    return block_cg(op, rhs, x, cfg);
}

}  // namespace augeig
