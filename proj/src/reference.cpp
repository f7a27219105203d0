#include "ctrf/reference.hpp"

namespace ctrf::reference {

namespace {

// Advances a multi-index in DenseTensor order; returns false after the last one.
bool next_index(std::vector<Index>& idx, const Shape& shape)
{
    for (Index k = static_cast<Index>(shape.size()) - 1; k >= 0; --k) {
        auto& i = idx[static_cast<std::size_t>(k)];
        if (++i < shape[static_cast<std::size_t>(k)]) return true;
        i = 0;
    }
    return false;
}

// Column index for the listed modes, first listed mode fastest.
Index column_of(const std::vector<Index>& idx, const Shape& shape, const std::vector<Index>& modes)
{
    Index col = 0, w = 1;
    for (Index k : modes) {
        col += idx[static_cast<std::size_t>(k)] * w;
        w *= shape[static_cast<std::size_t>(k)];
    }
    return col;
}

Matrix unfold_listed(const DenseTensor& t, Index mode, const std::vector<Index>& col_modes)
{
    const Shape& shape = t.shape();
    const Index rows = shape[static_cast<std::size_t>(mode - 1)];
    Matrix m(rows, t.size() / rows);
    std::vector<Index> idx(shape.size(), 0);
    Index flat = 0;
    do {
        m(idx[static_cast<std::size_t>(mode - 1)], column_of(idx, shape, col_modes)) = t.data()[static_cast<std::size_t>(flat++)];
    } while (next_index(idx, shape));
    return m;
}

}  // namespace

Matrix mode_n_unfold(const DenseTensor& t, Index mode)
{
    std::vector<Index> cols;
    for (Index k = 0; k < t.order(); ++k)
        if (k != mode - 1) cols.push_back(k);
    return unfold_listed(t, mode, cols);
}

Matrix tr_unfold(const DenseTensor& t, Index mode)
{
    std::vector<Index> cols;
    for (Index s = 1; s < t.order(); ++s) cols.push_back((mode - 1 + s) % t.order());
    return unfold_listed(t, mode, cols);
}

DenseTensor circ_shift(const DenseTensor& t, Index shift)
{
    const Index n = t.order();
    Shape out_shape(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) out_shape[static_cast<std::size_t>(k)] = t.dim((k + shift) % n);
    DenseTensor out(out_shape);
    std::vector<Index> idx(static_cast<std::size_t>(n), 0), rot(static_cast<std::size_t>(n));
    do {
        for (Index k = 0; k < n; ++k) rot[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>((k + shift) % n)];
        out.at(rot) = t.at(idx);
    } while (next_index(idx, t.shape()));
    return out;
}

DenseTensor mode2_ttm(const DenseTensor& core, const Matrix& p)
{
    DenseTensor out({core.dim(0), p.rows(), core.dim(2)});
    for (Index a = 0; a < core.dim(0); ++a)
        for (Index r = 0; r < p.rows(); ++r)
            for (Index b = 0; b < core.dim(2); ++b) {
                double s = 0.0;
                for (Index j = 0; j < core.dim(1); ++j) s += p(r, j) * core(a, j, b);
                out(a, r, b) = s;
            }
    return out;
}

DenseTensor merge_pair(const DenseTensor& left, const DenseTensor& right)
{
    const Index ra = left.dim(0), ni = left.dim(1), rb = left.dim(2);
    const Index nj = right.dim(1), rc = right.dim(2);
    DenseTensor out({ra, ni * nj, rc});
    for (Index a = 0; a < ra; ++a)
        for (Index j = 0; j < nj; ++j)
            for (Index i = 0; i < ni; ++i)
                for (Index c = 0; c < rc; ++c) {
                    double s = 0.0;
                    for (Index b = 0; b < rb; ++b) s += left(a, i, b) * right(b, j, c);
                    out(a, j * ni + i, c) = s;
                }
    return out;
}

DenseTensor tr_reconstruct(const TRCores& cores)
{
    const Shape dims = cores.dims();
    DenseTensor out(dims);
    std::vector<Index> idx(dims.size(), 0);
    Index flat = 0;
    do {
        out.data()[static_cast<std::size_t>(flat++)] = tr_element(cores, idx);
    } while (next_index(idx, dims));
    return out;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

}  // namespace ctrf::reference
