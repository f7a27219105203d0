#include "ctrf/kernels.hpp"

#include <vector>

namespace ctrf::kernels {

namespace {

constexpr Index kParallelThreshold = 1 << 14;
constexpr Index kDotBlock = 4096;

using ConstMap = Eigen::Map<const Matrix>;
using MutMap = Eigen::Map<Matrix>;

}  // namespace

void scatter(std::span<const double> src, const Shape& src_shape, std::span<double> dst,
             std::span<const Index> dst_strides)
{
    const auto n = static_cast<Index>(src_shape.size());
    const Index inner = src_shape.back();
    const Index rows = static_cast<Index>(src.size()) / inner;
    const Index inner_stride = dst_strides[static_cast<std::size_t>(n - 1)];
    const double* s = src.data();
    double* d = dst.data();

#pragma omp parallel for schedule(static) if (static_cast<Index>(src.size()) > kParallelThreshold)
    for (Index r = 0; r < rows; ++r) {
        Index rem = r;
        Index base = 0;
        for (Index k = n - 2; k >= 0; --k) {
            const Index dk = src_shape[static_cast<std::size_t>(k)];
            base += (rem % dk) * dst_strides[static_cast<std::size_t>(k)];
            rem /= dk;
        }
        const double* row = s + r * inner;
        for (Index j = 0; j < inner; ++j) d[base + j * inner_stride] = row[j];
    }
}

void gather(std::span<const double> src, std::span<const Index> src_strides, std::span<double> dst,
            const Shape& dst_shape)
{
    const auto n = static_cast<Index>(dst_shape.size());
    const Index inner = dst_shape.back();
    const Index rows = static_cast<Index>(dst.size()) / inner;
    const Index inner_stride = src_strides[static_cast<std::size_t>(n - 1)];
    const double* s = src.data();
    double* d = dst.data();

#pragma omp parallel for schedule(static) if (static_cast<Index>(dst.size()) > kParallelThreshold)
    for (Index r = 0; r < rows; ++r) {
        Index rem = r;
        Index base = 0;
        for (Index k = n - 2; k >= 0; --k) {
            const Index dk = dst_shape[static_cast<std::size_t>(k)];
            base += (rem % dk) * src_strides[static_cast<std::size_t>(k)];
            rem /= dk;
        }
        double* row = d + r * inner;
        for (Index j = 0; j < inner; ++j) row[j] = s[base + j * inner_stride];
    }
}

void slice_gemm(const double* in, Index ra, Index i, Index rb, const Matrix& p, double* out)
{
    const Index j = p.rows();
    if (rb == 1) {
        // Slices are single columns: one (ra × i) · pᵀ product covers them all.
        MutMap(out, ra, j).noalias() = ConstMap(in, ra, i) * p.transpose();
        return;
    }
#pragma omp parallel for schedule(static) if (ra > 1 && ra * i * rb > kParallelThreshold)
    for (Index a = 0; a < ra; ++a) MutMap(out + a * j * rb, j, rb).noalias() = p * ConstMap(in + a * i * rb, i, rb);
}

DenseTensor merge_pair(const DenseTensor& left, const DenseTensor& right)
{
    if (left.order() != 3 || right.order() != 3) throw ShapeError("merge_pair expects order-3 cores");
    const Index ra = left.dim(0), ni = left.dim(1), rb = left.dim(2);
    const Index nj = right.dim(1), rc = right.dim(2);
    if (right.dim(0) != rb)
        throw ShapeError("merge_pair: rank mismatch " + to_string(left.shape()) + " / " + to_string(right.shape()));

    // prod((a, i), (j, c)) = sum_b left(a, i, b) right(b, j, c)
    const Matrix prod = ConstMap(left.raw(), ra * ni, rb) * ConstMap(right.raw(), rb, nj * rc);

    DenseTensor out({ra, ni * nj, rc});
    double* o = out.raw();
    const Index nij = ni * nj;
#pragma omp parallel for collapse(2) schedule(static) if (out.size() > kParallelThreshold)
    for (Index a = 0; a < ra; ++a) {
        for (Index jj = 0; jj < nj; ++jj) {
            for (Index ii = 0; ii < ni; ++ii) {
                const double* src = prod.data() + (a * ni + ii) * (nj * rc) + jj * rc;
                double* dst = o + ((a * nij) + jj * ni + ii) * rc;
                for (Index c = 0; c < rc; ++c) dst[c] = src[c];
            }
        }
    }
    return out;
}

Matrix close_ring(const DenseTensor& left, const DenseTensor& right)
{
    if (left.order() != 3 || right.order() != 3) throw ShapeError("close_ring expects order-3 cores");
    if (left.dim(2) != right.dim(0) || right.dim(2) != left.dim(0))
        throw ShapeError("close_ring: ranks do not close the ring " + to_string(left.shape()) + " / " +
                         to_string(right.shape()));
    return mode_n_unfold(left, 2) * tr_unfold(right, 2).transpose();
}

double dot(std::span<const double> a, std::span<const double> b)
{
    const auto n = static_cast<Index>(a.size());
    const Index blocks = (n + kDotBlock - 1) / kDotBlock;
    if (blocks <= 1) {
        double s = 0.0;
        for (Index k = 0; k < n; ++k) s += a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(k)];
        return s;
    }
    std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static)
    for (Index blk = 0; blk < blocks; ++blk) {
        const Index lo = blk * kDotBlock;
        const Index hi = std::min(n, lo + kDotBlock);
        double s = 0.0;
        for (Index k = lo; k < hi; ++k) s += a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(k)];
        partial[static_cast<std::size_t>(blk)] = s;
    }
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

}  // namespace ctrf::kernels
