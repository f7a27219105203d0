#pragma once

#include <span>

#include "ctrf/tensor.hpp"

// OpenMP data-parallel kernels behind the tensor and tensor-ring operations.
// Every kernel here has a serial counterpart in ctrf/reference.hpp that the
// unit tests and bench_kernels compare against.
namespace ctrf::kernels {

/// Writes src element (i_1..i_N) to dst[sum_k i_k * dst_strides[k]].
/// The strides must describe a bijection onto dst. Pure data movement, so the
/// result is bit-identical to the serial version.
void scatter(std::span<const double> src, const Shape& src_shape, std::span<double> dst,
             std::span<const Index> dst_strides);

/// Reads dst element (i_1..i_N) from src[sum_k i_k * src_strides[k]].
void gather(std::span<const double> src, std::span<const Index> src_strides, std::span<double> dst,
            const Shape& dst_shape);

/// out(a, :, b) = p * in(a, :, b) for an (Ra, I, Rb) input. Parallel over a.
void slice_gemm(const double* in, Index ra, Index i, Index rb, const Matrix& p, double* out);

/// Multilinear product of adjacent cores (Ra, I, Rb) x (Rb, J, Rc) -> (Ra, I*J, Rc),
/// merged middle index i + j * I.
DenseTensor merge_pair(const DenseTensor& left, const DenseTensor& right);

/// Closes the ring: out(k, l) = sum_{a,c} left(a, k, c) * right(c, l, a),
/// returned as a (K × L) matrix.
Matrix close_ring(const DenseTensor& left, const DenseTensor& right);

/// Sum of elementwise products, accumulated over fixed-size blocks in a fixed
/// order so the value does not depend on the thread count.
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace ctrf::kernels
