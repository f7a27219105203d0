#pragma once

#include <span>

#include "ctrf/tensor.hpp"
#include "ctrf/tensor_ring.hpp"

// Serial, loop-level reference implementations. They follow the defining
// index formulas directly and are kept for testing and benchmarking only.
namespace ctrf::reference {

Matrix mode_n_unfold(const DenseTensor& t, Index mode);
Matrix tr_unfold(const DenseTensor& t, Index mode);
DenseTensor circ_shift(const DenseTensor& t, Index shift);
DenseTensor mode2_ttm(const DenseTensor& core, const Matrix& p);
DenseTensor merge_pair(const DenseTensor& left, const DenseTensor& right);
/// Elementwise evaluation of every entry through slice-matrix traces.
DenseTensor tr_reconstruct(const TRCores& cores);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace ctrf::reference
