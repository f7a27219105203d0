#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ctrf/tensor.hpp"

namespace ctrf {

/**
 * Tensor-ring decomposition: cores G(1..N), core n of shape (R_n, I_n, R_{n+1})
 * with the ring closed by R_{N+1} = R_1. Element (i_1..i_N) of the represented
 * tensor is Tr(G(1)(i_1) ... G(N)(i_N)), where G(n)(i) is the R_n × R_{n+1}
 * lateral slice.
 */
class TRCores {
public:
    TRCores() = default;
    /// Throws ShapeError unless the cores form a consistent ring.
    explicit TRCores(std::vector<DenseTensor> cores);

    Index order() const noexcept { return static_cast<Index>(cores_.size()); }
    /// Zero-based core access.
    const DenseTensor& core(Index n) const { return cores_.at(static_cast<std::size_t>(n)); }
    /// Replaces core n; the new core must keep the ring ranks and mode size.
    void set_core(Index n, DenseTensor core);
    const std::vector<DenseTensor>& cores() const noexcept { return cores_; }

    /// (R_1, ..., R_N).
    std::vector<Index> ranks() const;
    /// (I_1, ..., I_N).
    Shape dims() const;

    /// Cores n+1..N, 1..n: the ring whose reconstruction is circ_shift(Φ(G), n).
    TRCores rotated(Index shift) const;

private:
    std::vector<DenseTensor> cores_;
};

/// Tr(G(1)(i_1) ... G(N)(i_N)).
double tr_element(const TRCores& c, std::span<const Index> idx);

/// Φ(G): the full tensor, built by merging cores rather than per element.
DenseTensor tr_reconstruct(const TRCores& c);

/// Multilinear product of `count` consecutive cores starting at zero-based
/// `first`, wrapping past N. Result shape (R_first, prod I_k, R_{first+count}),
/// with the earliest core's index varying fastest in the merged mode, i.e.
/// slice (i + j * I_n) of a merged pair is G(n)(i) · G(n+1)(j).
DenseTensor merge_cores(const TRCores& c, Index first, Index count);

/// i.i.d. Gaussian cores, each rescaled to Frobenius norm target_norm^(1/N).
TRCores tr_init(const Shape& dims, const std::vector<Index>& ranks, std::uint64_t seed,
                double target_norm = 1.0);

struct RankBound {
    Index core_rank = 0;    ///< rank of tr_unfold(G(n), 2)
    Index tensor_rank = 0;  ///< rank of mode_n_unfold(Φ(G), n)
    bool holds = false;     ///< core_rank >= tensor_rank
};

/// Compares the spectral rank of core n (one-based) with the mode-n rank of the
/// reconstruction. Ranks count singular values above tol × the largest one.
RankBound rank_bound_check(const TRCores& c, Index mode, double tol = 1e-9);

}  // namespace ctrf
