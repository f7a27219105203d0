#include "ctrf/tensor_ring.hpp"

#include <cmath>
#include <random>

#include "ctrf/kernels.hpp"
#include "ctrf/numerics.hpp"

namespace ctrf {

namespace {

Matrix lateral_slice(const DenseTensor& core, Index i)
{
    Matrix s(core.dim(0), core.dim(2));
    for (Index a = 0; a < core.dim(0); ++a)
        for (Index b = 0; b < core.dim(2); ++b) s(a, b) = core(a, i, b);
    return s;
}

}  // namespace

TRCores::TRCores(std::vector<DenseTensor> cores) : cores_(std::move(cores))
{
    if (cores_.empty()) throw ShapeError("tensor ring needs at least one core");
    const std::size_t n = cores_.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (cores_[k].order() != 3)
            throw ShapeError("core " + std::to_string(k + 1) + " is not order 3: " + to_string(cores_[k].shape()));
        const DenseTensor& next = cores_[(k + 1) % n];
        if (cores_[k].dim(2) != next.dim(0))
            throw ShapeError("ring rank mismatch between core " + std::to_string(k + 1) + " " +
                             to_string(cores_[k].shape()) + " and core " + std::to_string((k + 1) % n + 1) + " " +
                             to_string(next.shape()));
    }
}

void TRCores::set_core(Index n, DenseTensor core)
{
    const DenseTensor& old = cores_.at(static_cast<std::size_t>(n));
    if (core.shape() != old.shape())
        throw ShapeError("set_core: shape " + to_string(core.shape()) + " differs from " + to_string(old.shape()));
    cores_[static_cast<std::size_t>(n)] = std::move(core);
}

std::vector<Index> TRCores::ranks() const
{
    std::vector<Index> r;
    r.reserve(cores_.size());
    for (const auto& g : cores_) r.push_back(g.dim(0));
    return r;
}

Shape TRCores::dims() const
{
    Shape d;
    d.reserve(cores_.size());
    for (const auto& g : cores_) d.push_back(g.dim(1));
    return d;
}

TRCores TRCores::rotated(Index shift) const
{
    const Index n = order();
    if (shift < 0 || shift >= n) throw ShapeError("rotated: shift out of range");
    std::vector<DenseTensor> out;
    out.reserve(cores_.size());
    for (Index k = 0; k < n; ++k) out.push_back(cores_[static_cast<std::size_t>((k + shift) % n)]);
    return TRCores(std::move(out));
}

double tr_element(const TRCores& c, std::span<const Index> idx)
{
    if (static_cast<Index>(idx.size()) != c.order()) throw ShapeError("tr_element: index length mismatch");
    for (Index k = 0; k < c.order(); ++k) {
        const Index i = idx[static_cast<std::size_t>(k)];
        if (i < 0 || i >= c.core(k).dim(1)) throw ShapeError("tr_element: index out of range");
    }
    Matrix prod = lateral_slice(c.core(0), idx[0]);
    for (Index k = 1; k < c.order(); ++k) prod = prod * lateral_slice(c.core(k), idx[static_cast<std::size_t>(k)]);
    return prod.trace();
}

DenseTensor merge_cores(const TRCores& c, Index first, Index count)
{
    const Index n = c.order();
    if (count < 1) throw ShapeError("merge_cores: empty range");
    if (count > n || first < 0 || first >= n) throw ShapeError("merge_cores: range out of bounds");
    DenseTensor merged = c.core(first);
    for (Index k = 1; k < count; ++k) merged = kernels::merge_pair(merged, c.core((first + k) % n));
    return merged;
}

DenseTensor tr_reconstruct(const TRCores& c)
{
    const Index n = c.order();
    const Shape dims = c.dims();
    if (n == 1) {
        const DenseTensor& g = c.core(0);
        DenseTensor out({g.dim(1)});
        for (Index i = 0; i < g.dim(1); ++i) {
            double s = 0.0;
            for (Index a = 0; a < g.dim(0); ++a) s += g(a, i, a);
            out.data()[static_cast<std::size_t>(i)] = s;
        }
        return out;
    }
    // Merged cores 1..N-1 against the last core give the (I_1..I_{N-1}) × I_N
    // block unfolding directly.
    const DenseTensor head = merge_cores(c, 0, n - 1);
    return block_fold(kernels::close_ring(head, c.core(n - 1)), dims, n - 1);
}

TRCores tr_init(const Shape& dims, const std::vector<Index>& ranks, std::uint64_t seed, double target_norm)
{
    if (dims.empty() || dims.size() != ranks.size())
        throw ArgumentError("tr_init: need one rank per mode (" + std::to_string(ranks.size()) + " ranks, " +
                            std::to_string(dims.size()) + " modes)");
    for (Index r : ranks)
        if (r < 1) throw ArgumentError("tr_init: ranks must be positive");
    if (!(target_norm > 0.0)) throw ArgumentError("tr_init: target norm must be positive");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t n = dims.size();
    const double core_norm = std::pow(target_norm, 1.0 / static_cast<double>(n));
    std::vector<DenseTensor> cores;
    cores.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        DenseTensor g({ranks[k], dims[k], ranks[(k + 1) % n]});
        for (double& v : g.data()) v = normal(rng);
        g *= core_norm / fro_norm(g);
        cores.push_back(std::move(g));
    }
    return TRCores(std::move(cores));
}

RankBound rank_bound_check(const TRCores& c, Index mode, double tol)
{
    if (mode < 1 || mode > c.order()) throw ShapeError("rank_bound_check: mode out of range");
    RankBound out;
    out.core_rank = numeric_rank(tr_unfold(c.core(mode - 1), 2), tol);
    out.tensor_rank = numeric_rank(mode_n_unfold(tr_reconstruct(c), mode), tol);
    out.holds = out.core_rank >= out.tensor_rank;
    return out;
}

}  // namespace ctrf
