#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "ctrf/degradation.hpp"
#include "ctrf/solver.hpp"
#include "ctrf/tensor_ring.hpp"

namespace ctrf::test {

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Index k = 0; k < m.size(); ++k) m.data()[k] = normal(rng);
    return m;
}

inline DenseTensor random_tensor(const Shape& shape, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    DenseTensor t(shape);
    for (double& v : t.data()) v = normal(rng);
    return t;
}

inline Matrix spd(Index n, std::mt19937_64& rng, double shift = 1.0)
{
    const Matrix a = random_matrix(n, n, rng);
    return a * a.transpose() + shift * Matrix::Identity(n, n);
}

/// Random ring with orders in [min_order, max_order], ranks and dims drawn uniformly.
inline TRCores random_ring(std::mt19937_64& rng, Index min_order, Index max_order, Index max_rank, Index max_dim)
{
    std::uniform_int_distribution<Index> order(min_order, max_order), rank(1, max_rank), dim(1, max_dim);
    const Index n = order(rng);
    Shape dims;
    std::vector<Index> ranks;
    for (Index k = 0; k < n; ++k) {
        dims.push_back(dim(rng));
        ranks.push_back(rank(rng));
    }
    return tr_init(dims, ranks, rng());
}

inline double rel_err(const DenseTensor& a, const DenseTensor& b)
{
    const double s = fro_norm(b);
    return s == 0.0 ? fro_norm(a) : fro_norm(a - b) / s;
}

inline double rel_err(const Matrix& a, const Matrix& b)
{
    const double s = b.norm();
    return s == 0.0 ? a.norm() : (a - b).norm() / s;
}

/// A fusion problem whose HR-HSI is exactly a tensor ring.
struct Synthetic {
    FusionProblem problem;
    TRCores truth_cores;
    DenseTensor truth;
};

struct SyntheticSpec {
    Shape dims{8, 8, 6};
    TRRanks ranks{2, 3, 2};
    Index factor = 2;
    Index kernel = 2;
    Index ms_bands = 2;
    double snr_db = std::numeric_limits<double>::infinity();
    double rms = 1.0;  ///< root-mean-square value of the truth
    std::uint64_t seed = 0;
};

inline Synthetic make_synthetic(const SyntheticSpec& s)
{
    Synthetic out;
    // Offset stream so a solver seeded with the same number does not start at the truth.
    TRCores c = tr_init(s.dims, {s.ranks[0], s.ranks[1], s.ranks[2]}, s.seed + 0x5eed0000ULL);
    const DenseTensor raw = tr_reconstruct(c);
    const double scale = s.rms * std::sqrt(static_cast<double>(raw.size())) / fro_norm(raw);
    std::vector<DenseTensor> cores = c.cores();
    cores[0] *= scale;
    out.truth_cores = TRCores(std::move(cores));
    out.truth = tr_reconstruct(out.truth_cores);

    out.problem.model = make_model(s.dims[0], s.dims[1], s.dims[2], s.factor, s.kernel,
                                   equal_band_groups(s.dims[2], s.ms_bands));
    auto [y, z] = degrade(out.truth, out.problem.model);
    std::mt19937_64 rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
    out.problem.y = add_noise(y, s.snr_db, rng);
    out.problem.z = add_noise(z, s.snr_db, rng);
    out.problem.ranks = s.ranks;
    return out;
}

}  // namespace ctrf::test
