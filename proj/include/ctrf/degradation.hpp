#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "ctrf/tensor.hpp"

namespace ctrf {

/// Zero-based band indices averaged into one multispectral band.
using BandGroup = std::vector<Index>;

/// Spatial (p1: m×M, p2: n×N) and spectral (p3: b×B) degradation operators.
struct DegradationModel {
    Matrix p1;
    Matrix p2;
    Matrix p3;
    Index spatial_factor = 1;
    Index kernel_size = 1;
    /// Empty when p3 was supplied explicitly.
    std::vector<BandGroup> band_groups;

    Index full_rows() const { return p1.cols(); }
    Index full_cols() const { return p2.cols(); }
    Index bands() const { return p3.cols(); }
    Index low_rows() const { return p1.rows(); }
    Index low_cols() const { return p2.rows(); }
    Index ms_bands() const { return p3.rows(); }
};

struct SimulationConfig {
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    double scale_max = 255.0;
};

/**
 * Averaging blur followed by subsampling along one spatial axis.
 *
 * Row r covers kernel_size samples starting at r·factor − ⌊(kernel_size − factor)/2⌋.
 * Samples falling outside [0, full_dim) are dropped and the row is renormalised,
 * so every row sums to one.
 */
Matrix build_spatial_operator(Index full_dim, Index factor, Index kernel_size);

/// Row g averages the bands of group g.
Matrix build_spectral_operator(Index bands, const std::vector<BandGroup>& groups);

/// `count` contiguous groups; the first (bands mod count) groups get one extra band.
std::vector<BandGroup> equal_band_groups(Index bands, Index count);

DegradationModel make_model(Index rows, Index cols, Index bands, Index factor, Index kernel_size,
                            const std::vector<BandGroup>& groups);
DegradationModel make_model(Index rows, Index cols, Index factor, Index kernel_size, Matrix spectral);

/// (y, z) = (x ×1 P1 ×2 P2, x ×3 P3).
std::pair<DenseTensor, DenseTensor> degrade(const DenseTensor& x, const DegradationModel& model);

/// Adds i.i.d. Gaussian noise with variance mean(t²) · 10^(−snr_db/10).
/// An infinite SNR returns an exact copy without drawing from `rng`.
DenseTensor add_noise(const DenseTensor& t, double snr_db, std::mt19937_64& rng);
DenseTensor add_noise(const DenseTensor& t, const SimulationConfig& cfg);

/// Affine map sending min(t) to 0 and max(t) to max_value.
DenseTensor rescale_to(const DenseTensor& t, double max_value);

struct SimulatedPair {
    DenseTensor reference;  ///< rescaled HR-HSI
    DenseTensor y;
    DenseTensor z;
};

/// Rescale, degrade, then add noise to y and z (in that order) from one
/// generator seeded with cfg.seed.
SimulatedPair simulate(const DenseTensor& hr, const DegradationModel& model, const SimulationConfig& cfg);

}  // namespace ctrf
