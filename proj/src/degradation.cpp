#include "ctrf/degradation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ctrf {

Matrix build_spatial_operator(Index full_dim, Index factor, Index kernel_size)
{
    if (factor < 1 || full_dim < 1) throw ArgumentError("spatial operator: factor and size must be positive");
    if (full_dim % factor != 0)
        throw ShapeError("spatial operator: dimension " + std::to_string(full_dim) + " is not divisible by factor " +
                         std::to_string(factor));
    if (kernel_size < factor)
        throw ArgumentError("spatial operator: kernel size " + std::to_string(kernel_size) +
                            " smaller than factor " + std::to_string(factor));
    const Index rows = full_dim / factor;
    const Index offset = (kernel_size - factor) / 2;
    Matrix p = Matrix::Zero(rows, full_dim);
    for (Index r = 0; r < rows; ++r) {
        const Index lo = std::max<Index>(0, r * factor - offset);
        const Index hi = std::min(full_dim, r * factor - offset + kernel_size);
        const double w = 1.0 / static_cast<double>(hi - lo);
        for (Index c = lo; c < hi; ++c) p(r, c) = w;
    }
    return p;
}

Matrix build_spectral_operator(Index bands, const std::vector<BandGroup>& groups)
{
    if (groups.empty()) throw ArgumentError("spectral operator: no band groups");
    std::vector<bool> used(static_cast<std::size_t>(bands), false);
    Matrix p = Matrix::Zero(static_cast<Index>(groups.size()), bands);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty()) throw ArgumentError("spectral operator: band group " + std::to_string(g + 1) + " is empty");
        const double w = 1.0 / static_cast<double>(groups[g].size());
        for (Index b : groups[g]) {
            if (b < 0 || b >= bands)
                throw ArgumentError("spectral operator: band " + std::to_string(b) + " outside 0.." +
                                    std::to_string(bands - 1));
            if (used[static_cast<std::size_t>(b)])
                throw ArgumentError("spectral operator: band " + std::to_string(b) + " appears in two groups");
            used[static_cast<std::size_t>(b)] = true;
            p(static_cast<Index>(g), b) = w;
        }
    }
    return p;
}

std::vector<BandGroup> equal_band_groups(Index bands, Index count)
{
    if (count < 1 || count > bands)
        throw ArgumentError("cannot split " + std::to_string(bands) + " bands into " + std::to_string(count) +
                            " groups");
    std::vector<BandGroup> groups(static_cast<std::size_t>(count));
    const Index base = bands / count;
    const Index extra = bands % count;
    Index next = 0;
    for (Index g = 0; g < count; ++g) {
        const Index len = base + (g < extra ? 1 : 0);
        for (Index k = 0; k < len; ++k) groups[static_cast<std::size_t>(g)].push_back(next++);
    }
    return groups;
}

DegradationModel make_model(Index rows, Index cols, Index bands, Index factor, Index kernel_size,
                            const std::vector<BandGroup>& groups)
{
    DegradationModel m = make_model(rows, cols, factor, kernel_size, build_spectral_operator(bands, groups));
    m.band_groups = groups;
    return m;
}

DegradationModel make_model(Index rows, Index cols, Index factor, Index kernel_size, Matrix spectral)
{
    DegradationModel m;
    m.p1 = build_spatial_operator(rows, factor, kernel_size);
    m.p2 = build_spatial_operator(cols, factor, kernel_size);
    m.p3 = std::move(spectral);
    m.spatial_factor = factor;
    m.kernel_size = kernel_size;
    return m;
}

std::pair<DenseTensor, DenseTensor> degrade(const DenseTensor& x, const DegradationModel& model)
{
    if (x.order() != 3 || x.dim(0) != model.full_rows() || x.dim(1) != model.full_cols() ||
        x.dim(2) != model.bands())
        throw ShapeError("degrade: tensor " + to_string(x.shape()) + " does not match model " +
                         to_string({model.full_rows(), model.full_cols(), model.bands()}));
    DenseTensor y = mode_product(mode_product(x, model.p1, 1), model.p2, 2);
    DenseTensor z = mode_product(x, model.p3, 3);
    return {std::move(y), std::move(z)};
}

DenseTensor add_noise(const DenseTensor& t, double snr_db, std::mt19937_64& rng)
{
    if (std::isinf(snr_db) && snr_db > 0) return t;
    if (!(snr_db > 0.0) || std::isnan(snr_db)) throw ArgumentError("add_noise: SNR must be positive or infinite");
    const double power = fro_norm(t) * fro_norm(t) / static_cast<double>(t.size());
    const double sigma = std::sqrt(power * std::pow(10.0, -snr_db / 10.0));
    std::normal_distribution<double> normal(0.0, sigma);
    DenseTensor out = t;
    for (double& v : out.data()) v += normal(rng);
    return out;
}

DenseTensor add_noise(const DenseTensor& t, const SimulationConfig& cfg)
{
    std::mt19937_64 rng(cfg.seed);
    return add_noise(t, cfg.snr_db, rng);
}

DenseTensor rescale_to(const DenseTensor& t, double max_value)
{
    const auto [lo_it, hi_it] = std::minmax_element(t.data().begin(), t.data().end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) throw ArgumentError("rescale_to: tensor is constant");
    const double scale = max_value / (hi - lo);
    DenseTensor out = t;
    for (double& v : out.data()) v = (v - lo) * scale;
    // Pin the extremes exactly; (hi - lo) * scale can be off by one ulp.
    out.data()[static_cast<std::size_t>(lo_it - t.data().begin())] = 0.0;
    out.data()[static_cast<std::size_t>(hi_it - t.data().begin())] = max_value;
    return out;
}

SimulatedPair simulate(const DenseTensor& hr, const DegradationModel& model, const SimulationConfig& cfg)
{
    SimulatedPair out;
    out.reference = rescale_to(hr, cfg.scale_max);
    auto [y, z] = degrade(out.reference, model);
    std::mt19937_64 rng(cfg.seed);
    out.y = add_noise(y, cfg.snr_db, rng);
    out.z = add_noise(z, cfg.snr_db, rng);
    return out;
}

}  // namespace ctrf
