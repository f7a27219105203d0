#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "ctrf/degradation.hpp"
#include "ctrf/numerics.hpp"
#include "ctrf/tensor_ring.hpp"

namespace ctrf {

using TRRanks = std::array<Index, 3>;

/// Ranks used for a given noise level: snr20 → [3,150,3], snr30 → [4,200,4],
/// snr40 → [5,250,5]. Throws ArgumentError for unknown names.
TRRanks rank_preset(std::string_view name);

struct FusionProblem {
    DenseTensor y;  ///< m × n × B
    DenseTensor z;  ///< M × N × b
    DegradationModel model;
    TRRanks ranks{1, 1, 1};

    /// Throws ShapeError/ArgumentError when y, z, the operators and ranks disagree.
    void validate() const;
    Shape hr_shape() const { return {model.full_rows(), model.full_cols(), model.bands()}; }
};

enum class SolverMode { ctrf, nctrf };

struct SolverConfig {
    double lambda = 1e-3;
    double rho = 1.5;
    double mu0 = 1e-4;
    double mu_max = 1e6;
    int outer_iters = 50;
    CGConfig cg{};
    std::uint64_t seed = 0;
    SolverMode mode = SolverMode::nctrf;

    void validate() const;
};

struct TraceRecord {
    int iteration = 0;
    double objective = 0.0;     ///< data-fit total, plus the nuclear term for NCTRF
    double hsi_term = 0.0;
    double msi_term = 0.0;
    double nuclear_term = 0.0;  ///< lambda · ‖G3_<2>‖_*, zero for CTRF
    double mu = 0.0;
    double g0_g3_residual = 0.0;
    double wall_seconds = 0.0;
    int cg_iterations = 0;      ///< summed over the three core updates
    /// RMSE of Φ(G) against SolveOptions::reference, NaN when none was given.
    double reference_rmse = 0.0;
};

/// Cores G1 (R1×M×R2), G2 (R2×N×R3), G3 (R3×B×R1), the auxiliary copy g0 of G3,
/// its multiplier l and the current penalty mu.
struct SolverState {
    TRCores cores;
    DenseTensor g0;
    DenseTensor l;
    double mu = 0.0;
};

/// Fresh state: seeded Gaussian cores, g0 = G3, l = 0, mu = mu0.
SolverState init_state(const FusionProblem& problem, const SolverConfig& cfg);
/// State around given cores (g0 = G3, l = 0, mu = mu0).
SolverState init_state(TRCores cores, const SolverConfig& cfg);

struct Objective {
    double total = 0.0;
    double hsi_term = 0.0;
    double msi_term = 0.0;
};

/// ‖Y − Φ(G1×₂P1, G2×₂P2, G3)‖² + ‖Z − Φ(G1, G2, G3×₂P3)‖².
Objective ctrf_objective(const SolverState& state, const FusionProblem& problem);
/// ctrf_objective + lambda · ‖G3_<2>‖_*.
double nctrf_objective(const SolverState& state, const FusionProblem& problem, const SolverConfig& cfg);
/// Data terms + lambda‖g0_(2)‖_* + ⟨l, g0 − G3⟩ + (mu/2)‖g0 − G3‖².
double augmented_lagrangian(const SolverState& state, const FusionProblem& problem, const SolverConfig& cfg);

/// The normal equations of one core's block subproblem, in terms of the
/// mode-2 unfolding of that core: op(G) = rhs.
struct BlockSystem {
    LinearOperator op;
    Matrix rhs;
    Matrix x0;  ///< current core, unfolded
    Shape core_shape;
};

/// core is zero-based (0 → G1, 1 → G2, 2 → G3). The G3 system carries the
/// penalty and multiplier terms in NCTRF mode.
BlockSystem assemble_block(const SolverState& state, const FusionProblem& problem, const SolverConfig& cfg,
                           Index core);

struct CoreUpdate {
    DenseTensor core;
    double cg_residual = 0.0;
    int cg_iterations = 0;
};

CoreUpdate update_g1(const SolverState& state, const FusionProblem& problem, const SolverConfig& cfg);
CoreUpdate update_g2(const SolverState& state, const FusionProblem& problem, const SolverConfig& cfg);
CoreUpdate update_g3(const SolverState& state, const FusionProblem& problem, const SolverConfig& cfg);
/// fold₂(SVT_{lambda/mu}(G3_(2) − l_(2)/mu)).
DenseTensor update_g0(const SolverState& state, const SolverConfig& cfg);

struct MultiplierUpdate {
    DenseTensor l;
    double mu = 0.0;
};

/// l + mu (g0 − G3) and min(mu_max, rho · mu).
MultiplierUpdate update_multiplier(const SolverState& state, const SolverConfig& cfg);

struct SweepStats {
    int cg_iterations = 0;
};

/// One outer iteration: G1, G2, G3, then g0 and the multiplier in NCTRF mode.
SweepStats sweep(SolverState& state, const FusionProblem& problem, const SolverConfig& cfg);

struct SolveOptions {
    /// Start from these cores instead of a seeded random ring.
    std::optional<TRCores> initial_cores;
    /// Ground truth for the reference_rmse trace column.
    const DenseTensor* reference = nullptr;
    /// Called after every sweep.
    std::function<void(const TraceRecord&)> on_iteration;
};

struct SolveResult {
    SolverState state;
    DenseTensor x_hat;
    std::vector<TraceRecord> trace;
};

SolveResult solve(const FusionProblem& problem, const SolverConfig& cfg, const SolveOptions& opts = {});

}  // namespace ctrf
