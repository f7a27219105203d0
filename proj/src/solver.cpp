#include "ctrf/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "ctrf/kernels.hpp"

namespace ctrf {

TRRanks rank_preset(std::string_view name)
{
    if (name == "snr20") return {3, 150, 3};
    if (name == "snr30") return {4, 200, 4};
    if (name == "snr40") return {5, 250, 5};
    throw ArgumentError("unknown rank preset '" + std::string(name) + "' (expected snr20, snr30 or snr40)");
}

void FusionProblem::validate() const
{
    const auto& m = model;
    if (m.p1.rows() < 1 || m.p2.rows() < 1 || m.p3.rows() < 1) throw ShapeError("degradation operators are empty");
    if (y.order() != 3 || z.order() != 3) throw ShapeError("y and z must be order-3 tensors");
    const Shape y_expected{m.low_rows(), m.low_cols(), m.bands()};
    const Shape z_expected{m.full_rows(), m.full_cols(), m.ms_bands()};
    if (y.shape() != y_expected)
        throw ShapeError("HSI shape " + to_string(y.shape()) + " does not match operators (" + to_string(y_expected) + ")");
    if (z.shape() != z_expected)
        throw ShapeError("MSI shape " + to_string(z.shape()) + " does not match operators (" + to_string(z_expected) + ")");
    for (Index r : ranks)
        if (r < 1) throw ArgumentError("TR ranks must be positive");
}

void SolverConfig::validate() const
{
    if (!(rho > 1.0)) throw ArgumentError("rho must exceed 1");
    if (!(mu0 > 0.0)) throw ArgumentError("mu0 must be positive");
    if (!(mu_max >= mu0)) throw ArgumentError("mu_max must be at least mu0");
    if (!(lambda >= 0.0)) throw ArgumentError("lambda must be nonnegative");
    if (outer_iters < 0) throw ArgumentError("outer_iters must be nonnegative");
    if (!(cg.tol > 0.0) || cg.max_iter < 0) throw ArgumentError("invalid CG settings");
}

SolverState init_state(TRCores cores, const SolverConfig& cfg)
{
    if (cores.order() != 3) throw ShapeError("fusion needs a three-core ring");
    SolverState s;
    s.g0 = cores.core(2);
    s.l = DenseTensor(cores.core(2).shape());
    s.mu = cfg.mu0;
    s.cores = std::move(cores);
    return s;
}

SolverState init_state(const FusionProblem& problem, const SolverConfig& cfg)
{
    const auto& r = problem.ranks;
    return init_state(tr_init(problem.hr_shape(), {r[0], r[1], r[2]}, cfg.seed), cfg);
}

namespace {

// Cores as seen by the HSI (spatially degraded) and MSI (spectrally degraded)
// observations.
TRCores hsi_cores(const TRCores& c, const DegradationModel& m)
{
    return TRCores({mode2_ttm(c.core(0), m.p1), mode2_ttm(c.core(1), m.p2), c.core(2)});
}

TRCores msi_cores(const TRCores& c, const DegradationModel& m)
{
    return TRCores({c.core(0), c.core(1), mode2_ttm(c.core(2), m.p3)});
}

double squared_distance(const DenseTensor& a, const DenseTensor& b)
{
    const DenseTensor d = a - b;
    return inner(d, d);
}

void check_state(const SolverState& s, const FusionProblem& p)
{
    if (s.cores.order() != 3 || s.cores.dims() != p.hr_shape())
        throw ShapeError("solver state cores do not match the problem geometry");
    if (s.g0.shape() != s.cores.core(2).shape() || s.l.shape() != s.cores.core(2).shape())
        throw ShapeError("g0 and l must share the shape of G3");
}

const Matrix* hsi_operator(const DegradationModel& m, Index core)
{
    if (core == 0) return &m.p1;
    if (core == 1) return &m.p2;
    return nullptr;
}

const Matrix* msi_operator(const DegradationModel& m, Index core) { return core == 2 ? &m.p3 : nullptr; }

CoreUpdate solve_block(const SolverState& state, const FusionProblem& problem, const SolverConfig& cfg, Index core)
{
    const BlockSystem sys = assemble_block(state, problem, cfg, core);
    const CGResult res = cg_solve(sys.op, sys.rhs, sys.x0, cfg.cg);
    return {fold_n(res.x, sys.core_shape, 2), res.residual, res.iterations};
}

}  // namespace

Objective ctrf_objective(const SolverState& state, const FusionProblem& problem)
{
    problem.validate();
    check_state(state, problem);
    Objective o;
    o.hsi_term = squared_distance(problem.y, tr_reconstruct(hsi_cores(state.cores, problem.model)));
    o.msi_term = squared_distance(problem.z, tr_reconstruct(msi_cores(state.cores, problem.model)));
    o.total = o.hsi_term + o.msi_term;
    return o;
}

double nctrf_objective(const SolverState& state, const FusionProblem& problem, const SolverConfig& cfg)
{
    return ctrf_objective(state, problem).total + cfg.lambda * nuclear_norm(tr_unfold(state.cores.core(2), 2));
}

double augmented_lagrangian(const SolverState& state, const FusionProblem& problem, const SolverConfig& cfg)
{
    const DenseTensor gap = state.g0 - state.cores.core(2);
    return ctrf_objective(state, problem).total + cfg.lambda * nuclear_norm(mode_n_unfold(state.g0, 2)) +
           inner(state.l, gap) + 0.5 * state.mu * inner(gap, gap);
}

BlockSystem assemble_block(const SolverState& state, const FusionProblem& problem, const SolverConfig& cfg,
                           Index core)
{
    if (core < 0 || core > 2) throw ShapeError("assemble_block: core index must be 0, 1 or 2");
    problem.validate();
    check_state(state, problem);

    const TRCores hsi = hsi_cores(state.cores, problem.model);
    const TRCores msi = msi_cores(state.cores, problem.model);
    const Index next = (core + 1) % 3;
    const Index last = (core + 2) % 3;

    // Rotating the ring puts the unknown core first, so each observation's cyclic
    // unfolding factors as  P · G_(2) · Mᵀ  with M the cyclic unfolding of the
    // merged remaining cores.
    const Matrix mh = tr_unfold(kernels::merge_pair(hsi.core(next), hsi.core(last)), 2);
    const Matrix mm = tr_unfold(kernels::merge_pair(msi.core(next), msi.core(last)), 2);
    const Matrix yk = tr_unfold(problem.y, core + 1);
    const Matrix zk = tr_unfold(problem.z, core + 1);

    const Matrix* ph = hsi_operator(problem.model, core);
    const Matrix* pm = msi_operator(problem.model, core);

    Matrix gram_h = mh.transpose() * mh;
    Matrix gram_m = mm.transpose() * mm;
    Matrix rhs_h = yk * mh;
    Matrix rhs_m = zk * mm;
    std::optional<Matrix> left_h, left_m;
    if (ph) {
        left_h = ph->transpose() * *ph;
        rhs_h = ph->transpose() * rhs_h;
    }
    if (pm) {
        left_m = pm->transpose() * *pm;
        rhs_m = pm->transpose() * rhs_m;
    }

    BlockSystem sys;
    sys.core_shape = state.cores.core(core).shape();
    sys.x0 = mode_n_unfold(state.cores.core(core), 2);
    sys.rhs = rhs_h + rhs_m;

    double shift = 0.0;
    if (core == 2 && cfg.mode == SolverMode::nctrf) {
        // Stationarity of the data terms plus ⟨l, g0 − G⟩ + (mu/2)‖g0 − G‖², halved.
        shift = 0.5 * state.mu;
        sys.rhs += 0.5 * (mode_n_unfold(state.l, 2) + state.mu * mode_n_unfold(state.g0, 2));
    }

    sys.op.rows = sys.x0.rows();
    sys.op.cols = sys.x0.cols();
    sys.op.apply = [gram_h = std::move(gram_h), gram_m = std::move(gram_m), left_h = std::move(left_h),
                    left_m = std::move(left_m), shift](const Matrix& g) -> Matrix {
        Matrix out = left_h ? Matrix(*left_h * (g * gram_h)) : Matrix(g * gram_h);
        if (left_m)
            out.noalias() += *left_m * (g * gram_m);
        else
            out.noalias() += g * gram_m;
        if (shift != 0.0) out += shift * g;
        return out;
    };
    return sys;
}

CoreUpdate update_g1(const SolverState& state, const FusionProblem& problem, const SolverConfig& cfg)
{
    return solve_block(state, problem, cfg, 0);
}

CoreUpdate update_g2(const SolverState& state, const FusionProblem& problem, const SolverConfig& cfg)
{
    return solve_block(state, problem, cfg, 1);
}

CoreUpdate update_g3(const SolverState& state, const FusionProblem& problem, const SolverConfig& cfg)
{
    return solve_block(state, problem, cfg, 2);
}

DenseTensor update_g0(const SolverState& state, const SolverConfig& cfg)
{
    if (!(state.mu > 0.0)) throw ArgumentError("update_g0: mu must be positive");
    const DenseTensor& g3 = state.cores.core(2);
    const Matrix target = mode_n_unfold(g3, 2) - mode_n_unfold(state.l, 2) / state.mu;
    return fold_n(svt(target, cfg.lambda / state.mu), g3.shape(), 2);
}

MultiplierUpdate update_multiplier(const SolverState& state, const SolverConfig& cfg)
{
    MultiplierUpdate out;
    out.l = state.l + state.mu * (state.g0 - state.cores.core(2));
    out.mu = std::min(cfg.mu_max, cfg.rho * state.mu);
    return out;
}

SweepStats sweep(SolverState& state, const FusionProblem& problem, const SolverConfig& cfg)
{
    SweepStats stats;
    for (Index k = 0; k < 3; ++k) {
        CoreUpdate up = solve_block(state, problem, cfg, k);
        stats.cg_iterations += up.cg_iterations;
        state.cores.set_core(k, std::move(up.core));
    }
    if (cfg.mode == SolverMode::nctrf) {
        state.g0 = update_g0(state, cfg);
        MultiplierUpdate m = update_multiplier(state, cfg);
        state.l = std::move(m.l);
        state.mu = m.mu;
    }
    return stats;
}

SolveResult solve(const FusionProblem& problem, const SolverConfig& cfg, const SolveOptions& opts)
{
    problem.validate();
    cfg.validate();
    if (opts.reference && opts.reference->shape() != problem.hr_shape())
        throw ShapeError("reference tensor " + to_string(opts.reference->shape()) + " does not match " +
                         to_string(problem.hr_shape()));

    SolveResult out;
    out.state = opts.initial_cores ? init_state(*opts.initial_cores, cfg) : init_state(problem, cfg);
    check_state(out.state, problem);
    out.trace.reserve(static_cast<std::size_t>(cfg.outer_iters));

    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    for (int it = 1; it <= cfg.outer_iters; ++it) {
        SweepStats stats;
        try {
            stats = sweep(out.state, problem, cfg);
        } catch (const NumericalError& e) {
            throw NumericalError("outer iteration " + std::to_string(it) + ": " + e.what());
        }

        TraceRecord rec;
        rec.iteration = it;
        rec.cg_iterations = stats.cg_iterations;
        const Objective obj = ctrf_objective(out.state, problem);
        rec.hsi_term = obj.hsi_term;
        rec.msi_term = obj.msi_term;
        if (cfg.mode == SolverMode::nctrf) {
            rec.nuclear_term = cfg.lambda * nuclear_norm(tr_unfold(out.state.cores.core(2), 2));
            rec.mu = out.state.mu;
            rec.g0_g3_residual = fro_norm(out.state.g0 - out.state.cores.core(2));
        }
        rec.objective = obj.total + rec.nuclear_term;
        if (!std::isfinite(rec.objective))
            throw NumericalError("non-finite objective at iteration " + std::to_string(it));
        rec.reference_rmse = std::numeric_limits<double>::quiet_NaN();
        if (opts.reference) {
            const double d = squared_distance(tr_reconstruct(out.state.cores), *opts.reference);
            rec.reference_rmse = std::sqrt(d / static_cast<double>(opts.reference->size()));
        }
        rec.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
        out.trace.push_back(rec);
        if (opts.on_iteration) opts.on_iteration(rec);
    }
    out.x_hat = tr_reconstruct(out.state.cores);
    return out;
}

}  // namespace ctrf
