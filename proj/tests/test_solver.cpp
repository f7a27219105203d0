#include <gtest/gtest.h>

#include "ctrf/solver.hpp"
#include "support.hpp"

using namespace ctrf;
using namespace ctrf::test;

namespace {

Synthetic small_problem(std::uint64_t seed, double snr = std::numeric_limits<double>::infinity())
{
    SyntheticSpec s;
    s.dims = {8, 8, 6};
    s.ranks = {2, 3, 2};
    s.factor = 2;
    s.kernel = 2;
    s.ms_bands = 2;
    s.snr_db = snr;
    s.seed = seed;
    return make_synthetic(s);
}

Synthetic identity_problem(std::uint64_t seed)
{
    Synthetic syn = small_problem(seed);
    syn.problem.model = make_model(8, 8, 1, 1, Matrix::Identity(6, 6));
    syn.problem.y = syn.truth;
    syn.problem.z = syn.truth;
    return syn;
}

CoreUpdate update(Index k, const SolverState& s, const FusionProblem& p, const SolverConfig& c)
{
    return k == 0 ? update_g1(s, p, c) : k == 1 ? update_g2(s, p, c) : update_g3(s, p, c);
}

SolverConfig ctrf_config()
{
    SolverConfig cfg;
    cfg.mode = SolverMode::ctrf;
    return cfg;
}

}  // namespace

TEST(RankPreset, NamedNoiseLevels)
{
    EXPECT_EQ(rank_preset("snr20"), (TRRanks{3, 150, 3}));
    EXPECT_EQ(rank_preset("snr30"), (TRRanks{4, 200, 4}));
    EXPECT_EQ(rank_preset("snr40"), (TRRanks{5, 250, 5}));
    EXPECT_THROW(rank_preset("snr50"), ArgumentError);
}

TEST(FusionProblem, Validation)
{
    Synthetic syn = small_problem(1);
    EXPECT_NO_THROW(syn.problem.validate());
    EXPECT_EQ(syn.problem.hr_shape(), (Shape{8, 8, 6}));
    FusionProblem bad = syn.problem;
    bad.y = DenseTensor({4, 4, 5});
    EXPECT_THROW(bad.validate(), ShapeError);
    bad = syn.problem;
    bad.ranks = {2, 0, 2};
    EXPECT_THROW(bad.validate(), ArgumentError);
}

TEST(SolverConfig, Validation)
{
    SolverConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.rho = 1.0;
    EXPECT_THROW(cfg.validate(), ArgumentError);
    cfg = {};
    cfg.lambda = -1.0;
    EXPECT_THROW(cfg.validate(), ArgumentError);
}

TEST(Objective, ExactCoresAndZeroCores)
{
    const Synthetic syn = small_problem(2);
    const SolverState exact = init_state(syn.truth_cores, {});
    EXPECT_LT(ctrf_objective(exact, syn.problem).total, 1e-18);

    std::vector<DenseTensor> zeros;
    for (const auto& c : syn.truth_cores.cores()) zeros.emplace_back(c.shape());
    const SolverState zero = init_state(TRCores(zeros), {});
    const Objective o = ctrf_objective(zero, syn.problem);
    EXPECT_NEAR(o.total, inner(syn.problem.y, syn.problem.y) + inner(syn.problem.z, syn.problem.z), 1e-10);
    EXPECT_DOUBLE_EQ(o.total, o.hsi_term + o.msi_term);
}

TEST(Objective, NuclearVariant)
{
    const Synthetic syn = small_problem(3);
    SolverConfig cfg;
    cfg.lambda = 0.0;
    const SolverState s = init_state(syn.problem, cfg);
    EXPECT_EQ(nctrf_objective(s, syn.problem, cfg), ctrf_objective(s, syn.problem).total);

    cfg.lambda = 0.5;
    std::vector<DenseTensor> cores = s.cores.cores();
    cores[2] = DenseTensor(cores[2].shape());
    const SolverState g3_zero = init_state(TRCores(cores), cfg);
    EXPECT_EQ(nctrf_objective(g3_zero, syn.problem, cfg), ctrf_objective(g3_zero, syn.problem).total);
}

// Oracle: the block normal equations are satisfied at the generating cores.
TEST(CoreUpdates, FixedPointWithIdentityOperators)
{
    const Synthetic syn = identity_problem(4);
    const SolverState s = init_state(syn.truth_cores, ctrf_config());
    for (Index k = 0; k < 3; ++k) {
        const CoreUpdate u = update(k, s, syn.problem, ctrf_config());
        EXPECT_LT(rel_err(u.core, syn.truth_cores.core(k)), 1e-8) << "core " << k;
        const BlockSystem sys = assemble_block(s, syn.problem, ctrf_config(), k);
        EXPECT_LT(rel_err(sys.op(sys.x0), sys.rhs), 1e-10) << "core " << k;
    }
}

TEST(CoreUpdates, FixedPointWithDegradation)
{
    const Synthetic syn = small_problem(5);
    const SolverState s = init_state(syn.truth_cores, ctrf_config());
    for (Index k = 0; k < 3; ++k)
        EXPECT_LT(rel_err(update(k, s, syn.problem, ctrf_config()).core, syn.truth_cores.core(k)), 1e-8);
}

// Oracle: closed-form minimiser of (y − a g)² + (z − b g)² for scalar cores.
TEST(CoreUpdates, ScalarRing)
{
    FusionProblem p;
    p.model = make_model(1, 1, 1, 1, Matrix::Constant(1, 1, 0.5));
    p.model.p1(0, 0) = 2.0;
    p.model.p2(0, 0) = 3.0;
    p.y = DenseTensor({1, 1, 1}, {7.0});
    p.z = DenseTensor({1, 1, 1}, {-2.0});
    const double g2 = 1.5, g3 = 0.8;
    const TRCores c({DenseTensor({1, 1, 1}, {0.1}), DenseTensor({1, 1, 1}, {g2}), DenseTensor({1, 1, 1}, {g3})});
    const SolverState s = init_state(c, ctrf_config());

    const double a = 2.0 * 3.0 * g2 * g3, b = g2 * 0.5 * g3;
    EXPECT_NEAR(update_g1(s, p, ctrf_config()).core.raw()[0], (a * 7.0 + b * -2.0) / (a * a + b * b), 1e-12);
    const double a2 = 2.0 * 0.1 * 3.0 * g3, b2 = 0.1 * 0.5 * g3;
    EXPECT_NEAR(update_g2(s, p, ctrf_config()).core.raw()[0], (a2 * 7.0 + b2 * -2.0) / (a2 * a2 + b2 * b2), 1e-12);
}

TEST(CoreUpdates, NeverIncreaseTheObjective)
{
    const Synthetic syn = small_problem(6, 30.0);
    SolverState s = init_state(syn.problem, ctrf_config());
    double before = ctrf_objective(s, syn.problem).total;
    for (int sweep_id = 0; sweep_id < 5; ++sweep_id)
        for (Index k = 0; k < 3; ++k) {
            s.cores.set_core(k, update(k, s, syn.problem, ctrf_config()).core);
            const double after = ctrf_objective(s, syn.problem).total;
            EXPECT_LE(after, before * (1.0 + 1e-9) + 1e-9);
            before = after;
        }
}

TEST(CoreUpdates, BlockOperatorIsSymmetricPsd)
{
    const Synthetic syn = small_problem(7);
    SolverConfig cfg;
    const SolverState s = init_state(syn.problem, cfg);
    std::mt19937_64 rng(7);
    for (Index k = 0; k < 3; ++k) {
        const BlockSystem sys = assemble_block(s, syn.problem, cfg, k);
        for (int probe = 0; probe < 5; ++probe) {
            const Matrix x = random_matrix(sys.op.rows, sys.op.cols, rng), y = random_matrix(sys.op.rows, sys.op.cols, rng);
            const double xy = frobenius_inner(x, sys.op(y)), yx = frobenius_inner(sys.op(x), y);
            EXPECT_NEAR(xy, yx, 1e-10 * (std::abs(xy) + 1.0));
            EXPECT_GE(frobenius_inner(x, sys.op(x)), 0.0);
        }
    }
}

TEST(UpdateG3, LargePenaltyPinsToAuxiliary)
{
    const Synthetic syn = small_problem(8);
    SolverConfig cfg;
    SolverState s = init_state(syn.problem, cfg);
    std::mt19937_64 rng(8);
    s.g0 = random_tensor(s.g0.shape(), rng);
    s.l = random_tensor(s.l.shape(), rng);
    s.mu = 1e12;
    const DenseTensor target = s.g0 + (1.0 / s.mu) * s.l;
    EXPECT_LT(rel_err(update_g3(s, syn.problem, cfg).core, target), 1e-4);
}

TEST(UpdateG3, DoesNotIncreaseTheAugmentedLagrangian)
{
    const Synthetic syn = small_problem(9, 30.0);
    SolverConfig cfg;
    SolverState s = init_state(syn.problem, cfg);
    for (int i = 0; i < 3; ++i) sweep(s, syn.problem, cfg);
    const double before = augmented_lagrangian(s, syn.problem, cfg);
    s.cores.set_core(2, update_g3(s, syn.problem, cfg).core);
    EXPECT_LE(augmented_lagrangian(s, syn.problem, cfg), before * (1.0 + 1e-9) + 1e-9);
}

TEST(UpdateG0, ZeroThresholdIsShiftedCopy)
{
    const Synthetic syn = small_problem(10);
    SolverConfig cfg;
    cfg.lambda = 0.0;
    SolverState s = init_state(syn.problem, cfg);
    std::mt19937_64 rng(10);
    s.l = random_tensor(s.l.shape(), rng);
    s.mu = 2.0;
    EXPECT_LT(rel_err(update_g0(s, cfg), s.cores.core(2) - 0.5 * s.l), 1e-12);
}

TEST(UpdateG0, ShrinksKnownSingularValues)
{
    // G3 of shape (1, 2, 2) whose mode-2 unfolding is diag(3, 1).
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    const DenseTensor g3 = fold_n(d, {1, 2, 2}, 2);
    const TRCores c({DenseTensor::filled({2, 1, 1}, 1.0), DenseTensor::filled({1, 1, 1}, 1.0), g3});
    SolverConfig cfg;
    cfg.lambda = 2.0;
    SolverState s = init_state(c, cfg);
    s.mu = 1.0;
    const Svd out = svd_thin(mode_n_unfold(update_g0(s, cfg), 2));
    EXPECT_NEAR(out.s(0), 1.0, 1e-12);
    EXPECT_NEAR(out.s(1), 0.0, 1e-12);
}

TEST(UpdateG0, MinimisesItsSubproblem)
{
    const Synthetic syn = small_problem(11);
    SolverConfig cfg;
    cfg.lambda = 0.3;
    SolverState s = init_state(syn.problem, cfg);
    std::mt19937_64 rng(11);
    s.l = random_tensor(s.l.shape(), rng);
    s.mu = 1.7;
    const auto f = [&](const DenseTensor& g0) {
        const DenseTensor d = g0 - s.cores.core(2) + (1.0 / s.mu) * s.l;
        return cfg.lambda * nuclear_norm(mode_n_unfold(g0, 2)) + 0.5 * s.mu * inner(d, d);
    };
    const DenseTensor best = update_g0(s, cfg);
    const double fb = f(best);
    for (int k = 0; k < 200; ++k) {
        DenseTensor q = best + 1e-3 * random_tensor(best.shape(), rng);
        EXPECT_GE(f(q), fb);
    }
    s.mu = 0.0;
    EXPECT_THROW(update_g0(s, cfg), ArgumentError);
}

TEST(UpdateMultiplier, Formulas)
{
    const Synthetic syn = small_problem(12);
    SolverConfig cfg;
    SolverState s = init_state(syn.problem, cfg);
    std::mt19937_64 rng(12);
    s.l = random_tensor(s.l.shape(), rng);

    MultiplierUpdate m = update_multiplier(s, cfg);  // g0 == G3
    EXPECT_EQ(m.l, s.l);
    EXPECT_DOUBLE_EQ(m.mu, cfg.mu0 * cfg.rho);

    s.g0 = random_tensor(s.g0.shape(), rng);
    m = update_multiplier(s, cfg);
    EXPECT_LT(rel_err(m.l, s.l + s.mu * (s.g0 - s.cores.core(2))), 1e-15);

    s.mu = cfg.mu_max;
    EXPECT_EQ(update_multiplier(s, cfg).mu, cfg.mu_max);

    s.mu = cfg.mu0;
    for (int k = 1; k <= 10; ++k) {
        s.mu = update_multiplier(s, cfg).mu;
        EXPECT_DOUBLE_EQ(s.mu, cfg.mu0 * std::pow(cfg.rho, k));
    }
}

TEST(Solve, ExactWarmStartStays)
{
    const Synthetic syn = small_problem(13);
    SolverConfig cfg = ctrf_config();
    cfg.outer_iters = 10;
    SolveOptions opts;
    opts.initial_cores = syn.truth_cores;
    const SolveResult r = solve(syn.problem, cfg, opts);
    for (const auto& t : r.trace) EXPECT_LT(t.objective, 1e-15);
    EXPECT_LT(rel_err(r.x_hat, syn.truth), 1e-7);
}

TEST(Solve, TraceContents)
{
    const Synthetic syn = small_problem(14, 30.0);
    SolverConfig cfg;
    cfg.outer_iters = 6;
    SolveOptions opts;
    opts.reference = &syn.truth;
    int calls = 0;
    opts.on_iteration = [&](const TraceRecord&) { ++calls; };
    const SolveResult n = solve(syn.problem, cfg, opts);
    ASSERT_EQ(n.trace.size(), 6u);
    EXPECT_EQ(calls, 6);
    for (std::size_t i = 0; i < n.trace.size(); ++i) {
        EXPECT_EQ(n.trace[i].iteration, static_cast<int>(i + 1));
        EXPECT_DOUBLE_EQ(n.trace[i].mu, cfg.mu0 * std::pow(cfg.rho, static_cast<double>(i + 1)));
        EXPECT_GT(n.trace[i].nuclear_term, 0.0);
        EXPECT_TRUE(std::isfinite(n.trace[i].reference_rmse));
    }

    cfg.mode = SolverMode::ctrf;
    const SolveResult c = solve(syn.problem, cfg);
    for (const auto& t : c.trace) {
        EXPECT_EQ(t.mu, 0.0);
        EXPECT_EQ(t.nuclear_term, 0.0);
        EXPECT_EQ(t.g0_g3_residual, 0.0);
        EXPECT_TRUE(std::isnan(t.reference_rmse));
    }
}

TEST(Solve, Deterministic)
{
    const Synthetic syn = small_problem(15, 30.0);
    SolverConfig cfg;
    cfg.outer_iters = 8;
    cfg.seed = 3;
    const SolveResult a = solve(syn.problem, cfg), b = solve(syn.problem, cfg);
    EXPECT_EQ(a.x_hat, b.x_hat);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        EXPECT_EQ(a.trace[i].objective, b.trace[i].objective);
        EXPECT_EQ(a.trace[i].g0_g3_residual, b.trace[i].g0_g3_residual);
        EXPECT_EQ(a.trace[i].cg_iterations, b.trace[i].cg_iterations);
    }
}

TEST(Solve, IdentityOperatorsRecoverTheRing)
{
    const Synthetic syn = identity_problem(16);
    SolverConfig cfg = ctrf_config();
    cfg.outer_iters = 100;
    double best = 1.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        cfg.seed = seed;
        best = std::min(best, rel_err(solve(syn.problem, cfg).x_hat, syn.truth));
    }
    EXPECT_LT(best, 1e-4);
}

TEST(Solve, ReferenceShapeMismatchThrows)
{
    const Synthetic syn = small_problem(17);
    const DenseTensor wrong({8, 8, 5});
    SolveOptions opts;
    opts.reference = &wrong;
    EXPECT_THROW(solve(syn.problem, {}, opts), ShapeError);
}
