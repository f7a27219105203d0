#include "ctrf/selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include "ctrf/numerics.hpp"
#include "ctrf/tensor_ring.hpp"

namespace ctrf {

namespace {

using Clock = std::chrono::steady_clock;

Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
}

TRCores random_ring(std::mt19937_64& rng, Index order, Index max_rank, Index max_dim)
{
    std::uniform_int_distribution<Index> rank(1, max_rank), dim(1, max_dim);
    Shape dims;
    std::vector<Index> ranks;
    for (Index k = 0; k < order; ++k) {
        dims.push_back(dim(rng));
        ranks.push_back(rank(rng));
    }
    return tr_init(dims, ranks, rng());
}

double rel_diff(const Matrix& a, const Matrix& b)
{
    const double scale = std::max(a.norm(), b.norm());
    return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

template <class Fn>
CheckResult timed(std::string name, Fn&& fn)
{
    CheckResult r;
    r.name = std::move(name);
    const auto start = Clock::now();
    try {
        fn(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

std::string sci(double v)
{
    std::ostringstream os;
    os.precision(2);
    os << std::scientific << v;
    return os.str();
}

}  // namespace

std::vector<CheckResult> run_self_check(const SelfCheckOptions& opts)
{
    std::mt19937_64 rng(opts.seed);
    std::vector<CheckResult> out;

    out.push_back(timed("block unfolding factors through merged cores", [&](CheckResult& r) {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const Index order = 3 + trial % 2;
            const TRCores c = random_ring(rng, order, 4, 5);
            const DenseTensor x = tr_reconstruct(c);
            for (Index split = 1; split < order; ++split) {
                Matrix left = mode_n_unfold(merge_cores(c, 0, split), 2);
                if (opts.corrupt_unfolding && left.cols() > 1) left.col(0).swap(left.col(1));
                const Matrix right = tr_unfold(merge_cores(c, split, order - split), 2);
                worst = std::max(worst, rel_diff(left * right.transpose(), block_unfold(x, split)));
            }
        }
        r.passed = worst <= 1e-10;
        r.detail = "max relative error " + sci(worst);
    }));

    out.push_back(timed("cyclic shift of cores shifts the tensor", [&](CheckResult& r) {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const Index order = 3 + trial % 2;
            const TRCores c = random_ring(rng, order, 4, 5);
            const DenseTensor x = tr_reconstruct(c);
            for (Index s = 1; s < order; ++s) {
                const DenseTensor shifted = circ_shift(x, s);
                const DenseTensor rot = tr_reconstruct(c.rotated(s));
                worst = std::max(worst, fro_norm(shifted - rot) / std::max(fro_norm(shifted), 1e-300));
            }
        }
        r.passed = worst <= 1e-12;
        r.detail = "max relative error " + sci(worst);
    }));

    out.push_back(timed("core spectral rank bounds tensor mode rank", [&](CheckResult& r) {
        int violations = 0, checks = 0;
        for (int trial = 0; trial < 30; ++trial) {
            const Index order = 3 + trial % 2;
            const TRCores c = random_ring(rng, order, 3, 6);
            for (Index n = 1; n <= order; ++n, ++checks)
                if (!rank_bound_check(c, n).holds) ++violations;
        }
        r.passed = violations == 0;
        r.detail = std::to_string(violations) + " violations in " + std::to_string(checks) + " checks";
    }));

    out.push_back(timed("SVT is the nuclear-norm proximal map", [&](CheckResult& r) {
        int beaten = 0;
        std::normal_distribution<double> normal;
        for (int trial = 0; trial < 5; ++trial) {
            const Matrix m = random_matrix(6, 4, rng);
            const double tau = 0.5;
            const Matrix p = svt(m, tau);
            auto objective = [&](const Matrix& x) { return tau * nuclear_norm(x) + 0.5 * (x - m).squaredNorm(); };
            const double best = objective(p);
            for (int k = 0; k < 200; ++k) {
                Matrix q = p;
                for (Index i = 0; i < q.size(); ++i) q.data()[i] += 1e-2 * normal(rng);
                if (objective(q) <= best) ++beaten;
            }
        }
        r.passed = beaten == 0;
        r.detail = std::to_string(beaten) + " of 1000 perturbations matched or beat the SVT point";
    }));

    out.push_back(timed("CG matches dense Sylvester solve", [&](CheckResult& r) {
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const Index n = 2 + trial, k = 3 + trial % 3;
            const Matrix a = random_matrix(n, n, rng), b = random_matrix(k, k, rng), c = random_matrix(k, k, rng);
            const Matrix s = a * a.transpose() + Matrix::Identity(n, n);
            const Matrix kb = b * b.transpose();
            const Matrix kc = c * c.transpose() + Matrix::Identity(k, k);
            const Matrix rhs = random_matrix(n, k, rng);
            LinearOperator op{n, k, [&](const Matrix& g) -> Matrix { return s * g * kb + g * kc; }};
            const CGResult res = cg_solve(op, rhs, Matrix::Zero(n, k), {1e-12, 500});
            // Row-major vectorisation: vec(S G K) = (S ⊗ Kᵀ) vec(G).
            const Matrix dense = kron(s, kb.transpose()) + kron(Matrix::Identity(n, n), kc.transpose());
            const Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(rhs.data(), rhs.size());
            const Eigen::VectorXd sol = dense.fullPivLu().solve(flat);
            const Matrix direct = Eigen::Map<const Matrix>(sol.data(), n, k);
            worst = std::max(worst, rel_diff(res.x, direct));
        }
        r.passed = worst <= 1e-6;
        r.detail = "max relative error " + sci(worst);
    }));

    return out;
}

}  // namespace ctrf
