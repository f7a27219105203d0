#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "ctrf/metrics.hpp"
#include "ctrf/solver.hpp"

namespace ctrf {

double ClassSignatureReport::max_angle_deg() const
{
    return angles_deg.empty() ? 0.0 : *std::max_element(angles_deg.begin(), angles_deg.end());
}

namespace {

// Orthonormal basis of the column space (singular values above 1e-10 relative).
Matrix orth(const Matrix& a)
{
    const Svd d = svd_thin(a);
    const Index r = numeric_rank(a, 1e-10);
    return d.u.leftCols(r);
}

Matrix slice(const DenseTensor& core, Index i)
{
    Matrix s(core.dim(0), core.dim(2));
    for (Index a = 0; a < core.dim(0); ++a)
        for (Index b = 0; b < core.dim(2); ++b) s(a, b) = core(a, i, b);
    return s;
}

}  // namespace

std::vector<double> principal_angles_deg(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows()) throw ShapeError("principal_angles: bases live in different spaces");
    const Matrix qa = orth(a);
    const Matrix qb = orth(b);
    std::vector<double> angles;
    if (qa.cols() == 0 || qb.cols() == 0) return angles;
    const Svd d = svd_thin(qa.transpose() * qb);
    for (Index k = 0; k < d.s.size(); ++k)
        angles.push_back(std::acos(std::clamp(d.s(k), -1.0, 1.0)) * 180.0 / std::numbers::pi);
    return angles;
}

SignatureReport signature_analysis(const Matrix& pixels, const std::vector<int>& labels,
                                   const std::array<Index, 3>& ranks, const SignatureOptions& opts)
{
    const Index count = pixels.rows();
    const Index bands = pixels.cols();
    if (static_cast<Index>(labels.size()) != count)
        throw ShapeError("signature_analysis: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(count) + " pixels");
    if (count < 1 || bands < 1) throw ShapeError("signature_analysis: empty pixel stack");

    std::map<int, Index> class_sizes;
    for (int l : labels) ++class_sizes[l];
    const Index per_class = class_sizes.begin()->second;
    for (const auto& [label, size] : class_sizes)
        if (size != per_class)
            throw ShapeError("signature_analysis: class " + std::to_string(label) + " has " + std::to_string(size) +
                             " pixels, expected " + std::to_string(per_class));

    std::vector<Index> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return labels[static_cast<std::size_t>(a)] < labels[static_cast<std::size_t>(b)];
    });

    Index h = static_cast<Index>(std::sqrt(static_cast<double>(count)));
    while (count % h != 0) --h;
    const Index w = count / h;

    DenseTensor cube({h, w, bands});
    for (Index p = 0; p < count; ++p)
        for (Index k = 0; k < bands; ++k) cube.raw()[p * bands + k] = pixels(order[static_cast<std::size_t>(p)], k);

    // Plain TR fit: both observations are the cube itself, all operators identity.
    FusionProblem problem;
    problem.y = cube;
    problem.z = cube;
    problem.model.p1 = Matrix::Identity(h, h);
    problem.model.p2 = Matrix::Identity(w, w);
    problem.model.p3 = Matrix::Identity(bands, bands);
    problem.ranks = ranks;

    SolverConfig cfg;
    cfg.mode = SolverMode::ctrf;
    cfg.outer_iters = opts.iterations;
    cfg.cg.tol = 1e-10;

    std::optional<SolveResult> best;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
        cfg.seed = opts.seed + static_cast<std::uint64_t>(r);
        SolveResult res = solve(problem, cfg);
        const double obj = res.trace.empty() ? ctrf_objective(res.state, problem).total : res.trace.back().objective;
        if (obj < best_obj) {
            best_obj = obj;
            best = std::move(res);
        }
    }

    const TRCores& cores = best->state.cores;
    const DenseTensor& g3 = cores.core(2);
    SignatureReport report;
    report.cube_shape = cube.shape();
    report.spectral_core = g3.shape();
    report.relative_fit = fro_norm(best->x_hat - cube) / fro_norm(cube);

    const Index r1 = ranks[0], r3 = ranks[2];
    Index start = 0;
    for (const auto& [label, size] : class_sizes) {
        // Coefficient matrices G1(i)·G2(j) of this class, vectorised. The class
        // can be tagged through either bond of G3, so take their dominant
        // subspace jointly and map it through the spectral core.
        Matrix usage = Matrix::Zero(r1 * r3, r1 * r3);
        Matrix ref(size, bands);
        for (Index p = start; p < start + size; ++p) {
            const Matrix coeff = slice(cores.core(0), p / w) * slice(cores.core(1), p % w);
            const Vector v = Eigen::Map<const Vector>(coeff.data(), coeff.size());
            usage += v * v.transpose();
            ref.row(p - start) = pixels.row(order[static_cast<std::size_t>(p)]);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(usage);
        const Index dims = std::min(r1, r1 * r3);

        Matrix tr_sig = Matrix::Zero(bands, dims);
        for (Index s = 0; s < dims; ++s) {
            const Vector e = eig.eigenvectors().col(r1 * r3 - 1 - s);
            for (Index a = 0; a < r1; ++a)
                for (Index c = 0; c < r3; ++c)
                    for (Index k = 0; k < bands; ++k) tr_sig(k, s) += e(a * r3 + c) * g3(c, k, a);
        }

        const Svd ref_svd = svd_thin(ref);
        const Index keep = std::min<Index>(r1, ref_svd.v.cols());

        ClassSignatureReport cls;
        cls.label = label;
        cls.pixels = size;
        cls.angles_deg = principal_angles_deg(tr_sig, ref_svd.v.leftCols(keep));
        report.classes.push_back(std::move(cls));
        start += size;
    }
    return report;
}

}  // namespace ctrf
