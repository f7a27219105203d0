#include "ctrf/numerics.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

namespace ctrf {

double frobenius_inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

CGResult cg_solve(const LinearOperator& op, const Matrix& rhs, const Matrix& x0, const CGConfig& cfg)
{
    if (!(cfg.tol > 0.0)) throw ArgumentError("cg_solve: tol must be positive");
    if (rhs.rows() != op.rows || rhs.cols() != op.cols || x0.rows() != op.rows || x0.cols() != op.cols)
        throw ShapeError("cg_solve: operator is " + std::to_string(op.rows) + "x" + std::to_string(op.cols) +
                         ", rhs " + std::to_string(rhs.rows()) + "x" + std::to_string(rhs.cols()) + ", x0 " +
                         std::to_string(x0.rows()) + "x" + std::to_string(x0.cols()));

    CGResult res;
    res.x = x0;
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) {
        res.x.setZero();
        res.converged = true;
        res.residual_history.push_back(0.0);
        res.energy_history.push_back(0.0);
        return res;
    }

    Matrix ax = op(res.x);
    Matrix r = rhs - ax;
    auto energy = [&](const Matrix& x, const Matrix& opx) {
        return 0.5 * frobenius_inner(x, opx) - frobenius_inner(rhs, x);
    };
    double rr = frobenius_inner(r, r);
    res.residual = std::sqrt(rr) / rhs_norm;
    res.residual_history.push_back(res.residual);
    res.energy_history.push_back(energy(res.x, ax));
    if (!std::isfinite(rr)) throw NumericalError("cg_solve: non-finite initial residual");
    if (res.residual <= cfg.tol) {
        res.converged = true;
        return res;
    }

    Matrix p = r;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        const Matrix ap = op(p);
        const double pap = frobenius_inner(p, ap);
        if (!std::isfinite(pap))
            throw NumericalError("cg_solve: non-finite curvature at iteration " + std::to_string(it));
        if (pap <= 0.0) break;  // p lies in the null space; no further progress possible
        const double alpha = rr / pap;
        res.x += alpha * p;
        ax += alpha * ap;
        r -= alpha * ap;
        const double rr_new = frobenius_inner(r, r);
        if (!std::isfinite(rr_new) || !res.x.allFinite())
            throw NumericalError("cg_solve: non-finite iterate at iteration " + std::to_string(it));
        res.iterations = it;
        res.residual = std::sqrt(rr_new) / rhs_norm;
        res.residual_history.push_back(res.residual);
        res.energy_history.push_back(energy(res.x, ax));
        if (res.residual <= cfg.tol) {
            res.converged = true;
            break;
        }
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    return res;
}

Svd svd_thin(const Matrix& m)
{
    if (!m.allFinite()) throw NumericalError("svd_thin: non-finite input");
    Svd out;
    if (m.size() == 0) return out;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU();
    out.s = svd.singularValues();
    out.v = svd.matrixV();
    return out;
}

Matrix svt(const Matrix& m, double tau)
{
    if (!(tau >= 0.0)) throw ArgumentError("svt: threshold must be nonnegative");
    const Svd d = svd_thin(m);
    const Vector shrunk = (d.s.array() - tau).cwiseMax(0.0).matrix();
    return d.u * shrunk.asDiagonal() * d.v.transpose();
}

Index numeric_rank(const Matrix& m, double rel_tol)
{
    if (m.size() == 0) return 0;
    const Svd d = svd_thin(m);
    if (d.s.size() == 0 || d.s(0) == 0.0) return 0;
    const double cut = rel_tol * d.s(0);
    return static_cast<Index>((d.s.array() > cut).count());
}

double nuclear_norm(const Matrix& m)
{
    if (m.size() == 0) return 0.0;
    return svd_thin(m).s.sum();
}

}  // namespace ctrf
