#include "ctrf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace ctrf {

namespace {

void check_pair(const DenseTensor& a, const DenseTensor& b, const char* what)
{
    if (a.shape() != b.shape())
        throw ShapeError(std::string(what) + ": shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
    if (a.order() != 3) throw ShapeError(std::string(what) + ": expected an M x N x B tensor");
}

// Per-band mean squared error.
std::vector<double> band_mse(const DenseTensor& a, const DenseTensor& b)
{
    const Index bands = a.dim(2);
    const Index pixels = a.dim(0) * a.dim(1);
    std::vector<double> mse(static_cast<std::size_t>(bands), 0.0);
    const double* pa = a.raw();
    const double* pb = b.raw();
    for (Index p = 0; p < pixels; ++p)
        for (Index k = 0; k < bands; ++k) {
            const double d = pa[p * bands + k] - pb[p * bands + k];
            mse[static_cast<std::size_t>(k)] += d * d;
        }
    for (double& v : mse) v /= static_cast<double>(pixels);
    return mse;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string QualityReport::csv_header() { return "psnr,rmse,ergas,sam,ssim"; }

std::string QualityReport::csv_row() const
{
    return fmt(psnr) + "," + fmt(rmse) + "," + fmt(ergas) + "," + fmt(sam) + "," + fmt(ssim);
}

std::string QualityReport::to_text() const
{
    std::ostringstream os;
    os << "psnr = " << fmt(psnr) << "\n"
       << "rmse = " << fmt(rmse) << "\n"
       << "ergas = " << fmt(ergas) << "\n"
       << "sam = " << fmt(sam) << "\n"
       << "ssim = " << fmt(ssim) << "\n";
    return os.str();
}

double rmse(const DenseTensor& x_hat, const DenseTensor& x_ref)
{
    if (x_hat.shape() != x_ref.shape())
        throw ShapeError("rmse: shape mismatch " + to_string(x_hat.shape()) + " vs " + to_string(x_ref.shape()));
    const DenseTensor d = x_hat - x_ref;
    return std::sqrt(inner(d, d) / static_cast<double>(d.size()));
}

double psnr(const DenseTensor& x_hat, const DenseTensor& x_ref, double peak, double cap)
{
    check_pair(x_hat, x_ref, "psnr");
    const auto mse = band_mse(x_hat, x_ref);
    double total = 0.0;
    for (double m : mse) total += m > 0.0 ? 10.0 * std::log10(peak * peak / m) : cap;
    return total / static_cast<double>(mse.size());
}

double ergas(const DenseTensor& x_hat, const DenseTensor& x_ref, double ratio)
{
    check_pair(x_hat, x_ref, "ergas");
    if (!(ratio > 0.0)) throw ArgumentError("ergas: ratio must be positive");
    const auto mse = band_mse(x_hat, x_ref);
    const Index bands = x_ref.dim(2);
    const Index pixels = x_ref.dim(0) * x_ref.dim(1);
    std::vector<double> mean(static_cast<std::size_t>(bands), 0.0);
    for (Index p = 0; p < pixels; ++p)
        for (Index k = 0; k < bands; ++k) mean[static_cast<std::size_t>(k)] += x_ref.raw()[p * bands + k];
    double acc = 0.0;
    for (Index k = 0; k < bands; ++k) {
        const double mu = mean[static_cast<std::size_t>(k)] / static_cast<double>(pixels);
        if (mu == 0.0) throw ArgumentError("ergas: reference band " + std::to_string(k) + " has zero mean");
        acc += mse[static_cast<std::size_t>(k)] / (mu * mu);
    }
    return 100.0 / ratio * std::sqrt(acc / static_cast<double>(bands));
}

double sam(const DenseTensor& x_hat, const DenseTensor& x_ref)
{
    check_pair(x_hat, x_ref, "sam");
    const Index bands = x_ref.dim(2);
    const Index pixels = x_ref.dim(0) * x_ref.dim(1);
    double total = 0.0;
    Index counted = 0;
    for (Index p = 0; p < pixels; ++p) {
        const double* u = x_hat.raw() + p * bands;
        const double* v = x_ref.raw() + p * bands;
        double uv = 0.0, uu = 0.0, vv = 0.0;
        for (Index k = 0; k < bands; ++k) {
            uv += u[k] * v[k];
            uu += u[k] * u[k];
            vv += v[k] * v[k];
        }
        if (uu == 0.0 || vv == 0.0) continue;
        const double c = std::clamp(uv / std::sqrt(uu * vv), -1.0, 1.0);
        total += std::acos(c);
        ++counted;
    }
    if (counted == 0) throw ArgumentError("sam: every pixel has a zero spectrum");
    return total / static_cast<double>(counted) * 180.0 / std::numbers::pi;
}

double ssim(const DenseTensor& x_hat, const DenseTensor& x_ref, double peak, int window)
{
    check_pair(x_hat, x_ref, "ssim");
    const Index rows = x_ref.dim(0), cols = x_ref.dim(1), bands = x_ref.dim(2);
    const Index w = window;
    if (w < 1 || rows < w || cols < w)
        throw ShapeError("ssim: image " + std::to_string(rows) + "x" + std::to_string(cols) + " smaller than window " +
                         std::to_string(w));
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    const double n = static_cast<double>(w * w);
    const Index wr = rows - w + 1, wc = cols - w + 1;

    std::vector<double> per_band(static_cast<std::size_t>(bands), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (Index k = 0; k < bands; ++k) {
        auto a = [&](Index i, Index j) { return x_hat.raw()[(i * cols + j) * bands + k]; };
        auto b = [&](Index i, Index j) { return x_ref.raw()[(i * cols + j) * bands + k]; };
        double acc = 0.0;
        for (Index r = 0; r < wr; ++r) {
            for (Index c = 0; c < wc; ++c) {
                double ma = 0.0, mb = 0.0;
                for (Index i = r; i < r + w; ++i)
                    for (Index j = c; j < c + w; ++j) {
                        ma += a(i, j);
                        mb += b(i, j);
                    }
                ma /= n;
                mb /= n;
                double va = 0.0, vb = 0.0, cov = 0.0;
                for (Index i = r; i < r + w; ++i)
                    for (Index j = c; j < c + w; ++j) {
                        const double da = a(i, j) - ma, db = b(i, j) - mb;
                        va += da * da;
                        vb += db * db;
                        cov += da * db;
                    }
                va /= n;
                vb /= n;
                cov /= n;
                acc += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            }
        }
        per_band[static_cast<std::size_t>(k)] = acc / static_cast<double>(wr * wc);
    }
    double total = 0.0;
    for (double v : per_band) total += v;
    return total / static_cast<double>(bands);
}

QualityReport evaluate(const DenseTensor& x_hat, const DenseTensor& x_ref, double ratio, double peak)
{
    QualityReport q;
    q.psnr = psnr(x_hat, x_ref, peak);
    q.rmse = rmse(x_hat, x_ref);
    q.ergas = ergas(x_hat, x_ref, ratio);
    q.sam = sam(x_hat, x_ref);
    q.ssim = ssim(x_hat, x_ref, peak);
    return q;
}

}  // namespace ctrf
