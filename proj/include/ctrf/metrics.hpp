#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ctrf/tensor.hpp"

namespace ctrf {

// Quality indices for an M × N × B reconstruction against a reference.
// Band-wise quantities run over the last mode, spatial quantities over the
// first two.

struct QualityReport {
    double psnr = 0.0;   ///< dB, mean over bands
    double rmse = 0.0;
    double ergas = 0.0;
    double sam = 0.0;    ///< degrees
    double ssim = 0.0;   ///< mean over bands

    /// "psnr,rmse,ergas,sam,ssim"
    static std::string csv_header();
    std::string csv_row() const;
    /// One "key = value" line per index, in CSV column order.
    std::string to_text() const;
};

inline constexpr double kPsnrCap = 100.0;
inline constexpr int kSsimWindow = 8;

double rmse(const DenseTensor& x_hat, const DenseTensor& x_ref);
/// Mean over bands of 10·log10(peak² / MSE_b); bands with zero error count as `cap`.
double psnr(const DenseTensor& x_hat, const DenseTensor& x_ref, double peak = 255.0, double cap = kPsnrCap);
/// 100/ratio · sqrt(mean_b (RMSE_b / mean_b(x_ref))²).
double ergas(const DenseTensor& x_hat, const DenseTensor& x_ref, double ratio);
/// Mean spectral angle in degrees over pixels where both spectra are nonzero.
double sam(const DenseTensor& x_hat, const DenseTensor& x_ref);
/// Single-scale SSIM with a uniform window × window sliding window (stride 1,
/// population statistics), C1 = (0.01·peak)², C2 = (0.03·peak)²; mean over
/// windows, then over bands.
double ssim(const DenseTensor& x_hat, const DenseTensor& x_ref, double peak = 255.0, int window = kSsimWindow);

QualityReport evaluate(const DenseTensor& x_hat, const DenseTensor& x_ref, double ratio, double peak = 255.0);

// ---------------------------------------------------------------------------
// Class-signature analysis.

struct ClassSignatureReport {
    int label = 0;
    Index pixels = 0;
    /// Principal angles (degrees, ascending) between the TR-extracted and the
    /// SVD reference signature subspaces.
    std::vector<double> angles_deg;
    double max_angle_deg() const;
};

struct SignatureReport {
    Shape cube_shape;        ///< spatial arrangement used for the factorisation
    Shape spectral_core;     ///< shape of G3
    double relative_fit = 0.0;  ///< ‖X − Φ(G)‖ / ‖X‖
    std::vector<ClassSignatureReport> classes;
};

struct SignatureOptions {
    int iterations = 200;
    std::uint64_t seed = 0;
    int restarts = 3;
};

/**
 * Arranges the pixel stack (pixels × bands, sorted stably by label) as an
 * h × w × B cube, fits a tensor ring with the given ranks by alternating least
 * squares, and compares each class's TR signature subspace with the leading
 * right singular vectors of that class's pixels.
 *
 * The class-k TR subspace is spanned by the spectral-core fibres G3(:, :, a)
 * contracted over the first mode with the dominant class-mode direction of
 * the class-k pixels' coefficient matrices G1(i)·G2(j). Its dimension is R1.
 */
SignatureReport signature_analysis(const Matrix& pixels, const std::vector<int>& labels,
                                   const std::array<Index, 3>& ranks, const SignatureOptions& opts = {});

/// Principal angles in degrees between the column spaces of a and b.
std::vector<double> principal_angles_deg(const Matrix& a, const Matrix& b);

}  // namespace ctrf
