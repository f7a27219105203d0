#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ctrf/degradation.hpp"
#include "ctrf/tensor.hpp"

namespace ctrf::io {

namespace fs = std::filesystem;

/// Thrown for unreadable, unwritable or malformed files.
class IoError : public ShapeError {
public:
    using ShapeError::ShapeError;
};

// HTEN binary tensor file:
//   "HTEN" | u8 version (1) | u8 order | order × u32 LE dims | u8 dtype (1 = f64 LE) | payload
// The payload lists the elements in DenseTensor order (first index slowest).
inline constexpr std::uint8_t kHtenVersion = 1;
inline constexpr std::uint8_t kHtenFloat64 = 1;

std::vector<std::uint8_t> encode_hten(const DenseTensor& t);
DenseTensor decode_hten(const std::vector<std::uint8_t>& bytes);

void write_tensor(const fs::path& path, const DenseTensor& t);
DenseTensor read_tensor(const fs::path& path);

/// Flat CSV of values (any mix of commas and whitespace, in DenseTensor order)
/// plus a sidecar holding the shape as integers separated by 'x', ',' or spaces.
DenseTensor read_tensor_csv(const fs::path& values, const fs::path& shape_sidecar);

/// Whitespace-separated rows of reals; one line per row.
Matrix read_text_matrix(const fs::path& path);
void write_text_matrix(const fs::path& path, const Matrix& m);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const fs::path& path, const std::string& contents);
std::vector<std::uint8_t> read_file_bytes(const fs::path& path);

/// Ordered "key = value" text; lines starting with '#' are comments.
class Manifest {
public:
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;

    std::string to_text() const;
    static Manifest parse(const std::string& text);
    static Manifest load(const fs::path& path);
    void save(const fs::path& path) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Writes p1/p2/p3 as text matrices next to `manifest_path` and records them
/// (plus the construction parameters) in the manifest.
void save_model(const fs::path& manifest_path, const DegradationModel& model, Manifest manifest);
/// Reads a model saved by save_model; matrix paths resolve relative to the manifest.
DegradationModel load_model(const fs::path& manifest_path);

/// "1-23;24-46" style list of one-based inclusive band ranges.
std::string format_band_groups(const std::vector<BandGroup>& groups);
std::vector<BandGroup> parse_band_groups(const std::string& text);

std::string format_double(double v);

}  // namespace ctrf::io
