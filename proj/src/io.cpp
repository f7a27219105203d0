#include "ctrf/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

namespace ctrf::io {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

std::uint32_t get_u32(const std::uint8_t* p)
{
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(p[k]) << (8 * k);
    return v;
}

void put_f64(std::vector<std::uint8_t>& out, double d)
{
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

double get_f64(const std::uint8_t* p)
{
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(p[k]) << (8 * k);
    return std::bit_cast<double>(v);
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

double parse_double(const std::string& tok, const fs::path& where)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError(where.string() + ": cannot parse '" + tok + "' as a number");
    }
}

}  // namespace

std::string format_double(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::uint8_t> encode_hten(const DenseTensor& t)
{
    if (t.order() > 255) throw IoError("HTEN supports at most 255 modes");
    std::vector<std::uint8_t> out;
    out.reserve(8 + 4 * static_cast<std::size_t>(t.order()) + 8 * static_cast<std::size_t>(t.size()));
    for (char c : {'H', 'T', 'E', 'N'}) out.push_back(static_cast<std::uint8_t>(c));
    out.push_back(kHtenVersion);
    out.push_back(static_cast<std::uint8_t>(t.order()));
    for (Index d : t.shape()) {
        if (d > static_cast<Index>(std::numeric_limits<std::uint32_t>::max())) throw IoError("HTEN dimension too large");
        put_u32(out, static_cast<std::uint32_t>(d));
    }
    out.push_back(kHtenFloat64);
    for (double v : t.data()) put_f64(out, v);
    return out;
}

DenseTensor decode_hten(const std::vector<std::uint8_t>& bytes)
{
    if (bytes.size() < 7 || std::memcmp(bytes.data(), "HTEN", 4) != 0) throw IoError("not an HTEN file (bad magic)");
    if (bytes[4] != kHtenVersion) throw IoError("unsupported HTEN version " + std::to_string(bytes[4]));
    const std::size_t order = bytes[5];
    if (order == 0) throw IoError("HTEN file has order 0");
    const std::size_t header = 6 + 4 * order + 1;
    if (bytes.size() < header) throw IoError("truncated HTEN header");
    Shape shape(order);
    for (std::size_t k = 0; k < order; ++k) shape[k] = static_cast<Index>(get_u32(bytes.data() + 6 + 4 * k));
    if (bytes[header - 1] != kHtenFloat64) throw IoError("unsupported HTEN dtype " + std::to_string(bytes[header - 1]));
    for (Index d : shape)
        if (d < 1) throw IoError("HTEN file has a zero dimension");
    const auto count = static_cast<std::size_t>(num_elements(shape));
    if (bytes.size() != header + 8 * count)
        throw IoError("HTEN payload is " + std::to_string(bytes.size() - header) + " bytes, expected " +
                      std::to_string(8 * count) + " for shape " + to_string(shape));
    std::vector<double> data(count);
    for (std::size_t k = 0; k < count; ++k) data[k] = get_f64(bytes.data() + header + 8 * k);
    return DenseTensor(std::move(shape), std::move(data));
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_atomic(const fs::path& path, const std::string& contents)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move " + tmp.string() + " to " + path.string());
    }
}

void write_tensor(const fs::path& path, const DenseTensor& t)
{
    const auto bytes = encode_hten(t);
    write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

DenseTensor read_tensor(const fs::path& path) { return decode_hten(read_file_bytes(path)); }

DenseTensor read_tensor_csv(const fs::path& values, const fs::path& shape_sidecar)
{
    std::string shape_text = read_text(shape_sidecar);
    for (char& c : shape_text)
        if (c == 'x' || c == ',') c = ' ';
    Shape shape;
    {
        std::istringstream is(shape_text);
        Index d = 0;
        while (is >> d) shape.push_back(d);
        if (!is.eof()) throw IoError(shape_sidecar.string() + ": malformed shape");
    }
    if (shape.empty()) throw IoError(shape_sidecar.string() + ": empty shape");

    std::string text = read_text(values);
    for (char& c : text)
        if (c == ',' || c == ';') c = ' ';
    std::istringstream is(text);
    std::vector<double> data;
    std::string tok;
    while (is >> tok) data.push_back(parse_double(tok, values));
    if (static_cast<Index>(data.size()) != num_elements(shape))
        throw IoError(values.string() + ": " + std::to_string(data.size()) + " values for shape " + to_string(shape));
    return DenseTensor(std::move(shape), std::move(data));
}

Matrix read_text_matrix(const fs::path& path)
{
    std::istringstream in(read_text(path));
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) row.push_back(parse_double(tok, path));
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError(path.string() + ": ragged matrix (row " + std::to_string(rows.size() + 1) + ")");
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty()) throw IoError(path.string() + ": empty matrix");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

void write_text_matrix(const fs::path& path, const Matrix& m)
{
    std::string out;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out += ' ';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

// ---------------------------------------------------------------------------

void Manifest::set(const std::string& key, const std::string& value)
{
    for (auto& [k, v] : entries_)
        if (k == key) {
            v = value;
            return;
        }
    entries_.emplace_back(key, value);
}

bool Manifest::has(const std::string& key) const
{
    for (const auto& e : entries_)
        if (e.first == key) return true;
    return false;
}

const std::string& Manifest::get(const std::string& key) const
{
    for (const auto& e : entries_)
        if (e.first == key) return e.second;
    throw IoError("manifest has no key '" + key + "'");
}

std::string Manifest::get_or(const std::string& key, const std::string& fallback) const
{
    return has(key) ? get(key) : fallback;
}

std::string Manifest::to_text() const
{
    std::string out;
    for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
    return out;
}

Manifest Manifest::parse(const std::string& text)
{
    Manifest m;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError("manifest line " + std::to_string(lineno) + " has no '='");
        m.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return m;
}

Manifest Manifest::load(const fs::path& path) { return parse(read_text(path)); }

void Manifest::save(const fs::path& path) const { write_file_atomic(path, to_text()); }

std::string format_band_groups(const std::vector<BandGroup>& groups)
{
    std::string out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (g) out += ';';
        const auto& grp = groups[g];
        std::size_t k = 0;
        bool first = true;
        while (k < grp.size()) {
            std::size_t e = k;
            while (e + 1 < grp.size() && grp[e + 1] == grp[e] + 1) ++e;
            if (!first) out += ',';
            first = false;
            out += std::to_string(grp[k] + 1);
            if (e > k) out += "-" + std::to_string(grp[e] + 1);
            k = e + 1;
        }
    }
    return out;
}

std::vector<BandGroup> parse_band_groups(const std::string& text)
{
    std::vector<BandGroup> groups;
    std::istringstream gs(text);
    std::string group;
    while (std::getline(gs, group, ';')) {
        BandGroup g;
        std::istringstream is(group);
        std::string item;
        while (std::getline(is, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                const auto dash = item.find('-');
                const Index lo = std::stol(item.substr(0, dash));
                const Index hi = dash == std::string::npos ? lo : std::stol(item.substr(dash + 1));
                if (lo < 1 || hi < lo) throw std::invalid_argument(item);
                for (Index b = lo; b <= hi; ++b) g.push_back(b - 1);
            } catch (const std::exception&) {
                throw ArgumentError("malformed band range '" + item + "'");
            }
        }
        if (g.empty()) throw ArgumentError("empty band group in '" + text + "'");
        groups.push_back(std::move(g));
    }
    if (groups.empty()) throw ArgumentError("no band groups in '" + text + "'");
    return groups;
}

void save_model(const fs::path& manifest_path, const DegradationModel& model, Manifest manifest)
{
    const fs::path dir = manifest_path.parent_path();
    write_text_matrix(dir / "p1.txt", model.p1);
    write_text_matrix(dir / "p2.txt", model.p2);
    write_text_matrix(dir / "p3.txt", model.p3);
    manifest.set("spatial_factor", std::to_string(model.spatial_factor));
    manifest.set("kernel_size", std::to_string(model.kernel_size));
    if (!model.band_groups.empty()) manifest.set("band_groups", format_band_groups(model.band_groups));
    manifest.set("p1", "p1.txt");
    manifest.set("p2", "p2.txt");
    manifest.set("p3", "p3.txt");
    manifest.save(manifest_path);
}

DegradationModel load_model(const fs::path& manifest_path)
{
    const Manifest m = Manifest::load(manifest_path);
    const fs::path dir = manifest_path.parent_path();
    auto resolve = [&](const std::string& key) {
        const fs::path p = m.get(key);
        return p.is_absolute() ? p : dir / p;
    };
    DegradationModel model;
    model.p1 = read_text_matrix(resolve("p1"));
    model.p2 = read_text_matrix(resolve("p2"));
    model.p3 = read_text_matrix(resolve("p3"));
    model.spatial_factor = std::stol(m.get_or("spatial_factor", "1"));
    model.kernel_size = std::stol(m.get_or("kernel_size", "1"));
    if (m.has("band_groups")) model.band_groups = parse_band_groups(m.get("band_groups"));
    return model;
}

}  // namespace ctrf::io
