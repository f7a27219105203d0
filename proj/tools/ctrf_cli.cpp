// ctrf: simulate, fuse, evaluate, signatures and check subcommands.
//
// Exit codes: 0 success, 2 usage error, 3 data/shape error, 4 numerical failure.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ctrf/degradation.hpp"
#include "ctrf/io.hpp"
#include "ctrf/metrics.hpp"
#include "ctrf/selfcheck.hpp"
#include "ctrf/solver.hpp"

namespace fs = std::filesystem;
using namespace ctrf;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string default_out_dir()
{
    const char* env = std::getenv("CTRF_OUTPUT_DIR");
    return env && *env ? env : ".";
}

double parse_snr(const std::string& s)
{
    if (s == "inf" || s == "infinity" || s == "Inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !(v > 0.0)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("--snr must be a positive number of dB or 'inf', got '" + s + "'");
    }
}

TRRanks parse_ranks(const std::string& s)
{
    std::string t = s;
    for (char& c : t)
        if (c == ',' || c == 'x') c = ' ';
    std::istringstream is(t);
    std::vector<long> v;
    long r = 0;
    while (is >> r) v.push_back(r);
    if (!is.eof() || v.size() != 3 || v[0] < 1 || v[1] < 1 || v[2] < 1)
        throw UsageError("--ranks expects three positive integers like 4,200,4, got '" + s + "'");
    return {v[0], v[1], v[2]};
}

std::vector<int> read_labels(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw io::IoError("cannot open " + path.string());
    std::vector<int> labels;
    std::string tok;
    while (in >> tok) {
        try {
            labels.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw io::IoError(path.string() + ": bad label '" + tok + "'");
        }
    }
    return labels;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string input;
    std::string csv_shape;
    std::string from_manifest;
    std::string out_dir = default_out_dir();
    std::string snr = "30";
    Index factor = 4;
    Index kernel = 8;
    Index ms_bands = 4;
    std::string band_groups;
    std::string spectral_response;
    std::uint64_t seed = 0;
    double scale_max = 255.0;
};

int cmd_simulate(SimulateArgs a)
{
    if (!a.from_manifest.empty()) {
        const auto m = io::Manifest::load(a.from_manifest);
        a.input = m.get("input");
        a.csv_shape = m.get_or("input_shape", "");
        a.snr = m.get("snr_db");
        a.seed = std::stoull(m.get("seed"));
        a.scale_max = std::stod(m.get("scale_max"));
        a.factor = std::stol(m.get("spatial_factor"));
        a.kernel = std::stol(m.get("kernel_size"));
        a.band_groups = m.get_or("band_groups", "");
        a.spectral_response = m.get_or("spectral_response", "");
    }
    if (a.input.empty()) throw UsageError("simulate needs --input or --from-manifest");

    const DenseTensor hr = a.csv_shape.empty() ? io::read_tensor(a.input) : io::read_tensor_csv(a.input, a.csv_shape);
    if (hr.order() != 3) throw ShapeError("HR-HSI must be an order-3 tensor, got " + to_string(hr.shape()));

    DegradationModel model;
    if (!a.spectral_response.empty()) {
        model = make_model(hr.dim(0), hr.dim(1), a.factor, a.kernel, io::read_text_matrix(a.spectral_response));
        if (model.bands() != hr.dim(2))
            throw ShapeError("spectral response has " + std::to_string(model.bands()) + " columns, tensor has " +
                             std::to_string(hr.dim(2)) + " bands");
    } else {
        const auto groups =
            a.band_groups.empty() ? equal_band_groups(hr.dim(2), a.ms_bands) : io::parse_band_groups(a.band_groups);
        model = make_model(hr.dim(0), hr.dim(1), hr.dim(2), a.factor, a.kernel, groups);
    }

    SimulationConfig cfg;
    cfg.snr_db = parse_snr(a.snr);
    cfg.seed = a.seed;
    cfg.scale_max = a.scale_max;
    const SimulatedPair sim = simulate(hr, model, cfg);

    const fs::path out(a.out_dir);
    io::write_tensor(out / "reference.hten", sim.reference);
    io::write_tensor(out / "y.hten", sim.y);
    io::write_tensor(out / "z.hten", sim.z);

    io::Manifest m;
    m.set("input", fs::absolute(a.input).string());
    if (!a.csv_shape.empty()) m.set("input_shape", fs::absolute(a.csv_shape).string());
    m.set("hr_shape", to_string(hr.shape()));
    m.set("y_shape", to_string(sim.y.shape()));
    m.set("z_shape", to_string(sim.z.shape()));
    m.set("snr_db", io::format_double(cfg.snr_db));
    m.set("seed", std::to_string(cfg.seed));
    m.set("scale_max", io::format_double(cfg.scale_max));
    if (!a.spectral_response.empty()) m.set("spectral_response", fs::absolute(a.spectral_response).string());
    io::save_model(out / "model.txt", model, m);

    std::cout << "reference " << to_string(sim.reference.shape()) << " -> " << (out / "reference.hten").string() << "\n"
              << "y         " << to_string(sim.y.shape()) << " -> " << (out / "y.hten").string() << "\n"
              << "z         " << to_string(sim.z.shape()) << " -> " << (out / "z.hten").string() << "\n"
              << "model     " << (out / "model.txt").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct FuseArgs {
    std::string y, z, model;
    std::string out_dir = default_out_dir();
    std::string mode = "nctrf";
    std::string ranks;
    std::string preset;
    int iters = 50;
    double lambda = 1e-3, rho = 1.5, mu0 = 1e-4, mu_max = 1e6;
    double cg_tol = 1e-8;
    int cg_max_iter = 300;
    std::uint64_t seed = 0;
    bool verbose = false;
};

std::string trace_csv(const std::vector<TraceRecord>& trace, SolverMode mode)
{
    const bool nctrf = mode == SolverMode::nctrf;
    std::string out = nctrf ? "iteration,objective,hsi_term,msi_term,nuclear_term,mu,g0_g3_residual,wall_seconds\n"
                            : "iteration,objective,hsi_term,msi_term,nuclear_term,g0_g3_residual,wall_seconds\n";
    for (const auto& r : trace) {
        out += std::to_string(r.iteration) + "," + io::format_double(r.objective) + "," + io::format_double(r.hsi_term) +
               "," + io::format_double(r.msi_term) + ",";
        if (nctrf)
            out += io::format_double(r.nuclear_term) + "," + io::format_double(r.mu) + "," +
                   io::format_double(r.g0_g3_residual) + ",";
        else
            out += ",,";
        out += io::format_double(r.wall_seconds) + "\n";
    }
    return out;
}

int cmd_fuse(const FuseArgs& a)
{
    SolverConfig cfg;
    if (a.mode == "ctrf")
        cfg.mode = SolverMode::ctrf;
    else if (a.mode == "nctrf")
        cfg.mode = SolverMode::nctrf;
    else
        throw UsageError("--mode must be ctrf or nctrf");
    cfg.lambda = a.lambda;
    cfg.rho = a.rho;
    cfg.mu0 = a.mu0;
    cfg.mu_max = a.mu_max;
    cfg.outer_iters = a.iters;
    cfg.cg = {a.cg_tol, a.cg_max_iter};
    cfg.seed = a.seed;
    try {
        cfg.validate();
    } catch (const ArgumentError& e) {
        throw UsageError(e.what());
    }

    FusionProblem problem;
    if (!a.preset.empty()) {
        try {
            problem.ranks = rank_preset(a.preset);
        } catch (const ArgumentError& e) {
            throw UsageError(e.what());
        }
    }
    if (!a.ranks.empty()) problem.ranks = parse_ranks(a.ranks);
    if (a.preset.empty() && a.ranks.empty()) throw UsageError("fuse needs --ranks or --preset");
    problem.y = io::read_tensor(a.y);
    problem.z = io::read_tensor(a.z);
    problem.model = io::load_model(a.model);
    problem.validate();

    SolveOptions opts;
    if (a.verbose)
        opts.on_iteration = [](const TraceRecord& r) {
            std::cerr << "iter " << r.iteration << " objective " << r.objective << " cg " << r.cg_iterations << "\n";
        };
    const SolveResult res = solve(problem, cfg, opts);

    const fs::path out(a.out_dir);
    io::write_tensor(out / "x_hat.hten", res.x_hat);
    io::write_file_atomic(out / "trace.csv", trace_csv(res.trace, cfg.mode));
    std::cout << "ranks [" << problem.ranks[0] << "," << problem.ranks[1] << "," << problem.ranks[2] << "], "
              << cfg.outer_iters << " iterations, final objective "
              << (res.trace.empty() ? 0.0 : res.trace.back().objective) << "\n"
              << "x_hat " << to_string(res.x_hat.shape()) << " -> " << (out / "x_hat.hten").string() << "\n"
              << "trace -> " << (out / "trace.csv").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
    std::string estimate, reference, csv;
    double ratio = 4.0;
    double peak = 255.0;
};

int cmd_evaluate(const EvaluateArgs& a)
{
    const DenseTensor x_hat = io::read_tensor(a.estimate);
    const DenseTensor x_ref = io::read_tensor(a.reference);
    const QualityReport q = evaluate(x_hat, x_ref, a.ratio, a.peak);
    std::cout << q.to_text();
    if (!a.csv.empty()) {
        const bool fresh = !fs::exists(a.csv) || fs::file_size(a.csv) == 0;
        std::ofstream out(a.csv, std::ios::app);
        if (!out) throw io::IoError("cannot append to " + a.csv);
        if (fresh) out << QualityReport::csv_header() << "\n";
        out << q.csv_row() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct SignatureArgs {
    std::string pixels, labels, ranks = "2,10,2";
    int iters = 200;
    int restarts = 3;
    std::uint64_t seed = 0;
};

int cmd_signatures(const SignatureArgs& a)
{
    const Matrix pixels = io::read_text_matrix(a.pixels);
    const std::vector<int> labels = read_labels(a.labels);
    SignatureOptions opts;
    opts.iterations = a.iters;
    opts.restarts = a.restarts;
    opts.seed = a.seed;
    const SignatureReport rep = signature_analysis(pixels, labels, parse_ranks(a.ranks), opts);
    std::cout << "cube " << to_string(rep.cube_shape) << ", spectral core " << to_string(rep.spectral_core)
              << ", relative fit " << rep.relative_fit << "\n";
    for (const auto& c : rep.classes) {
        std::cout << "class " << c.label << " (" << c.pixels << " pixels): principal angles";
        for (double d : c.angles_deg) std::cout << " " << d;
        std::cout << " deg\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_check(std::uint64_t seed, bool corrupt)
{
    SelfCheckOptions opts;
    opts.seed = seed;
    opts.corrupt_unfolding = corrupt;
    int failures = 0;
    for (const auto& r : run_self_check(opts)) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ", " << r.seconds << " s)\n";
        failures += r.passed ? 0 : 1;
    }
    std::cout << (failures ? std::to_string(failures) + " check(s) failed" : std::string("all checks passed")) << "\n";
    return failures ? kExitNumerical : 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Coupled tensor-ring fusion of hyperspectral and multispectral images"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Degrade an HR-HSI into an (HSI, MSI) pair");
    simulate->add_option("--input", sim.input, "HR-HSI tensor (.hten, or CSV with --input-shape)");
    simulate->add_option("--input-shape", sim.csv_shape, "Shape sidecar; reads --input as flat CSV");
    simulate->add_option("--from-manifest", sim.from_manifest, "Rerun the simulation recorded in a model.txt");
    simulate->add_option("--out", sim.out_dir, "Output directory (default $CTRF_OUTPUT_DIR or .)");
    simulate->add_option("--snr", sim.snr, "Noise level in dB, or inf")->capture_default_str();
    simulate->add_option("--factor", sim.factor, "Spatial downsampling factor")->capture_default_str();
    simulate->add_option("--kernel", sim.kernel, "Averaging kernel size")->capture_default_str();
    simulate->add_option("--ms-bands", sim.ms_bands, "Number of equal contiguous MSI band groups")->capture_default_str();
    simulate->add_option("--band-groups", sim.band_groups, "Explicit groups, e.g. 1-23;24-46;47-68;69-90");
    simulate->add_option("--spectral-response", sim.spectral_response, "Text b x B spectral response matrix");
    simulate->add_option("--seed", sim.seed, "Noise seed")->capture_default_str();
    simulate->add_option("--scale-max", sim.scale_max, "Rescale the HR-HSI to [0, scale-max]")->capture_default_str();

    FuseArgs fuse;
    auto* fuse_cmd = app.add_subcommand("fuse", "Estimate the HR-HSI from y, z and the degradation model");
    fuse_cmd->add_option("--y", fuse.y, "HSI tensor")->required();
    fuse_cmd->add_option("--z", fuse.z, "MSI tensor")->required();
    fuse_cmd->add_option("--model", fuse.model, "model.txt written by simulate")->required();
    fuse_cmd->add_option("--out", fuse.out_dir, "Output directory (default $CTRF_OUTPUT_DIR or .)");
    fuse_cmd->add_option("--mode", fuse.mode, "ctrf or nctrf")->capture_default_str();
    fuse_cmd->add_option("--ranks", fuse.ranks, "TR ranks R1,R2,R3");
    fuse_cmd->add_option("--preset", fuse.preset, "snr20, snr30 or snr40 rank preset");
    fuse_cmd->add_option("--iters", fuse.iters, "Outer iterations")->capture_default_str();
    fuse_cmd->add_option("--lambda", fuse.lambda, "Nuclear-norm weight")->capture_default_str();
    fuse_cmd->add_option("--rho", fuse.rho, "Penalty growth factor")->capture_default_str();
    fuse_cmd->add_option("--mu0", fuse.mu0, "Initial penalty")->capture_default_str();
    fuse_cmd->add_option("--mu-max", fuse.mu_max, "Penalty cap")->capture_default_str();
    fuse_cmd->add_option("--cg-tol", fuse.cg_tol, "CG relative residual tolerance")->capture_default_str();
    fuse_cmd->add_option("--cg-max-iter", fuse.cg_max_iter, "CG iteration cap")->capture_default_str();
    fuse_cmd->add_option("--seed", fuse.seed, "Core initialisation seed")->capture_default_str();
    fuse_cmd->add_flag("--verbose", fuse.verbose, "Print per-iteration progress to stderr");

    EvaluateArgs ev;
    auto* eval_cmd = app.add_subcommand("evaluate", "Quality indices of an estimate against a reference");
    eval_cmd->add_option("--estimate", ev.estimate, "Estimated HR-HSI")->required();
    eval_cmd->add_option("--reference", ev.reference, "Reference HR-HSI")->required();
    eval_cmd->add_option("--ratio", ev.ratio, "Spatial ratio for ERGAS")->capture_default_str();
    eval_cmd->add_option("--peak", ev.peak, "Peak value for PSNR and SSIM")->capture_default_str();
    eval_cmd->add_option("--csv", ev.csv, "Append a psnr,rmse,ergas,sam,ssim row to this file");

    SignatureArgs sig;
    auto* sig_cmd = app.add_subcommand("signatures", "Compare TR spectral-core signatures with per-class SVD");
    sig_cmd->add_option("--pixels", sig.pixels, "Text matrix, one pixel spectrum per row")->required();
    sig_cmd->add_option("--labels", sig.labels, "Integer class label per pixel")->required();
    sig_cmd->add_option("--ranks", sig.ranks, "TR ranks R1,R2,R3")->capture_default_str();
    sig_cmd->add_option("--iters", sig.iters, "ALS sweeps")->capture_default_str();
    sig_cmd->add_option("--restarts", sig.restarts, "Random restarts")->capture_default_str();
    sig_cmd->add_option("--seed", sig.seed, "Seed")->capture_default_str();

    std::uint64_t check_seed = 2024;
    bool corrupt = false;
    auto* check_cmd = app.add_subcommand("check", "Run the invariant self-test");
    check_cmd->add_option("--seed", check_seed, "Seed")->capture_default_str();
    check_cmd->add_flag("--corrupt-unfolding", corrupt, "Negative control: break the factorization check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*fuse_cmd) return cmd_fuse(fuse);
        if (*eval_cmd) return cmd_evaluate(ev);
        if (*sig_cmd) return cmd_signatures(sig);
        if (*check_cmd) return cmd_check(check_seed, corrupt);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
