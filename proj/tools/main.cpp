// attractor — compute, verify, simulate, and render global attractors of
// linear maps with additive bounded spherical noise.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "attractor/boundary.hpp"
#include "attractor/errors.hpp"
#include "attractor/io.hpp"
#include "attractor/oracle.hpp"
#include "attractor/setmap.hpp"
#include "attractor/verify.hpp"

namespace {

using attractor::convexgeom::BoundaryAtlas;
using attractor::linalg::Grid;
using attractor::linalg::GridPtr;
using attractor::linalg::Matrix;
using nlohmann::json;

// Exit codes are a stable contract:
//   0 success, 1 failed verification / incomplete containment,
//   2 spectral gate or singular matrix (no certified attractor),
//   3 I/O failure, 4 parse or usage failure, 5 trajectory divergence.
constexpr int kExitVerifyFailed = 1;
constexpr int kExitGate = 2;
constexpr int kExitIo = 3;
constexpr int kExitParse = 4;
constexpr int kExitDivergence = 5;

struct RunConfig {
    std::optional<Matrix> matrix;
    std::optional<double> epsilon;
    int directions = 0; // 0 = pick by dimension (720 for m=2, 2000 otherwise)
    double tolerance = 1e-10;
    std::uint64_t seed = 42;
    long samples = 100000;
    std::string out;
    std::string format = "csv";
    std::string in;
    std::optional<int> probe;
};

struct RawFlags {
    std::string config_path;
    std::string matrix_inline;
    std::optional<double> epsilon;
    std::optional<int> directions;
    std::optional<double> tolerance;
    std::optional<std::uint64_t> seed;
    std::optional<long> samples;
    std::string out;
    std::string format;
    std::string in;
    std::optional<int> probe;
};

void add_common_options(CLI::App* cmd, RawFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file (flags override it)");
    cmd->add_option("--matrix", f.matrix_inline, "matrix as nested JSON rows, e.g. [[0.5,0],[0,0.5]]");
    cmd->add_option("--epsilon", f.epsilon, "noise-ball radius (> 0)");
    cmd->add_option("--directions", f.directions, "number of grid directions");
    cmd->add_option("--tol", f.tolerance, "certified truncation tolerance");
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--samples", f.samples, "trajectory samples to record");
    cmd->add_option("--out", f.out, "output path");
    cmd->add_option("--format", f.format, "output format: csv, json, or svg")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    cmd->add_option("--in", f.in, "input atlas (csv or json)");
}

RunConfig build_config(const RawFlags& f) {
    RunConfig cfg;
    if (!f.config_path.empty()) {
        json j;
        try {
            std::ifstream file(f.config_path);
            if (!file) throw attractor::io_error("cannot open config " + f.config_path);
            j = json::parse(file);
        } catch (const json::exception& e) {
            throw attractor::parse_error(f.config_path + ": " + e.what());
        }
        if (!j.is_object()) throw attractor::parse_error(f.config_path + ": expected a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (key == "matrix")
                cfg.matrix = attractor::io::matrix_from_json(value);
            else if (key == "epsilon")
                cfg.epsilon = value.get<double>();
            else if (key == "directions")
                cfg.directions = value.get<int>();
            else if (key == "tolerance")
                cfg.tolerance = value.get<double>();
            else if (key == "seed")
                cfg.seed = value.get<std::uint64_t>();
            else if (key == "samples")
                cfg.samples = value.get<long>();
            else if (key == "out")
                cfg.out = value.get<std::string>();
            else if (key == "format")
                cfg.format = value.get<std::string>();
            else
                throw attractor::parse_error(f.config_path + ": unknown key '" + key + "'");
        }
    }
    if (!f.matrix_inline.empty()) {
        try {
            cfg.matrix = attractor::io::matrix_from_json(json::parse(f.matrix_inline));
        } catch (const json::exception& e) {
            throw attractor::parse_error(std::string("--matrix: ") + e.what());
        }
    }
    if (f.epsilon) cfg.epsilon = *f.epsilon;
    if (f.directions) cfg.directions = *f.directions;
    if (f.tolerance) cfg.tolerance = *f.tolerance;
    if (f.seed) cfg.seed = *f.seed;
    if (f.samples) cfg.samples = *f.samples;
    if (!f.out.empty()) cfg.out = f.out;
    if (!f.format.empty()) cfg.format = f.format;
    cfg.in = f.in;
    cfg.probe = f.probe;

    if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "svg")
        throw attractor::parse_error("format must be csv, json, or svg");
    if (cfg.epsilon && !(*cfg.epsilon > 0.0))
        throw attractor::parse_error("epsilon must be > 0");
    if (!(cfg.tolerance > 0.0)) throw attractor::parse_error("tolerance must be > 0");
    if (cfg.samples < 1) throw attractor::parse_error("samples must be >= 1");
    return cfg;
}

const Matrix& require_matrix(const RunConfig& cfg) {
    if (!cfg.matrix) throw attractor::parse_error("a matrix is required (--matrix or config file)");
    return *cfg.matrix;
}

double require_epsilon(const RunConfig& cfg) {
    if (!cfg.epsilon) throw attractor::parse_error("epsilon is required (--epsilon or config file)");
    return *cfg.epsilon;
}

int grid_size(const RunConfig& cfg, int dim) {
    if (cfg.directions > 0) return cfg.directions;
    return dim == 2 ? 720 : 2000;
}

GridPtr make_grid(const RunConfig& cfg, int dim) {
    return std::make_shared<const Grid>(
        attractor::linalg::sphere_grid(dim, grid_size(cfg, dim), cfg.seed));
}

void print_checks(const attractor::verify::VerifyReport& report) {
    for (const auto& c : report.checks) {
        std::printf("[%s] %-22s measured %.6e  (threshold %.6e)\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.measured, c.threshold);
    }
    std::printf("note: constant support (ball): %s\n", report.constant_support ? "yes" : "no");
    if (report.ellipse_residual)
        std::printf("note: ellipse fit residual: %.6e\n", *report.ellipse_residual);
}

int cmd_compute(const RunConfig& cfg) {
    const Matrix& m = require_matrix(cfg);
    const double epsilon = require_epsilon(cfg);
    const BoundaryAtlas atlas =
        attractor::boundary::build_atlas(m, epsilon, make_grid(cfg, m.dim()), cfg.tolerance);

    std::string out = cfg.out.empty() ? ("atlas." + cfg.format) : cfg.out;
    if (cfg.format == "csv")
        attractor::io::write_atlas_csv(atlas, out);
    else if (cfg.format == "json")
        attractor::io::write_atlas_json(atlas, out);
    else
        attractor::io::write_atlas_svg(atlas, out);

    std::printf("atlas: %zu directions, truncation order %d, tail bound %.3e -> %s\n",
                atlas.records.size(), atlas.truncation_order, atlas.tail_bound, out.c_str());
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    BoundaryAtlas atlas = [&]() -> BoundaryAtlas {
        if (!cfg.in.empty()) {
            const Matrix* m = cfg.matrix ? &*cfg.matrix : nullptr;
            return attractor::io::read_atlas(cfg.in, m, cfg.epsilon.value_or(0.0), cfg.tolerance);
        }
        const Matrix& m = require_matrix(cfg);
        return attractor::boundary::build_atlas(m, require_epsilon(cfg), make_grid(cfg, m.dim()),
                                                cfg.tolerance);
    }();

    const attractor::verify::VerifyReport report = attractor::verify::verify_atlas(atlas);
    print_checks(report);
    const std::string out = cfg.out.empty() ? "verify.json" : cfg.out;
    attractor::io::write_verify_report_json(report, out);
    std::printf("report -> %s\n", out.c_str());
    return report.all_pass() ? 0 : kExitVerifyFailed;
}

int cmd_simulate(const RunConfig& cfg) {
    const Matrix& m = require_matrix(cfg);
    const double epsilon = require_epsilon(cfg);

    if (cfg.probe) {
        // Divergence demonstration: no gate; report the probe value over the grid.
        const int steps = *cfg.probe;
        if (steps < 1) throw attractor::parse_error("--probe steps must be >= 1");
        const GridPtr grid = make_grid(cfg, m.dim());
        double probe_value = 0.0;
        for (const auto& n : *grid)
            probe_value = std::max(
                probe_value, attractor::setmap::divergence_probe(m, epsilon, n, steps));
        const double rho = attractor::linalg::spectral_report(m).spectral_radius;
        const std::string out = cfg.out.empty() ? "probe.json" : cfg.out;
        attractor::io::write_probe_report_json(steps, epsilon, rho, probe_value, out);
        std::printf("probe: %d steps, spectral radius %.6f, value %.12g -> %s\n", steps, rho,
                    probe_value, out.c_str());
        return 0;
    }

    const GridPtr grid = make_grid(cfg, m.dim());
    const BoundaryAtlas atlas = attractor::boundary::build_atlas(m, epsilon, grid, cfg.tolerance);

    attractor::oracle::SimConfig sim_cfg{
        m, epsilon, std::vector<double>(static_cast<std::size_t>(m.dim()), 0.0),
        std::nullopt, cfg.samples, cfg.seed};
    const attractor::oracle::PointCloud cloud = attractor::oracle::simulate(sim_cfg);
    const attractor::oracle::CloudReport report =
        attractor::oracle::cloud_vs_atlas(cloud, atlas, cfg.tolerance);

    const std::string cloud_out = cfg.out.empty() ? "cloud.csv" : cfg.out;
    std::string report_out = std::filesystem::path(cloud_out).replace_extension().string() +
                             ".report.json";
    attractor::io::write_cloud_csv(cloud, cloud_out);
    attractor::io::write_cloud_report_json(report, cfg.samples, cfg.seed, cfg.tolerance,
                                           report_out);
    std::printf("cloud: %zu points -> %s\n", cloud.size(), cloud_out.c_str());
    std::printf("containment %.6f, max violation %.3e, inner hausdorff %.3e -> %s\n",
                report.containment_fraction, report.max_violation, report.inner_hausdorff,
                report_out.c_str());
    return report.containment_fraction == 1.0 ? 0 : kExitVerifyFailed;
}

int cmd_render(const RunConfig& cfg) {
    if (cfg.in.empty()) throw attractor::parse_error("render needs --in <atlas.csv|atlas.json>");
    const auto ext = std::filesystem::path(cfg.in).extension().string();
    BoundaryAtlas atlas = [&]() -> BoundaryAtlas {
        if (ext == ".json") return attractor::io::read_atlas_json(cfg.in);
        if (ext == ".csv") {
            // Rendering uses the records only; stub out the rest.
            auto [dim, records] = attractor::io::read_atlas_records_csv(cfg.in);
            return BoundaryAtlas{std::move(records), Matrix::identity(dim), 1.0, 0, 0.0};
        }
        throw attractor::parse_error(cfg.in + ": unknown atlas extension '" + ext + "'");
    }();

    std::string out = cfg.out;
    if (out.empty())
        out = std::filesystem::path(cfg.in).replace_extension(".svg").string();
    attractor::io::write_atlas_svg(atlas, out);
    std::printf("svg: %zu vertices -> %s\n", atlas.records.size(), out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"global attractors of linear maps with bounded spherical noise"};
    app.require_subcommand(1);

    RawFlags flags;
    CLI::App* compute = app.add_subcommand("compute", "compute the attractor boundary atlas");
    CLI::App* verify = app.add_subcommand("verify", "run the invariant suite on an atlas");
    CLI::App* simulate = app.add_subcommand("simulate", "sample trajectories and compare to the atlas");
    CLI::App* render = app.add_subcommand("render", "convert a stored atlas to svg");
    for (CLI::App* cmd : {compute, verify, simulate, render}) add_common_options(cmd, flags);
    int probe_steps = 0;
    simulate->add_option("--probe", probe_steps,
                         "report the growth probe after this many steps instead of simulating");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitParse;
    }

    try {
        if (simulate->count("--probe") > 0) flags.probe = probe_steps;
        const RunConfig cfg = build_config(flags);
        if (compute->parsed()) return cmd_compute(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (simulate->parsed()) return cmd_simulate(cfg);
        return cmd_render(cfg);
    } catch (const attractor::eigenvalue_gate_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitGate;
    } catch (const attractor::singular_matrix_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitGate;
    } catch (const attractor::non_convergence_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitGate;
    } catch (const attractor::divergence_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDivergence;
    } catch (const attractor::io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const attractor::parse_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitParse;
    } catch (const attractor::input_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitParse;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitParse;
    }
}
