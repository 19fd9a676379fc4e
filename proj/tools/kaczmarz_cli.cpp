// Command-line front end: phantom, matrix, run, bench and spectral subcommands.

#include "kaczmarz/bench.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/io.hpp"
#include "kaczmarz/rng.hpp"
#include "kaczmarz/tomo.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace fs = std::filesystem;
using namespace kaczmarz;

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

struct ProblemFlags {
    std::string kind = "grains";
    std::size_t size = 128;
    std::string angles = "0:1.5:178.5";
    std::size_t rays = 0;  // 0 = round(sqrt(2) * size)
    double eta = 8e-3;
    std::uint64_t seed = 0;

    Geometry geometry() const {
        Geometry g;
        g.image_size = size;
        g.angles_deg = parse_angles(angles);
        g.n_rays = rays != 0 ? rays : static_cast<std::size_t>(std::lround(std::numbers::sqrt2 * static_cast<double>(size)));
        return g;
    }
};

void add_geometry_flags(CLI::App* cmd, ProblemFlags& f) {
    cmd->add_option("--size", f.size, "Image size N (pixels per side)");
    cmd->add_option("--angles", f.angles, "Projection angles start:step:stop in degrees, inclusive");
    cmd->add_option("--rays", f.rays, "Rays per projection (default round(sqrt(2) N))");
}

std::ofstream open_or_throw(const fs::path& p, bool binary = false) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
    if (!os) throw IoError("cannot open for writing: " + p.string());
    return os;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kaczmarz tomography toolkit: twin-gauge and mutual-step reconstruction"};
    app.require_subcommand(1);

    // phantom
    ProblemFlags ph;
    std::string phantom_out = "phantom.pgm";
    bool phantom_ascii = false;
    auto* cmd_phantom = app.add_subcommand("phantom", "Write a phantom image as PGM");
    cmd_phantom->add_option("--kind", ph.kind, "Phantom kind");
    cmd_phantom->add_option("--size", ph.size, "Image size N");
    cmd_phantom->add_option("--seed", ph.seed, "Seed for randomized kinds");
    cmd_phantom->add_option("--out", phantom_out, "Output PGM path");
    cmd_phantom->add_flag("--ascii", phantom_ascii, "Write P2 instead of P5");

    // matrix
    ProblemFlags mx;
    std::string matrix_out = "matrix.mtx";
    auto* cmd_matrix = app.add_subcommand("matrix", "Write the system matrix in Matrix Market format");
    add_geometry_flags(cmd_matrix, mx);
    cmd_matrix->add_option("--out", matrix_out, "Output .mtx path");

    // run
    ProblemFlags rn;
    std::string run_method = "msa";
    std::string run_rule;
    double run_omega = 1.0;
    std::size_t run_maxits = 300;
    double run_tol = 1e-4;
    std::size_t run_slack = 10;
    std::optional<double> run_sigma;
    std::string run_out = "run";
    bool run_timing = false;
    bool run_raw = false;
    auto* cmd_run = app.add_subcommand("run", "Reconstruct one noisy phantom and export results");
    cmd_run->add_option("--kind", rn.kind, "Phantom kind");
    add_geometry_flags(cmd_run, rn);
    cmd_run->add_option("--eta", rn.eta, "Relative noise level");
    cmd_run->add_option("--seed", rn.seed, "Run seed (phantom, noise and probe streams derive from it)");
    cmd_run->add_option("--method", run_method, "twin | msa | kaczmarz | ko");
    cmd_run->add_option("--rule", run_rule, "Stopping rule for kaczmarz: none | oracle | upre | gcv | cdp");
    cmd_run->add_option("--omega", run_omega, "Relaxation parameter in (0,2)");
    cmd_run->add_option("--maxits", run_maxits, "Iteration cap");
    cmd_run->add_option("--tol", run_tol, "Mutual-step tolerance on |alpha|+|beta|");
    cmd_run->add_option("--slack", run_slack, "Twin slack in sweeps");
    cmd_run->add_option("--sigma", run_sigma, "Noise std for upre/cdp (default: the generated sigma)");
    cmd_run->add_option("--out", run_out, "Output prefix: writes <out>.json, <out>.csv, <out>.pgm, <out>.sino.csv");
    cmd_run->add_flag("--timing", run_timing, "Add wall_time_s to the JSON summary (breaks bit-reproducibility)");
    cmd_run->add_flag("--raw-sinogram", run_raw, "Write the sinogram as raw little-endian doubles (<out>.sino)");

    // bench
    ProblemFlags bn;
    bn.kind = "all";
    BenchSpec bench;
    std::string bench_methods = "twin,msa,ko";
    std::string bench_out = "bench";
    auto* cmd_bench = app.add_subcommand("bench", "Score table over phantoms, runs and methods");
    cmd_bench->add_option("--kind", bn.kind, "Comma-separated phantom kinds or 'all'");
    add_geometry_flags(cmd_bench, bn);
    cmd_bench->add_option("--eta", bench.eta, "Relative noise level");
    cmd_bench->add_option("--omega", bench.omega, "Relaxation parameter");
    cmd_bench->add_option("--runs", bench.runs, "Runs per phantom");
    cmd_bench->add_option("--seed", bench.seed0, "Base seed; run i uses seed + i");
    cmd_bench->add_option("--method", bench_methods, "Comma-separated methods");
    cmd_bench->add_option("--maxits", bench.maxits, "Iteration cap");
    cmd_bench->add_option("--tol", bench.tol, "Mutual-step tolerance");
    cmd_bench->add_option("--slack", bench.slack, "Twin slack");
    cmd_bench->add_option("--patience", bench.ko_patience, "Oracle early exit after this many non-improving sweeps");
    cmd_bench->add_option("--jobs", bench.jobs, "Worker threads (0 = all cores)");
    cmd_bench->add_option("--out", bench_out, "Output directory: scores.csv and runs.jsonl");

    // spectral
    SpectralSuiteSpec spectral;
    std::string spectral_size = "12x8";
    std::string spectral_omegas = "0.25,1.0,1.75";
    std::string spectral_out;
    auto* cmd_spectral = app.add_subcommand("spectral", "Dense checks of the sweep operator on random matrices");
    cmd_spectral->add_option("--size", spectral_size, "Matrix size MxN (M >= N)");
    cmd_spectral->add_option("--omega", spectral_omegas, "Comma-separated relaxation parameters");
    cmd_spectral->add_option("--trials", spectral.trials, "Random matrices");
    cmd_spectral->add_option("--seed", spectral.seed, "Seed");
    cmd_spectral->add_option("--out", spectral_out, "JSON report path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_phantom->parsed()) {
            const Phantom p = make_phantom(phantom_kind_from_string(ph.kind), ph.size, ph.seed);
            auto os = open_or_throw(phantom_out, true);
            write_pgm(os, p.pixels, p.size, phantom_ascii ? PgmFormat::ascii : PgmFormat::binary);
        } else if (cmd_matrix->parsed()) {
            const SparseMatrix A = build_matrix(mx.geometry());
            auto os = open_or_throw(matrix_out);
            write_matrix_market(os, A);
        } else if (cmd_run->parsed()) {
            MethodSpec method = parse_method(run_method);
            if (!run_rule.empty()) {
                if (method.method != Method::kaczmarz) throw ConfigError("--rule only applies to --method kaczmarz");
                method.rule = stop_rule_from_string(run_rule);
            }
            const auto t0 = std::chrono::steady_clock::now();
            const RunSeeds seeds = RunSeeds::for_run(rn.seed, 0);
            Phantom p = make_phantom(phantom_kind_from_string(rn.kind), rn.size, seeds.phantom);
            const TomoProblem problem = make_problem(build_matrix(rn.geometry()), std::move(p.pixels), rn.eta, seeds.noise);
            SolveParams params;
            params.omega = run_omega;
            params.maxits = run_maxits;
            params.tol = run_tol;
            params.slack = run_slack;
            params.probe_seed = seeds.probe;
            params.sigma = run_sigma;
            const MethodOutcome outcome = solve(problem, method, params);
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

            std::string summary = outcome_summary_json(outcome, problem);
            if (run_timing) {
                auto j = nlohmann::json::parse(summary);
                j["wall_time_s"] = wall;
                summary = j.dump(2);
            }
            {
                auto os = open_or_throw(run_out + ".json");
                os << summary << '\n';
            }
            {
                auto os = open_or_throw(run_out + ".csv");
                write_outcome_history_csv(os, outcome);
            }
            write_pgm(fs::path(run_out + ".pgm"), outcome.x, rn.size);
            if (run_raw) {
                auto os = open_or_throw(run_out + ".sino", true);
                write_vector_raw(os, problem.b);
            } else {
                auto os = open_or_throw(run_out + ".sino.csv");
                write_vector_csv(os, problem.b);
            }
            std::cout << summary << '\n';
        } else if (cmd_bench->parsed()) {
            bench.kinds.clear();
            if (bn.kind == "all") {
                bench.kinds = all_phantom_kinds();
            } else {
                for (const auto& k : split_list(bn.kind)) bench.kinds.push_back(phantom_kind_from_string(k));
            }
            bench.methods.clear();
            for (const auto& m : split_list(bench_methods)) bench.methods.push_back(parse_method(m));
            bench.image_size = bn.size;
            bench.angles = bn.angles;
            bench.n_rays = bn.geometry().n_rays;
            const BenchResult result = run_bench(bench);
            fs::create_directories(bench_out);
            {
                auto os = open_or_throw(fs::path(bench_out) / "scores.csv");
                write_score_table_csv(os, result.table);
            }
            {
                auto os = open_or_throw(fs::path(bench_out) / "runs.jsonl");
                write_records_jsonl(os, result.records);
            }
            write_score_table_csv(std::cout, result.table);
            if (result.failed_runs > 0) std::cerr << result.failed_runs << " run(s) failed and were excluded\n";
        } else if (cmd_spectral->parsed()) {
            const auto x = spectral_size.find('x');
            if (x == std::string::npos) throw ConfigError("--size must look like MxN");
            try {
                spectral.rows = std::stoul(spectral_size.substr(0, x));
                spectral.cols = std::stoul(spectral_size.substr(x + 1));
            } catch (const std::exception&) {
                throw ConfigError("--size must look like MxN");
            }
            spectral.omegas.clear();
            for (const auto& w : split_list(spectral_omegas)) {
                try {
                    spectral.omegas.push_back(std::stod(w));
                } catch (const std::exception&) {
                    throw ConfigError("bad omega value: " + w);
                }
            }
            const SpectralSuiteResult result = run_spectral_suite(spectral);
            const std::string json = spectral_suite_json(result);
            if (spectral_out.empty()) {
                std::cout << json << '\n';
            } else {
                auto os = open_or_throw(spectral_out);
                os << json << '\n';
            }
            if (!result.pass) {
                std::cerr << "spectral checks failed\n";
                return kNumerical;
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const IndexError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ShapeError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const TooLargeError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
