#pragma once

#include "kaczmarz/gauge.hpp"
#include "kaczmarz/stat_rules.hpp"
#include "kaczmarz/tomo.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kaczmarz {

enum class Method { twin, msa, kaczmarz };

/// A reconstruction method; `rule` only matters for plain Kaczmarz.
struct MethodSpec {
    Method method = Method::twin;
    StopRule rule = StopRule::none;

    bool operator==(const MethodSpec&) const = default;
};

/// Accepts "twin", "msa", "ko" (Kaczmarz with the oracle), "kaczmarz" and
/// "kaczmarz+<rule>". Throws ConfigError otherwise.
MethodSpec parse_method(std::string_view name);
std::string method_name(const MethodSpec& m);

struct SolveParams {
    double omega = 1.0;
    std::size_t maxits = 300;
    double tol = 1e-4;
    std::size_t slack = 10;
    std::size_t patience = 0;       // oracle early exit, 0 = off
    std::uint64_t probe_seed = 0;   // trace-probe stream for statistical rules
    std::optional<double> sigma;    // overrides the problem's sigma for rules
};

struct MethodOutcome {
    MethodSpec method;
    Vector x;
    std::size_t k_stop = 0;
    std::size_t iterations = 0;
    double work_units = 0.0;
    double relative_error = 0.0;  // NaN without ground truth
    std::string stop_reason;
    std::variant<GaugeRunResult, RunResult> detail;
};

/// Runs one method on a problem. Ground truth in the problem, when present,
/// is used for the oracle and for error histories only.
MethodOutcome solve(const TomoProblem& problem, const MethodSpec& method, const SolveParams& params);

/// History CSV: "k,true_error,residual_norm,gauge,t_k,score,alpha,beta".
void write_outcome_history_csv(std::ostream& os, const MethodOutcome& outcome);

/// JSON summary of one outcome. Deterministic: no timing fields.
std::string outcome_summary_json(const MethodOutcome& outcome, const TomoProblem& problem);

struct BenchSpec {
    std::vector<PhantomKind> kinds{PhantomKind::grains};
    std::size_t image_size = 128;
    std::string angles = "0:1.5:178.5";
    std::size_t n_rays = 181;
    double eta = 8e-3;
    double omega = 1.0;
    std::size_t runs = 1;
    std::uint64_t seed0 = 0;
    std::vector<MethodSpec> methods{{Method::twin}, {Method::msa}, {Method::kaczmarz, StopRule::oracle}};
    std::size_t maxits = 300;
    double tol = 1e-4;
    std::size_t slack = 10;
    std::size_t ko_patience = 50;
    std::size_t jobs = 0;  // 0 = hardware concurrency

    void validate() const;
    Geometry geometry() const;
};

/// Seeds for one run. run_seed = seed0 + run index; the phantom, noise and
/// trace-probe streams are derived from it with fixed tags.
struct RunSeeds {
    std::uint64_t run_seed;
    std::uint64_t phantom;
    std::uint64_t noise;
    std::uint64_t probe;

    static RunSeeds for_run(std::uint64_t seed0, std::size_t run_index);
};

struct BenchRecord {
    PhantomKind kind = PhantomKind::grains;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    MethodSpec method;
    bool ok = true;
    std::string error;
    double relative_error = 0.0;
    double work_units = 0.0;
    std::size_t k_stop = 0;
    double score = 0.0;
};

struct ScoreRow {
    PhantomKind kind = PhantomKind::grains;
    MethodSpec method;
    double mean_error = 0.0;
    double mean_work = 0.0;
    double score = 0.0;
    std::size_t completed = 0;
    std::size_t failed = 0;
};

struct ScoreTable {
    std::vector<ScoreRow> rows;

    const ScoreRow& at(PhantomKind kind, const MethodSpec& method) const;
};

/// Points for one run: 1 to the smallest error, 0.5 to the second, 0 to the
/// rest. Tied methods share the points of the places they occupy.
std::vector<double> score_run(std::span<const double> errors);

struct BenchResult {
    std::vector<BenchRecord> records;  // sorted by (kind, run, method)
    ScoreTable table;
    std::size_t failed_runs = 0;
};

/// Runs every phantom x run x method combination on a worker pool. Results do
/// not depend on the number of workers.
BenchResult run_bench(const BenchSpec& spec);

/// Aggregates records into per-(kind, method) means and score sums. A run
/// with any failed method is excluded from means and scores.
ScoreTable aggregate(const BenchSpec& spec, std::vector<BenchRecord>& records);

void write_score_table_csv(std::ostream& os, const ScoreTable& table);
void write_records_jsonl(std::ostream& os, const std::vector<BenchRecord>& records);

struct SpectralSuiteSpec {
    std::size_t rows = 12;
    std::size_t cols = 8;
    std::vector<double> omegas{0.25, 1.0, 1.75};
    std::size_t trials = 5;
    std::uint64_t seed = 0;
    std::size_t poly_k = 20;
};

struct SpectralTrial {
    std::string label;
    std::size_t rows = 0;
    std::size_t cols = 0;
    double omega = 1.0;
    double transpose_deviation = 0.0;
    double rho = 0.0;
    std::optional<double> kappa_1;
    double dev_q = 0.0;
    double dev_p = 0.0;
    bool pass = true;
};

struct SpectralSuiteResult {
    std::vector<SpectralTrial> trials;
    bool pass = true;
};

/// Transpose identity, spectral radius and iteration-polynomial checks on
/// random dense-checkable matrices (plus A = I when trials > 0).
SpectralSuiteResult run_spectral_suite(const SpectralSuiteSpec& spec);
std::string spectral_suite_json(const SpectralSuiteResult& result);

/// Random m x n matrix with i.i.d. standard normal entries.
SparseMatrix random_dense_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

} // namespace kaczmarz
