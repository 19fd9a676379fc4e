#include "kaczmarz/bench.hpp"

#include "kaczmarz/errors.hpp"
#include "kaczmarz/rng.hpp"
#include "kaczmarz/spectral_lab.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace kaczmarz {

namespace {

constexpr std::uint64_t kPhantomTag = 1;
constexpr std::uint64_t kNoiseTag = 2;
constexpr std::uint64_t kProbeTag = 3;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

} // namespace

MethodSpec parse_method(std::string_view name) {
    if (name == "twin") return {Method::twin, StopRule::none};
    if (name == "msa") return {Method::msa, StopRule::none};
    if (name == "ko") return {Method::kaczmarz, StopRule::oracle};
    if (name == "kaczmarz") return {Method::kaczmarz, StopRule::none};
    constexpr std::string_view prefix = "kaczmarz+";
    if (name.substr(0, prefix.size()) == prefix) return {Method::kaczmarz, stop_rule_from_string(name.substr(prefix.size()))};
    throw ConfigError("unknown method: " + std::string(name));
}

std::string method_name(const MethodSpec& m) {
    switch (m.method) {
    case Method::twin: return "twin";
    case Method::msa: return "msa";
    case Method::kaczmarz:
        if (m.rule == StopRule::oracle) return "ko";
        if (m.rule == StopRule::none) return "kaczmarz";
        return "kaczmarz+" + std::string(to_string(m.rule));
    }
    return "unknown";
}

MethodOutcome solve(const TomoProblem& problem, const MethodSpec& method, const SolveParams& params) {
    const auto& A = problem.A;
    const std::span<const double> truth = problem.x_star;
    MethodOutcome out;
    out.method = method;
    switch (method.method) {
    case Method::twin: {
        TwinConfig cfg{params.omega, params.maxits, params.slack};
        auto r = twin_algorithm(A, problem.b, cfg, truth);
        out.x = r.x_out;
        out.k_stop = r.k_stop;
        out.iterations = r.iterations;
        out.work_units = r.work_units;
        out.stop_reason = to_string(r.reason);
        out.detail = std::move(r);
        break;
    }
    case Method::msa: {
        MutualStepConfig cfg{params.omega, params.maxits, params.tol};
        auto r = mutual_step(A, problem.b, cfg, truth);
        out.x = r.x_out;
        out.k_stop = r.k_stop;
        out.iterations = r.iterations;
        out.work_units = r.work_units;
        out.stop_reason = to_string(r.reason);
        out.detail = std::move(r);
        break;
    }
    case Method::kaczmarz: {
        RuleOptions opts;
        opts.omega = params.omega;
        opts.rule = method.rule;
        opts.maxits = params.maxits;
        opts.sigma = params.sigma ? params.sigma : std::optional<double>(problem.sigma);
        opts.x_star = truth;
        opts.probe_seed = params.probe_seed;
        opts.patience = params.patience;
        opts.track_residual = method.rule != StopRule::oracle;
        auto r = run_with_rule(A, problem.b, opts);
        out.x = r.x;
        out.k_stop = r.stopped_at;
        out.iterations = r.iterations;
        out.work_units = r.work_units;
        if (method.rule == StopRule::cdp)
            out.stop_reason = r.triggered ? "discrepancy" : "maxits";
        else if (method.rule == StopRule::none)
            out.stop_reason = "maxits";
        else
            out.stop_reason = "argmin";
        out.detail = std::move(r);
        break;
    }
    }
    out.relative_error = truth.empty() ? nan() : relative_error(out.x, truth);
    return out;
}

void write_outcome_history_csv(std::ostream& os, const MethodOutcome& outcome) {
    os << "k,true_error,residual_norm,gauge,t_k,score,alpha,beta\n";
    const auto old_precision = os.precision(17);
    const auto cell = [&os](const std::vector<double>& v, std::size_t i) {
        if (i < v.size()) os << v[i];
    };
    if (const auto* g = std::get_if<GaugeRunResult>(&outcome.detail)) {
        // Mutual-step histories start with the initial pair at k = 0.
        const bool msa = outcome.method.method == Method::msa;
        for (std::size_t i = 0; i < g->gauge_history.size(); ++i) {
            os << (msa ? i : i + 1) << ',';
            cell(g->true_error, i);
            os << ",,";
            cell(g->gauge_history, i);
            os << ",,,";
            // Step i (0-based) produced pair i + 1.
            if (msa && i > 0 && i - 1 < g->step_history.size())
                os << g->step_history[i - 1].alpha << ',' << g->step_history[i - 1].beta;
            else
                os << ',';
            os << '\n';
        }
    } else {
        const auto& r = std::get<RunResult>(outcome.detail);
        for (std::size_t i = 0; i < r.iterations; ++i) {
            os << (i + 1) << ',';
            cell(r.history.true_error, i);
            os << ',';
            cell(r.history.residual_norm, i);
            os << ",,";
            cell(r.trace, i);
            os << ',';
            cell(r.score, i);
            os << ",,\n";
        }
    }
    os.precision(old_precision);
}

std::string outcome_summary_json(const MethodOutcome& outcome, const TomoProblem& problem) {
    nlohmann::json j;
    j["method"] = method_name(outcome.method);
    j["k_stop"] = outcome.k_stop;
    j["iterations"] = outcome.iterations;
    j["stop_reason"] = outcome.stop_reason;
    j["work_units"] = outcome.work_units;
    j["relative_error"] = number_or_null(outcome.relative_error);
    j["m"] = problem.A.rows();
    j["n"] = problem.A.cols();
    j["nnz"] = problem.A.nnz();
    j["eta"] = problem.eta;
    j["sigma"] = problem.sigma;
    if (const auto* r = std::get_if<RunResult>(&outcome.detail)) {
        j["triggered"] = r->triggered;
        if (outcome.method.rule == StopRule::cdp) j["negative_rhs_iterations"] = r->negative_rhs;
    }
    return j.dump(2);
}

void BenchSpec::validate() const {
    if (kinds.empty()) throw ConfigError("bench needs at least one phantom kind");
    if (runs < 1) throw ConfigError("bench needs at least one run");
    if (methods.empty()) throw ConfigError("bench needs at least one method");
    check_relaxation(omega);
    if (!(eta >= 0.0)) throw ConfigError("eta must be non-negative");
    geometry().validate();
}

Geometry BenchSpec::geometry() const {
    Geometry g;
    g.image_size = image_size;
    g.angles_deg = parse_angles(angles);
    g.n_rays = n_rays;
    return g;
}

RunSeeds RunSeeds::for_run(std::uint64_t seed0, std::size_t run_index) {
    const std::uint64_t s = seed0 + run_index;
    return {s, derive_seed(s, kPhantomTag), derive_seed(s, kNoiseTag), derive_seed(s, kProbeTag)};
}

const ScoreRow& ScoreTable::at(PhantomKind kind, const MethodSpec& method) const {
    for (const auto& r : rows) {
        if (r.kind == kind && r.method == method) return r;
    }
    throw ConfigError("no score row for " + std::string(to_string(kind)) + " / " + method_name(method));
}

std::vector<double> score_run(std::span<const double> errors) {
    const std::size_t k = errors.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return errors[a] < errors[b]; });
    const auto place_points = [](std::size_t place) { return place == 0 ? 1.0 : place == 1 ? 0.5 : 0.0; };
    std::vector<double> scores(k, 0.0);
    std::size_t i = 0;
    while (i < k) {
        std::size_t j = i;
        while (j + 1 < k && errors[order[j + 1]] == errors[order[i]]) ++j;
        double pts = 0.0;
        for (std::size_t p = i; p <= j; ++p) pts += place_points(p);
        for (std::size_t p = i; p <= j; ++p) scores[order[p]] = pts / static_cast<double>(j - i + 1);
        i = j + 1;
    }
    return scores;
}

ScoreTable aggregate(const BenchSpec& spec, std::vector<BenchRecord>& records) {
    const std::size_t n_methods = spec.methods.size();
    ScoreTable table;
    for (auto kind : spec.kinds) {
        for (const auto& m : spec.methods) table.rows.push_back({kind, m});
    }
    // records are grouped by (kind, run) in method order
    for (std::size_t start = 0; start + n_methods <= records.size(); start += n_methods) {
        const std::span<BenchRecord> group(records.data() + start, n_methods);
        const bool ok = std::all_of(group.begin(), group.end(), [](const BenchRecord& r) { return r.ok; });
        const std::size_t kind_index = static_cast<std::size_t>(
            std::find(spec.kinds.begin(), spec.kinds.end(), group[0].kind) - spec.kinds.begin());
        auto* rows = &table.rows[kind_index * n_methods];
        if (!ok) {
            for (std::size_t i = 0; i < n_methods; ++i) ++rows[i].failed;
            continue;
        }
        std::vector<double> errors(n_methods);
        for (std::size_t i = 0; i < n_methods; ++i) errors[i] = group[i].relative_error;
        const auto pts = score_run(errors);
        for (std::size_t i = 0; i < n_methods; ++i) {
            group[i].score = pts[i];
            rows[i].score += pts[i];
            rows[i].mean_error += group[i].relative_error;
            rows[i].mean_work += group[i].work_units;
            ++rows[i].completed;
        }
    }
    for (auto& r : table.rows) {
        if (r.completed > 0) {
            r.mean_error /= static_cast<double>(r.completed);
            r.mean_work /= static_cast<double>(r.completed);
        } else {
            r.mean_error = nan();
            r.mean_work = nan();
        }
    }
    return table;
}

BenchResult run_bench(const BenchSpec& spec) {
    spec.validate();
    const SparseMatrix A = build_matrix(spec.geometry());
    const std::size_t n_methods = spec.methods.size();
    const std::size_t n_tasks = spec.kinds.size() * spec.runs;
    std::vector<BenchRecord> records(n_tasks * n_methods);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t task = next++; task < n_tasks; task = next++) {
            const PhantomKind kind = spec.kinds[task / spec.runs];
            const std::size_t run = task % spec.runs;
            const RunSeeds seeds = RunSeeds::for_run(spec.seed0, run);
            BenchRecord base;
            base.kind = kind;
            base.run = run;
            base.seed = seeds.run_seed;
            try {
                Phantom ph = make_phantom(kind, spec.image_size, seeds.phantom);
                const TomoProblem problem = make_problem(A, std::move(ph.pixels), spec.eta, seeds.noise);
                SolveParams params;
                params.omega = spec.omega;
                params.maxits = spec.maxits;
                params.tol = spec.tol;
                params.slack = spec.slack;
                params.patience = spec.ko_patience;
                params.probe_seed = seeds.probe;
                for (std::size_t i = 0; i < n_methods; ++i) {
                    BenchRecord rec = base;
                    rec.method = spec.methods[i];
                    try {
                        const MethodOutcome o = solve(problem, spec.methods[i], params);
                        rec.relative_error = o.relative_error;
                        rec.work_units = o.work_units;
                        rec.k_stop = o.k_stop;
                    } catch (const Error& e) {
                        rec.ok = false;
                        rec.error = e.what();
                    }
                    records[task * n_methods + i] = std::move(rec);
                }
            } catch (const Error& e) {
                for (std::size_t i = 0; i < n_methods; ++i) {
                    BenchRecord rec = base;
                    rec.method = spec.methods[i];
                    rec.ok = false;
                    rec.error = e.what();
                    records[task * n_methods + i] = std::move(rec);
                }
            }
        }
    };

    std::size_t jobs = spec.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : spec.jobs;
    jobs = std::min(jobs, n_tasks);
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();

    BenchResult result;
    result.table = aggregate(spec, records);
    for (std::size_t start = 0; start < records.size(); start += n_methods) {
        if (std::any_of(records.begin() + static_cast<long>(start), records.begin() + static_cast<long>(start + n_methods),
                        [](const BenchRecord& r) { return !r.ok; }))
            ++result.failed_runs;
    }
    result.records = std::move(records);
    return result;
}

void write_score_table_csv(std::ostream& os, const ScoreTable& table) {
    os << "phantom,method,mean_rel_error,mean_work_units,score,completed,failed\n";
    const auto old_precision = os.precision(10);
    for (const auto& r : table.rows) {
        os << to_string(r.kind) << ',' << method_name(r.method) << ',' << r.mean_error << ',' << r.mean_work << ','
           << r.score << ',' << r.completed << ',' << r.failed << '\n';
    }
    os.precision(old_precision);
}

void write_records_jsonl(std::ostream& os, const std::vector<BenchRecord>& records) {
    for (const auto& r : records) {
        nlohmann::json j;
        j["phantom"] = to_string(r.kind);
        j["run"] = r.run;
        j["seed"] = r.seed;
        j["method"] = method_name(r.method);
        j["status"] = r.ok ? "ok" : "failed";
        if (r.ok) {
            j["relative_error"] = number_or_null(r.relative_error);
            j["work_units"] = r.work_units;
            j["k_stop"] = r.k_stop;
            j["score"] = r.score;
        } else {
            j["error"] = r.error;
        }
        os << j.dump() << '\n';
    }
}

SparseMatrix random_dense_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Triplet> t;
    t.reserve(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) t.push_back({i, j, rng.normal()});
    return SparseMatrix::from_triplets(m, n, t);
}

SpectralSuiteResult run_spectral_suite(const SpectralSuiteSpec& spec) {
    if (spec.rows < spec.cols) throw ConfigError("spectral suite needs rows >= cols (full column rank)");
    if (spec.cols < 1) throw ConfigError("spectral suite needs at least one column");
    if (spec.rows * spec.cols > kLabSizeLimit) throw TooLargeError("spectral suite sizes must stay desk-scale");
    for (double w : spec.omegas) check_relaxation(w);

    SpectralSuiteResult result;
    auto evaluate = [&](std::string label, const SparseMatrix& A, double omega, std::uint64_t data_seed) {
        SpectralTrial t;
        t.label = std::move(label);
        t.rows = A.rows();
        t.cols = A.cols();
        t.omega = omega;
        t.transpose_deviation = verify_upsweep_transpose(A, omega);
        const DenseLab lab = build_lab(A, omega);
        const EigenReport rep = eigen_report(lab);
        t.rho = rep.rho;
        t.kappa_1 = rep.kappa_1;
        Rng rng(data_seed);
        const Vector b = rng.normal_vector(A.rows());
        const Vector x0(A.cols(), 0.0);
        const auto dev = polynomial_check(lab, b, x0, spec.poly_k);
        t.dev_q = dev.dev_q;
        t.dev_p = dev.dev_p;
        t.pass = t.transpose_deviation <= 1e-11 && t.rho < 1.0 && t.dev_q <= 1e-8 && t.dev_p <= 1e-8;
        result.pass = result.pass && t.pass;
        result.trials.push_back(std::move(t));
    };

    if (spec.trials == 0) return result;
    evaluate("identity", SparseMatrix::identity(spec.cols), 1.0, derive_seed(spec.seed, 99));
    for (std::size_t i = 0; i < spec.trials; ++i) {
        const SparseMatrix A = random_dense_matrix(spec.rows, spec.cols, derive_seed(spec.seed, 2 * i));
        for (double w : spec.omegas) evaluate("random-" + std::to_string(i), A, w, derive_seed(spec.seed, 2 * i + 1));
    }
    return result;
}

std::string spectral_suite_json(const SpectralSuiteResult& result) {
    nlohmann::json j;
    j["pass"] = result.pass;
    auto& arr = j["trials"] = nlohmann::json::array();
    for (const auto& t : result.trials) {
        arr.push_back({{"label", t.label},
                       {"rows", t.rows},
                       {"cols", t.cols},
                       {"omega", t.omega},
                       {"transpose_deviation", t.transpose_deviation},
                       {"rho", t.rho},
                       {"kappa_1", t.kappa_1 ? nlohmann::json(*t.kappa_1) : nlohmann::json(nullptr)},
                       {"dev_q", t.dev_q},
                       {"dev_p", t.dev_p},
                       {"pass", t.pass}});
    }
    return j.dump(2);
}

} // namespace kaczmarz
