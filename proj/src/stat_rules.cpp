#include "kaczmarz/stat_rules.hpp"

#include "kaczmarz/errors.hpp"
#include "kaczmarz/rng.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace kaczmarz {

TraceProbe TraceProbe::create(const SparseMatrix& A, std::uint64_t seed, OpCounter* ops) {
    Rng rng(seed);
    return with_data(A, rng.normal_vector(A.rows()), ops);
}

TraceProbe TraceProbe::with_data(const SparseMatrix& A, Vector w, OpCounter* ops) {
    if (w.size() != A.rows()) throw ShapeError("trace probe length does not match row count");
    TraceProbe p;
    p.at_w = A.multiply_transpose(w);
    count(ops, 2 * A.nnz());
    p.w = std::move(w);
    p.z.assign(A.cols(), 0.0);
    return p;
}

void trace_update(const SparseMatrix& A, TraceProbe& probe, double omega, Direction direction, OpCounter* ops) {
    sweep(A, probe.w, omega, direction, probe.z, ops);
    probe.t = dot(probe.at_w, probe.z);
    count(ops, 2 * A.cols());
    ++probe.k;
}

double upre_score(double residual_norm_sq, double trace, double sigma, std::size_t m) {
    const double s2 = sigma * sigma;
    return residual_norm_sq + 2.0 * s2 * trace - s2 * static_cast<double>(m);
}

double gcv_score(double residual_norm_sq, double trace, std::size_t m) {
    const double denom = static_cast<double>(m) - trace;
    if (!(denom > 0.0)) throw DegenerateDenominator("GCV denominator vanishes: trace estimate >= m");
    return residual_norm_sq / (denom * denom);
}

bool cdp_check(double residual_norm_sq, double trace, double sigma, std::size_t m) {
    const double rhs = sigma * sigma * (static_cast<double>(m) - trace);
    if (rhs < 0.0) return false;
    return residual_norm_sq <= rhs;
}

std::size_t oracle_stop(std::span<const double> true_error_history) {
    if (true_error_history.empty()) throw ConfigError("oracle needs a non-empty error history");
    std::size_t best = 0;
    for (std::size_t i = 1; i < true_error_history.size(); ++i) {
        if (true_error_history[i] < true_error_history[best]) best = i;
    }
    return best;
}

std::string_view to_string(StopRule r) {
    switch (r) {
    case StopRule::none: return "none";
    case StopRule::oracle: return "oracle";
    case StopRule::upre: return "upre";
    case StopRule::gcv: return "gcv";
    case StopRule::cdp: return "cdp";
    }
    return "unknown";
}

StopRule stop_rule_from_string(std::string_view name) {
    for (auto r : {StopRule::none, StopRule::oracle, StopRule::upre, StopRule::gcv, StopRule::cdp}) {
        if (to_string(r) == name) return r;
    }
    throw ConfigError("unknown stopping rule: " + std::string(name));
}

RunResult run_with_rule(const SparseMatrix& A, std::span<const double> b, const RuleOptions& opts, OpCounter* ops) {
    check_relaxation(opts.omega);
    if (opts.maxits < 1) throw ConfigError("maxits must be at least 1");
    if (b.size() != A.rows()) throw ShapeError("data length does not match row count");
    const bool needs_trace = opts.rule == StopRule::upre || opts.rule == StopRule::gcv || opts.rule == StopRule::cdp;
    const bool needs_sigma = opts.rule == StopRule::upre || opts.rule == StopRule::cdp;
    if (needs_sigma && !opts.sigma) throw ConfigError(std::string(to_string(opts.rule)) + " requires sigma");
    if (needs_sigma && !(*opts.sigma >= 0.0)) throw ConfigError("sigma must be non-negative");
    if (opts.rule == StopRule::oracle && opts.x_star.empty()) throw ConfigError("oracle rule requires ground truth");
    if (!opts.x_star.empty() && opts.x_star.size() != A.cols())
        throw ShapeError("ground truth length does not match column count");

    const std::size_t m = A.rows();
    const std::size_t n = A.cols();
    const bool track_residual = needs_trace || opts.track_residual;
    WorkMeter meter(m, n, std::max(A.mean_row_nnz(), 1.0));

    RunResult out;
    Vector x(n, 0.0);
    std::optional<TraceProbe> probe;
    if (needs_trace) probe = TraceProbe::create(A, opts.probe_seed, ops);

    double best_score = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;
    for (std::size_t k = 1; k <= opts.maxits; ++k) {
        sweep(A, b, opts.omega, Direction::down, x, ops);
        meter.charge(WorkEvent::sweep);
        out.iterations = k;

        double res_sq = 0.0;
        if (track_residual) {
            const double r = residual_norm(A, b, x, ops);
            res_sq = r * r;
            out.history.residual_norm.push_back(r);
            meter.charge(WorkEvent::residual);
        }
        if (!opts.x_star.empty()) out.history.true_error.push_back(relative_error(x, opts.x_star));
        if (probe) {
            trace_update(A, *probe, opts.omega, Direction::down, ops);
            meter.charge(WorkEvent::trace_update);
            meter.charge(WorkEvent::inner_product);
            out.trace.push_back(probe->t);
        }

        // Lower is better for every retained score.
        double score = std::numeric_limits<double>::quiet_NaN();
        bool stop_now = false;
        switch (opts.rule) {
        case StopRule::none: break;
        case StopRule::oracle: score = out.history.true_error.back(); break;
        case StopRule::upre: score = upre_score(res_sq, probe->t, *opts.sigma, m); break;
        case StopRule::gcv:
            try {
                score = gcv_score(res_sq, probe->t, m);
            } catch (const DegenerateDenominator&) {
                score = std::numeric_limits<double>::quiet_NaN();
            }
            break;
        case StopRule::cdp: {
            const double rhs = *opts.sigma * *opts.sigma * (static_cast<double>(m) - probe->t);
            if (rhs < 0.0) ++out.negative_rhs;
            score = res_sq - rhs;
            stop_now = cdp_check(res_sq, probe->t, *opts.sigma, m);
            break;
        }
        }
        if (opts.rule != StopRule::none) out.score.push_back(score);

        if (opts.rule == StopRule::oracle || opts.rule == StopRule::upre || opts.rule == StopRule::gcv) {
            if (score < best_score) {
                best_score = score;
                out.x = x;
                out.stopped_at = k;
                since_best = 0;
            } else {
                ++since_best;
            }
            if (opts.rule == StopRule::oracle && opts.patience > 0 && since_best >= opts.patience) break;
        }
        if (stop_now) {
            out.triggered = true;
            out.stopped_at = k;
            out.x = x;
            break;
        }
    }

    switch (opts.rule) {
    case StopRule::none:
    case StopRule::cdp:
        if (!out.triggered) {
            out.x = std::move(x);
            out.stopped_at = out.iterations;
        }
        break;
    case StopRule::oracle:
    case StopRule::upre:
    case StopRule::gcv:
        out.triggered = out.stopped_at > 0;
        if (!out.triggered) {
            out.x = std::move(x);
            out.stopped_at = out.iterations;
        }
        break;
    }
    // Consulting the oracle is free: its cost is the sweeps up to the chosen iterate.
    out.work_units = opts.rule == StopRule::oracle ? static_cast<double>(out.stopped_at) : meter.work_units();
    return out;
}

void write_rule_history_csv(std::ostream& os, const RunResult& r) {
    os << "k,true_error,residual_norm,gauge,t_k,score\n";
    const auto old_precision = os.precision(17);
    const auto cell = [&os](const std::vector<double>& v, std::size_t i) {
        if (i < v.size()) os << v[i];
    };
    for (std::size_t i = 0; i < r.iterations; ++i) {
        os << (i + 1) << ',';
        cell(r.history.true_error, i);
        os << ',';
        cell(r.history.residual_norm, i);
        os << ",,";
        cell(r.trace, i);
        os << ',';
        cell(r.score, i);
        os << '\n';
    }
    os.precision(old_precision);
}

} // namespace kaczmarz
