#pragma once

#include "kaczmarz/sparse_matrix.hpp"
#include "kaczmarz/sweep.hpp"
#include "kaczmarz/work_meter.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace kaczmarz {

/// Monte-Carlo probe for tr(A A#_k), the trace of the influence matrix.
///
/// With x0 = 0 the Kaczmarz iterate is linear in the data, x_k = A#_k b, so
/// running the same sweeps on Gaussian data w gives z_k = A#_k w and
/// t_k = w^T A z_k is an unbiased estimate of tr(A A#_k). A^T w is formed once
/// so that each update costs one sweep plus an n-length inner product.
struct TraceProbe {
    Vector w;
    Vector z;
    Vector at_w;  // A^T w
    double t = 0.0;
    std::size_t k = 0;

    static TraceProbe create(const SparseMatrix& A, std::uint64_t seed, OpCounter* ops = nullptr);

    /// Probe with caller-chosen data, mostly for tests.
    static TraceProbe with_data(const SparseMatrix& A, Vector w, OpCounter* ops = nullptr);
};

/// Advances the probe by one sweep in the given direction and refreshes t.
void trace_update(const SparseMatrix& A, TraceProbe& probe, double omega, Direction direction,
                  OpCounter* ops = nullptr);

/// U_k = ||b - A x_k||^2 + 2 sigma^2 t_k - sigma^2 m
double upre_score(double residual_norm_sq, double trace, double sigma, std::size_t m);

/// G_k = ||b - A x_k||^2 / (m - t_k)^2. Throws DegenerateDenominator when t_k >= m.
double gcv_score(double residual_norm_sq, double trace, std::size_t m);

/// ||b - A x_k||^2 <= sigma^2 (m - t_k). A negative right-hand side (t_k > m,
/// possible under Monte-Carlo noise) counts as not satisfied.
bool cdp_check(double residual_norm_sq, double trace, double sigma, std::size_t m);

/// First index of the smallest entry. Throws ConfigError on an empty history.
std::size_t oracle_stop(std::span<const double> true_error_history);

enum class StopRule { none, oracle, upre, gcv, cdp };

std::string_view to_string(StopRule r);
StopRule stop_rule_from_string(std::string_view name);

struct RuleOptions {
    double omega = 1.0;
    StopRule rule = StopRule::none;
    std::size_t maxits = 300;
    std::optional<double> sigma;
    std::span<const double> x_star = {};
    std::uint64_t probe_seed = 0;
    /// Oracle only: end the run once this many sweeps pass without a new
    /// minimum (0 runs to maxits). The oracle knows the exact error, so this
    /// never changes the selected iterate once the error curve has turned.
    std::size_t patience = 0;
    bool track_residual = true;
};

struct RunResult {
    Vector x;                       // selected iterate
    std::size_t stopped_at = 0;     // sweep index (1-based) of the selected iterate
    bool triggered = false;         // cdp: condition met; argmin rules: always true once run
    std::size_t iterations = 0;     // sweeps executed
    History history;
    std::vector<double> trace;      // t_k, trace rules only
    std::vector<double> score;      // rule score per iteration (cdp: margin rhs - lhs)
    std::size_t negative_rhs = 0;   // cdp iterations with t_k > m
    double work_units = 0.0;
};

/// Down-sweep Kaczmarz from zero with a stopping rule. UPRE and GCV run to
/// maxits and return the minimising iterate; CDP stops at the first iteration
/// that satisfies the discrepancy condition; the oracle returns the iterate
/// with the smallest true error.
RunResult run_with_rule(const SparseMatrix& A, std::span<const double> b, const RuleOptions& opts,
                        OpCounter* ops = nullptr);

/// History CSV with the extra columns t_k and score.
void write_rule_history_csv(std::ostream& os, const RunResult& r);

} // namespace kaczmarz
