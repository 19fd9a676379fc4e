#pragma once

#include "kaczmarz/sparse_matrix.hpp"
#include "kaczmarz/sweep.hpp"
#include "kaczmarz/work_meter.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace kaczmarz {

/// ||x - x_twin||, the distance between a down-sweep iterate and its twin.
double error_gauge(std::span<const double> x, std::span<const double> x_twin);

struct TwinConfig {
    double omega = 1.0;
    std::size_t maxits = 300;
    std::size_t slack = 10;
    /// Direction of the first iterate of each pair; the other runs the opposite way.
    Direction primary = Direction::down;

    void validate() const;
};

struct MutualStepConfig {
    double omega = 1.0;
    std::size_t maxits = 300;
    double tol = 1e-4;

    void validate() const;
};

/// Tracks the smallest value seen so far and reports when `slack`
/// further observations have passed without a new minimum.
class SlackMinimumTracker {
public:
    explicit SlackMinimumTracker(std::size_t slack);

    /// Returns true when `value` is a new strict minimum.
    bool observe(double value);

    bool expired() const { return since_best_ >= slack_; }
    bool has_best() const { return count_ > 0; }
    std::size_t best_index() const { return best_index_; }
    double best_value() const { return best_value_; }
    std::size_t observed() const { return count_; }

private:
    std::size_t slack_;
    std::size_t count_ = 0;
    std::size_t since_best_ = 0;
    std::size_t best_index_ = 0;
    double best_value_ = std::numeric_limits<double>::infinity();
};

enum class StepStatus { ok, degenerate };

struct StepSizes {
    double alpha = 0.0;
    double beta = 0.0;
    StepStatus status = StepStatus::ok;
};

/// Determinant threshold, relative to ||w||^2 ||w_twin||^2, below which the
/// step-size system is treated as singular.
inline constexpr double kStepDeterminantEps = 1e-14;

/// Minimises ||(x - x_twin) + alpha w - beta w_twin|| over (alpha, beta) by
/// solving the 2x2 normal equations in closed form. Collinear directions give
/// status degenerate and (0, 0).
StepSizes solve_step_sizes(std::span<const double> w, std::span<const double> w_twin, std::span<const double> x,
                           std::span<const double> x_twin, OpCounter* ops = nullptr);

enum class StopReason { slack, maxits, small_steps, negative_steps, degenerate };

std::string_view to_string(StopReason r);

struct GaugeRunResult {
    Vector x_out;                        // average of the returned pair
    std::size_t k_stop = 0;              // sweep index (1-based) of the returned pair
    std::size_t iterations = 0;          // iterations actually executed
    std::vector<double> gauge_history;   // one entry per pair produced
    std::vector<StepSizes> step_history; // mutual-step only
    std::vector<double> true_error;      // relative error of x_out candidates, when x_star given
    std::vector<double> primary_error;   // twin: relative error of the primary-direction iterate
    StopReason reason = StopReason::maxits;
    double work_units = 0.0;
};

/// Paired down/up sweeps from zero; returns the average of the pair with the
/// smallest gauge once `slack` sweeps pass without a new minimum.
GaugeRunResult twin_algorithm(const SparseMatrix& A, std::span<const double> b, const TwinConfig& cfg,
                              std::span<const double> x_star = {}, OpCounter* ops = nullptr);

/// Mutual-step iteration: down/up Kaczmarz directions with step sizes that
/// minimise the next gauge. Starts from one down- and one up-sweep from zero.
GaugeRunResult mutual_step(const SparseMatrix& A, std::span<const double> b, const MutualStepConfig& cfg,
                           std::span<const double> x_star = {}, OpCounter* ops = nullptr);

} // namespace kaczmarz
