#include "kaczmarz/gauge.hpp"

#include "kaczmarz/errors.hpp"

#include <cmath>

namespace kaczmarz {

double error_gauge(std::span<const double> x, std::span<const double> x_twin) {
    if (x.size() != x_twin.size()) throw ShapeError("error_gauge: length mismatch");
    return distance(x, x_twin);
}

void TwinConfig::validate() const {
    check_relaxation(omega);
    if (maxits < 1) throw ConfigError("maxits must be at least 1");
    if (slack < 1) throw ConfigError("slack must be at least 1");
}

void MutualStepConfig::validate() const {
    check_relaxation(omega);
    if (maxits < 1) throw ConfigError("maxits must be at least 1");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
}

SlackMinimumTracker::SlackMinimumTracker(std::size_t slack) : slack_(slack) {
    if (slack < 1) throw ConfigError("slack must be at least 1");
}

bool SlackMinimumTracker::observe(double value) {
    const std::size_t index = count_++;
    if (value < best_value_) {
        best_value_ = value;
        best_index_ = index;
        since_best_ = 0;
        return true;
    }
    ++since_best_;
    return false;
}

std::string_view to_string(StopReason r) {
    switch (r) {
    case StopReason::slack: return "slack";
    case StopReason::maxits: return "maxits";
    case StopReason::small_steps: return "small_steps";
    case StopReason::negative_steps: return "negative_steps";
    case StopReason::degenerate: return "degenerate";
    }
    return "unknown";
}

StepSizes solve_step_sizes(std::span<const double> w, std::span<const double> w_twin, std::span<const double> x,
                           std::span<const double> x_twin, OpCounter* ops) {
    const std::size_t n = w.size();
    if (w_twin.size() != n || x.size() != n || x_twin.size() != n)
        throw ShapeError("solve_step_sizes: length mismatch");

    double ww = 0.0, tt = 0.0, wt = 0.0, wd = 0.0, td = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - x_twin[i];
        ww += w[i] * w[i];
        tt += w_twin[i] * w_twin[i];
        wt += w[i] * w_twin[i];
        wd += w[i] * d;
        td += w_twin[i] * d;
    }
    count(ops, 11 * n);

    // [ ww  -wt ] [alpha]   [ -w^T d       ]
    // [ -wt  tt ] [beta ] = [ w_twin^T d   ]
    const double det = ww * tt - wt * wt;
    if (!(det > kStepDeterminantEps * ww * tt)) return {0.0, 0.0, StepStatus::degenerate};
    const double r1 = -wd;
    const double r2 = td;
    return {(tt * r1 + wt * r2) / det, (wt * r1 + ww * r2) / det, StepStatus::ok};
}

namespace {

void check_problem(const SparseMatrix& A, std::span<const double> b, std::span<const double> x_star) {
    if (b.size() != A.rows()) throw ShapeError("data length does not match row count");
    if (!x_star.empty() && x_star.size() != A.cols()) throw ShapeError("ground truth length does not match column count");
}

void average_into(std::span<const double> x, std::span<const double> y, Vector& out) {
    out.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = 0.5 * (x[i] + y[i]);
}

} // namespace

GaugeRunResult twin_algorithm(const SparseMatrix& A, std::span<const double> b, const TwinConfig& cfg,
                              std::span<const double> x_star, OpCounter* ops) {
    cfg.validate();
    check_problem(A, b, x_star);
    const std::size_t n = A.cols();
    WorkMeter meter(A.rows(), n, std::max(A.mean_row_nnz(), 1.0));

    Vector x(n, 0.0);
    Vector x_twin(n, 0.0);
    const Direction twin_dir = opposite(cfg.primary);

    GaugeRunResult result;
    SlackMinimumTracker tracker(cfg.slack);
    Vector avg;
    for (std::size_t k = 1; k <= cfg.maxits; ++k) {
        sweep(A, b, cfg.omega, cfg.primary, x, ops);
        sweep(A, b, cfg.omega, twin_dir, x_twin, ops);
        meter.charge(WorkEvent::sweep, 2);
        meter.charge(WorkEvent::gauge);

        const double g = error_gauge(x, x_twin);
        count(ops, 3 * n);
        result.gauge_history.push_back(g);
        result.iterations = k;
        if (!x_star.empty()) {
            average_into(x, x_twin, avg);
            result.true_error.push_back(relative_error(avg, x_star));
            result.primary_error.push_back(relative_error(x, x_star));
        }
        if (tracker.observe(g)) {
            average_into(x, x_twin, result.x_out);
            result.k_stop = k;
        }
        if (tracker.expired()) {
            result.reason = StopReason::slack;
            break;
        }
    }
    if (result.iterations == cfg.maxits && !tracker.expired()) result.reason = StopReason::maxits;
    result.work_units = meter.work_units();
    return result;
}

GaugeRunResult mutual_step(const SparseMatrix& A, std::span<const double> b, const MutualStepConfig& cfg,
                           std::span<const double> x_star, OpCounter* ops) {
    cfg.validate();
    check_problem(A, b, x_star);
    const std::size_t n = A.cols();
    WorkMeter meter(A.rows(), n, std::max(A.mean_row_nnz(), 1.0));

    Vector x(n, 0.0);
    Vector x_twin(n, 0.0);
    sweep(A, b, cfg.omega, Direction::down, x, ops);
    sweep(A, b, cfg.omega, Direction::up, x_twin, ops);
    meter.charge(WorkEvent::sweep, 2);

    GaugeRunResult result;
    Vector avg;
    auto record = [&] {
        result.gauge_history.push_back(error_gauge(x, x_twin));
        count(ops, 3 * n);
        if (!x_star.empty()) {
            average_into(x, x_twin, avg);
            result.true_error.push_back(relative_error(avg, x_star));
        }
    };
    record();

    Vector w(n);
    Vector w_twin(n);
    result.reason = StopReason::maxits;
    for (std::size_t k = 1; k <= cfg.maxits; ++k) {
        w = x;
        w_twin = x_twin;
        sweep(A, b, cfg.omega, Direction::down, w, ops);
        sweep(A, b, cfg.omega, Direction::up, w_twin, ops);
        for (std::size_t i = 0; i < n; ++i) {
            w[i] -= x[i];
            w_twin[i] -= x_twin[i];
        }
        count(ops, 2 * n);
        meter.charge(WorkEvent::sweep, 2);
        meter.charge(WorkEvent::step_solve);
        result.iterations = k;

        const StepSizes step = solve_step_sizes(w, w_twin, x, x_twin, ops);
        result.step_history.push_back(step);
        if (step.status == StepStatus::degenerate) {
            result.reason = StopReason::degenerate;
            break;
        }
        if (std::abs(step.alpha) + std::abs(step.beta) < cfg.tol) {
            result.reason = StopReason::small_steps;
            break;
        }
        if (step.alpha < 0.0 && step.beta < 0.0) {
            result.reason = StopReason::negative_steps;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += step.alpha * w[i];
            x_twin[i] += step.beta * w_twin[i];
        }
        count(ops, 4 * n);
        result.k_stop = k;
        record();
    }
    average_into(x, x_twin, result.x_out);
    result.work_units = meter.work_units();
    return result;
}

} // namespace kaczmarz
