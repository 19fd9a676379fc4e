#include "kaczmarz/work_meter.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kaczmarz {

std::string_view to_string(WorkEvent e) {
    switch (e) {
    case WorkEvent::sweep: return "sweep";
    case WorkEvent::residual: return "residual";
    case WorkEvent::gauge: return "gauge";
    case WorkEvent::step_solve: return "step_solve";
    case WorkEvent::trace_update: return "trace_update";
    case WorkEvent::inner_product: return "inner_product";
    }
    return "unknown";
}

WorkEvent work_event_from_string(std::string_view name) {
    for (auto e : {WorkEvent::sweep, WorkEvent::residual, WorkEvent::gauge, WorkEvent::step_solve,
                   WorkEvent::trace_update, WorkEvent::inner_product}) {
        if (to_string(e) == name) return e;
    }
    throw std::invalid_argument("unknown work event: " + std::string(name));
}

WorkMeter::WorkMeter(std::size_t m, std::size_t n)
    : WorkMeter(m, n, std::sqrt(static_cast<double>(n))) {}

WorkMeter::WorkMeter(std::size_t m, std::size_t n, double row_nnz)
    : m_(static_cast<double>(m)), n_(static_cast<double>(n)), row_nnz_(row_nnz) {
    if (m == 0 || n == 0 || !(row_nnz > 0.0)) throw std::invalid_argument("WorkMeter needs m, n, r > 0");
}

double WorkMeter::event_cost(WorkEvent e) const {
    switch (e) {
    case WorkEvent::sweep: return 4.0 * m_ * row_nnz_;
    case WorkEvent::residual: return 2.0 * m_ * row_nnz_ + 3.0 * m_;
    case WorkEvent::gauge: return 3.0 * n_;
    case WorkEvent::step_solve: return 11.0 * n_;
    case WorkEvent::trace_update: return 4.0 * m_ * row_nnz_;
    case WorkEvent::inner_product: return 2.0 * n_;
    }
    throw std::logic_error("unhandled work event");
}

void WorkMeter::charge(WorkEvent e, double times) { operations_ += times * event_cost(e); }

double units_per_iteration_kaczmarz() { return 1.0; }

double units_per_iteration_stat_rule(double m, double n) {
    const double r = std::sqrt(n);
    return 2.5 + 0.5 * r / m + 0.75 / r;
}

double units_per_iteration_twin(double m, double n) { return 2.0 + 0.75 * std::sqrt(n) / m; }

double units_per_iteration_mutual_step(double m, double n) { return 2.0 + 2.75 * std::sqrt(n) / m; }

} // namespace kaczmarz
