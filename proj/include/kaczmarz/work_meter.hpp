#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace kaczmarz {

/// Instrumented floating-point operation counter. Kernels that accept an
/// OpCounter* add the operations they actually perform; nullptr disables it.
struct OpCounter {
    std::uint64_t flops = 0;

    void add(std::uint64_t n) { flops += n; }
};

inline void count(OpCounter* ops, std::uint64_t n) {
    if (ops != nullptr) ops->add(n);
}

enum class WorkEvent { sweep, residual, gauge, step_solve, trace_update, inner_product };

std::string_view to_string(WorkEvent e);

/// Parses the event names used in logs; throws std::invalid_argument on unknown names.
WorkEvent work_event_from_string(std::string_view name);

/// Modelled operation counts, in units of one Kaczmarz sweep.
///
/// A sweep over an m-row matrix with r nonzeros per row costs 4 m r operations
/// (one dot product and one axpy per row). For 2-D tomography r is about
/// sqrt(n), which is the default. Per-event costs:
///
///   sweep          4 m r
///   residual       2 m r + 3 m     (A x, b - A x, squared norm)
///   gauge          3 n             (difference and squared norm)
///   step_solve     11 n            (mutual-step vector work per iteration)
///   trace_update   4 m r           (probe sweep)
///   inner_product  2 n
///
/// so one iteration of plain Kaczmarz is 1 unit, a trace-equipped stopping
/// rule is 10 m r + 2 n + 3 m, the twin method 8 m r + 3 n and the
/// mutual-step method 8 m r + 11 n.
class WorkMeter {
public:
    WorkMeter(std::size_t m, std::size_t n);
    WorkMeter(std::size_t m, std::size_t n, double row_nnz);

    void charge(WorkEvent e, double times = 1.0);

    double operations() const { return operations_; }
    double work_units() const { return operations_ / sweep_cost(); }

    double sweep_cost() const { return 4.0 * m_ * row_nnz_; }
    double event_cost(WorkEvent e) const;

    double m() const { return m_; }
    double n() const { return n_; }
    double row_nnz() const { return row_nnz_; }

private:
    double m_;
    double n_;
    double row_nnz_;
    double operations_ = 0.0;
};

/// Closed-form per-iteration work units with r = sqrt(n).
double units_per_iteration_kaczmarz();
double units_per_iteration_stat_rule(double m, double n);
double units_per_iteration_twin(double m, double n);
double units_per_iteration_mutual_step(double m, double n);

} // namespace kaczmarz
