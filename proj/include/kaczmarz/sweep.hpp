#pragma once

#include "kaczmarz/sparse_matrix.hpp"
#include "kaczmarz/work_meter.hpp"

#include <iosfwd>
#include <span>
#include <string_view>

namespace kaczmarz {

/// Row order of a sweep: down visits rows 0..m-1, up visits m-1..0.
enum class Direction { down, up };

std::string_view to_string(Direction d);
Direction opposite(Direction d);

struct SweepState {
    Vector x;
    double omega = 1.0;
    Direction direction = Direction::down;
    std::size_t k = 0;

    /// Throws ConfigError unless 0 < omega < 2.
    void validate() const;
};

/// Throws ConfigError unless 0 < omega < 2.
void check_relaxation(double omega);

/// One full Kaczmarz pass over the rows of A, updating x in place:
///   x <- x + omega (b_j - a_j^T x) / ||a_j||^2 a_j
/// Zero rows are skipped.
void sweep(const SparseMatrix& A, std::span<const double> b, double omega, Direction direction,
           std::span<double> x, OpCounter* ops = nullptr);

/// Same as above on a SweepState; increments state.k.
void sweep(const SparseMatrix& A, std::span<const double> b, SweepState& state, OpCounter* ops = nullptr);

/// ||b - A x||, counting 2 nnz + 3 m operations.
double residual_norm(const SparseMatrix& A, std::span<const double> b, std::span<const double> x,
                     OpCounter* ops = nullptr);

/// ||x - x_star|| / ||x_star||, or the absolute error when x_star is zero.
double relative_error(std::span<const double> x, std::span<const double> x_star);

/// Per-sweep histories. Entry i belongs to the iterate after sweep i + 1.
struct History {
    std::vector<double> true_error;     // relative; empty without ground truth
    std::vector<double> residual_norm;  // empty when not tracked
    std::vector<double> gauge;          // empty unless paired with a twin

    std::size_t size() const;
};

/// Writes "k,true_error,residual_norm,gauge"; absent columns are left blank.
void write_history_csv(std::ostream& os, const History& h);

struct RunOptions {
    double omega = 1.0;
    Direction direction = Direction::down;
    std::size_t n_sweeps = 1;
    std::span<const double> x0 = {};      // empty means the zero vector
    std::span<const double> x_star = {};  // empty disables true_error
    bool track_residual = true;
};

struct RunOutput {
    Vector x;
    History history;
};

/// Plain fixed-relaxation Kaczmarz for a fixed number of sweeps.
RunOutput run(const SparseMatrix& A, std::span<const double> b, const RunOptions& opts, OpCounter* ops = nullptr);

} // namespace kaczmarz
