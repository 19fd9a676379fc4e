#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace kaczmarz {

using Vector = std::vector<double>;

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;

    bool operator==(const Triplet&) const = default;
};

/// Read-only view of one CSR row.
struct RowView {
    std::span<const std::uint32_t> cols;
    std::span<const double> values;

    std::size_t size() const { return cols.size(); }
};

/// Compressed sparse row matrix with cached squared row norms.
///
/// Immutable after construction. Column indices are strictly increasing within
/// each row and zero rows are allowed (a ray that misses the image).
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Takes ownership of raw CSR arrays and validates them.
    /// Throws ShapeError on malformed row_ptr and IndexError on bad columns.
    SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_ptr,
                 std::vector<std::uint32_t> col_idx, std::vector<double> values);

    /// Duplicates are summed; entries that sum to exactly zero are dropped.
    static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                      std::span<const Triplet> entries);

    static SparseMatrix identity(std::size_t n);

    std::size_t rows() const { return n_rows_; }
    std::size_t cols() const { return n_cols_; }
    std::size_t nnz() const { return values_.size(); }

    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::uint32_t>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& row_norms_sq() const { return row_norms_sq_; }

    RowView row(std::size_t j) const;

    /// a_j^T x
    double row_dot(std::size_t j, std::span<const double> x) const;

    /// x += s * a_j, touching only the nonzero positions of row j.
    void row_axpy(std::size_t j, double s, std::span<double> x) const;

    /// y = A x
    Vector multiply(std::span<const double> x) const;

    /// x = A^T y
    Vector multiply_transpose(std::span<const double> y) const;

    /// Canonical row-major triplet export.
    std::vector<Triplet> triplets() const;

    /// Same matrix with row order m-1, ..., 0.
    SparseMatrix rows_reversed() const;

    /// Dense row-major copy, for small matrices only.
    std::vector<double> to_dense() const;

    /// Average number of stored entries per row.
    double mean_row_nnz() const;

    bool operator==(const SparseMatrix&) const = default;

private:
    void check_row(std::size_t j) const;
    void compute_row_norms();

    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> col_idx_;
    std::vector<double> values_;
    std::vector<double> row_norms_sq_;
};

/// Euclidean norm.
double norm2(std::span<const double> x);

double dot(std::span<const double> x, std::span<const double> y);

/// Euclidean distance ||x - y||. Throws ShapeError on length mismatch.
double distance(std::span<const double> x, std::span<const double> y);

} // namespace kaczmarz
