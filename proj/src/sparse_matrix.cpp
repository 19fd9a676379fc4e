#include "kaczmarz/sparse_matrix.hpp"

#include "kaczmarz/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kaczmarz {

SparseMatrix::SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_ptr,
                           std::vector<std::uint32_t> col_idx, std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
    if (n_cols_ > std::numeric_limits<std::uint32_t>::max())
        throw ShapeError("column count exceeds 32-bit index range");
    if (row_ptr_.size() != n_rows_ + 1 || row_ptr_.front() != 0 || row_ptr_.back() != values_.size() ||
        col_idx_.size() != values_.size())
        throw ShapeError("inconsistent CSR arrays");
    for (std::size_t j = 0; j < n_rows_; ++j) {
        if (row_ptr_[j + 1] < row_ptr_[j]) throw ShapeError("row_ptr must be non-decreasing");
        for (std::size_t p = row_ptr_[j]; p < row_ptr_[j + 1]; ++p) {
            if (col_idx_[p] >= n_cols_)
                throw IndexError("column index " + std::to_string(col_idx_[p]) + " out of range");
            if (p > row_ptr_[j] && col_idx_[p] <= col_idx_[p - 1])
                throw IndexError("column indices must be strictly increasing within a row");
        }
    }
    compute_row_norms();
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols,
                                         std::span<const Triplet> entries) {
    std::vector<Triplet> sorted(entries.begin(), entries.end());
    for (const auto& t : sorted) {
        if (t.row >= n_rows || t.col >= n_cols)
            throw IndexError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                             ") out of range");
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    std::vector<std::size_t> row_ptr(n_rows + 1, 0);
    std::vector<std::uint32_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(sorted.size());
    values.reserve(sorted.size());

    std::size_t i = 0;
    while (i < sorted.size()) {
        const auto row = sorted[i].row;
        const auto col = sorted[i].col;
        double sum = 0.0;
        for (; i < sorted.size() && sorted[i].row == row && sorted[i].col == col; ++i) sum += sorted[i].value;
        if (sum == 0.0) continue;
        col_idx.push_back(static_cast<std::uint32_t>(col));
        values.push_back(sum);
        ++row_ptr[row + 1];
    }
    for (std::size_t j = 0; j < n_rows; ++j) row_ptr[j + 1] += row_ptr[j];
    return SparseMatrix(n_rows, n_cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<std::size_t> row_ptr(n + 1);
    std::vector<std::uint32_t> col_idx(n);
    for (std::size_t j = 0; j < n; ++j) {
        row_ptr[j + 1] = j + 1;
        col_idx[j] = static_cast<std::uint32_t>(j);
    }
    return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::vector<double>(n, 1.0));
}

void SparseMatrix::compute_row_norms() {
    row_norms_sq_.assign(n_rows_, 0.0);
    for (std::size_t j = 0; j < n_rows_; ++j) {
        double s = 0.0;
        for (std::size_t p = row_ptr_[j]; p < row_ptr_[j + 1]; ++p) s += values_[p] * values_[p];
        row_norms_sq_[j] = s;
    }
}

void SparseMatrix::check_row(std::size_t j) const {
    if (j >= n_rows_)
        throw IndexError("row " + std::to_string(j) + " out of range for " + std::to_string(n_rows_) + " rows");
}

RowView SparseMatrix::row(std::size_t j) const {
    check_row(j);
    const auto begin = row_ptr_[j];
    const auto len = row_ptr_[j + 1] - begin;
    return {std::span<const std::uint32_t>(col_idx_).subspan(begin, len),
            std::span<const double>(values_).subspan(begin, len)};
}

double SparseMatrix::row_dot(std::size_t j, std::span<const double> x) const {
    check_row(j);
    if (x.size() != n_cols_) throw ShapeError("row_dot: vector length does not match column count");
    double s = 0.0;
    for (std::size_t p = row_ptr_[j]; p < row_ptr_[j + 1]; ++p) s += values_[p] * x[col_idx_[p]];
    return s;
}

void SparseMatrix::row_axpy(std::size_t j, double s, std::span<double> x) const {
    check_row(j);
    if (x.size() != n_cols_) throw ShapeError("row_axpy: vector length does not match column count");
    for (std::size_t p = row_ptr_[j]; p < row_ptr_[j + 1]; ++p) x[col_idx_[p]] += s * values_[p];
}

Vector SparseMatrix::multiply(std::span<const double> x) const {
    if (x.size() != n_cols_) throw ShapeError("multiply: vector length does not match column count");
    Vector y(n_rows_, 0.0);
    for (std::size_t j = 0; j < n_rows_; ++j) {
        double s = 0.0;
        for (std::size_t p = row_ptr_[j]; p < row_ptr_[j + 1]; ++p) s += values_[p] * x[col_idx_[p]];
        y[j] = s;
    }
    return y;
}

Vector SparseMatrix::multiply_transpose(std::span<const double> y) const {
    if (y.size() != n_rows_) throw ShapeError("multiply_transpose: vector length does not match row count");
    Vector x(n_cols_, 0.0);
    for (std::size_t j = 0; j < n_rows_; ++j) {
        const double yj = y[j];
        for (std::size_t p = row_ptr_[j]; p < row_ptr_[j + 1]; ++p) x[col_idx_[p]] += values_[p] * yj;
    }
    return x;
}

std::vector<Triplet> SparseMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(nnz());
    for (std::size_t j = 0; j < n_rows_; ++j)
        for (std::size_t p = row_ptr_[j]; p < row_ptr_[j + 1]; ++p) out.push_back({j, col_idx_[p], values_[p]});
    return out;
}

SparseMatrix SparseMatrix::rows_reversed() const {
    std::vector<std::size_t> row_ptr(n_rows_ + 1, 0);
    std::vector<std::uint32_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(nnz());
    values.reserve(nnz());
    for (std::size_t r = 0; r < n_rows_; ++r) {
        const std::size_t j = n_rows_ - 1 - r;
        for (std::size_t p = row_ptr_[j]; p < row_ptr_[j + 1]; ++p) {
            col_idx.push_back(col_idx_[p]);
            values.push_back(values_[p]);
        }
        row_ptr[r + 1] = values.size();
    }
    return SparseMatrix(n_rows_, n_cols_, std::move(row_ptr), std::move(col_idx), std::move(values));
}

std::vector<double> SparseMatrix::to_dense() const {
    std::vector<double> dense(n_rows_ * n_cols_, 0.0);
    for (std::size_t j = 0; j < n_rows_; ++j)
        for (std::size_t p = row_ptr_[j]; p < row_ptr_[j + 1]; ++p) dense[j * n_cols_ + col_idx_[p]] = values_[p];
    return dense;
}

double SparseMatrix::mean_row_nnz() const {
    return n_rows_ == 0 ? 0.0 : static_cast<double>(nnz()) / static_cast<double>(n_rows_);
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("distance: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace kaczmarz
