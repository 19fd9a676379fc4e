#pragma once

#include "kaczmarz/sparse_matrix.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace kaczmarz {

enum class PgmFormat { ascii, binary };  // P2, P5

/// Writes an N x N column-major image, mapping [0,1] to 0..255 with clamping.
void write_pgm(std::ostream& os, std::span<const double> pixels, std::size_t size, PgmFormat fmt = PgmFormat::binary);
void write_pgm(const std::filesystem::path& path, std::span<const double> pixels, std::size_t size,
               PgmFormat fmt = PgmFormat::binary);

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    int max_value = 255;
    std::vector<int> data;  // row-major as stored in the file
};

GrayImage read_pgm(std::istream& is);
GrayImage read_pgm(const std::filesystem::path& path);

/// Matrix Market coordinate real general, 1-based indices.
void write_matrix_market(std::ostream& os, const SparseMatrix& A);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& A);
SparseMatrix read_matrix_market(std::istream& is);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

/// One value per line.
void write_vector_csv(std::ostream& os, std::span<const double> v);
std::vector<double> read_vector_csv(std::istream& is);

/// Raw sinogram: 8-byte magic "KZSINO01", uint64 count, then count doubles,
/// all little-endian.
void write_vector_raw(std::ostream& os, std::span<const double> v);
std::vector<double> read_vector_raw(std::istream& is);

} // namespace kaczmarz
