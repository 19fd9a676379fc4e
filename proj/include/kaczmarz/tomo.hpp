#pragma once

#include "kaczmarz/sparse_matrix.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kaczmarz {

/// 2-D parallel-beam scan geometry.
///
/// The image is an N x N grid of unit pixels centred on the origin. For a
/// projection angle theta, ray i passes through t_i (cos theta, sin theta) in
/// direction (-sin theta, cos theta), where the offsets t_i are equally spaced
/// over [-span N / 2, span N / 2] (a single ray sits at offset 0).
struct Geometry {
    std::size_t image_size = 128;
    std::vector<double> angles_deg;
    std::size_t n_rays = 181;
    double detector_span = 1.4142135623730951;  // in image widths

    std::size_t n_pixels() const { return image_size * image_size; }
    std::size_t n_measurements() const { return angles_deg.size() * n_rays; }

    /// Throws ConfigError when the geometry is unusable.
    void validate() const;

    /// Offset of ray i from the rotation centre, in pixel units.
    double ray_offset(std::size_t i) const;

    /// Default setup: 0:1.5:178.5 degrees, round(sqrt(2) N) rays.
    static Geometry standard(std::size_t image_size);
};

/// Parses an inclusive "start:step:stop" angle list in degrees.
std::vector<double> parse_angles(std::string_view spec);

/// cos and sin of an angle in degrees, exact at multiples of 90 degrees.
double cos_deg(double deg);
double sin_deg(double deg);

/// Line-model system matrix: entry (ray, pixel) is the length of the ray inside
/// the pixel. Rows are ordered angle-major, then ray index; pixels are flattened
/// column-major (index = col * N + row, row 0 at the top of the image).
SparseMatrix build_matrix(const Geometry& g);

/// Intersections of one ray with the pixel grid as (pixel index, length),
/// sorted by pixel index.
std::vector<std::pair<std::uint32_t, double>> trace_ray(std::size_t image_size, double angle_deg,
                                                       double offset);

enum class PhantomKind { shepplogan, smooth, binary, threephases, threephasessmooth, fourphases, grains };

std::string_view to_string(PhantomKind k);

/// Throws ConfigError on unknown names.
PhantomKind phantom_kind_from_string(std::string_view name);

const std::vector<PhantomKind>& all_phantom_kinds();

struct Phantom {
    PhantomKind kind = PhantomKind::shepplogan;
    std::size_t size = 0;
    std::uint64_t seed = 0;
    std::vector<double> pixels;  // column-major, values in [0, 1]

    double at(std::size_t row, std::size_t col) const { return pixels[col * size + row]; }
};

/// Deterministic in (kind, size, seed). Structured kinds need size >= 16.
Phantom make_phantom(PhantomKind kind, std::size_t size, std::uint64_t seed);

/// Number of Voronoi sites in the grains phantom: ceil(size / 4).
std::size_t grain_count(std::size_t size);

struct NoisyData {
    Vector b;
    double sigma = 0.0;
};

/// Adds white Gaussian noise with sigma = eta ||b_star|| / sqrt(m), so that
/// E ||db||^2 / ||b_star||^2 = eta^2.
NoisyData add_noise(std::span<const double> b_star, double eta, std::uint64_t seed);

struct TomoProblem {
    SparseMatrix A;
    Vector x_star;
    Vector b_star;
    Vector b;
    double eta = 0.0;
    double sigma = 0.0;
};

/// Builds b_star = A x_star and the noisy sinogram. The noise stream is keyed
/// by noise_seed only.
TomoProblem make_problem(SparseMatrix A, Vector x_star, double eta, std::uint64_t noise_seed);

} // namespace kaczmarz
