#include "kaczmarz/tomo.hpp"

#include "kaczmarz/errors.hpp"
#include "kaczmarz/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace kaczmarz {

namespace {

double parse_double(std::string_view s) {
    const std::string str(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(str, &used);
    } catch (const std::exception&) {
        throw ConfigError("invalid number in angle spec: '" + str + "'");
    }
    if (used != str.size()) throw ConfigError("invalid number in angle spec: '" + str + "'");
    return v;
}

} // namespace

void Geometry::validate() const {
    if (image_size < 2) throw ConfigError("image size must be at least 2");
    if (angles_deg.empty()) throw ConfigError("at least one projection angle is required");
    for (double a : angles_deg) {
        if (!(a >= 0.0 && a < 180.0)) throw ConfigError("projection angles must lie in [0, 180)");
    }
    if (n_rays < 1) throw ConfigError("at least one ray per projection is required");
    if (!(detector_span > 0.0)) throw ConfigError("detector span must be positive");
}

double Geometry::ray_offset(std::size_t i) const {
    if (n_rays == 1) return 0.0;
    const double half = 0.5 * detector_span * static_cast<double>(image_size);
    return -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n_rays - 1);
}

Geometry Geometry::standard(std::size_t image_size) {
    Geometry g;
    g.image_size = image_size;
    g.angles_deg = parse_angles("0:1.5:178.5");
    g.n_rays = static_cast<std::size_t>(std::lround(std::numbers::sqrt2 * static_cast<double>(image_size)));
    return g;
}

std::vector<double> parse_angles(std::string_view spec) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = spec.find(':', start);
        parts.push_back(spec.substr(start, pos == std::string_view::npos ? spec.npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (parts.size() != 3) throw ConfigError("angle spec must be start:step:stop, got '" + std::string(spec) + "'");
    const double first = parse_double(parts[0]);
    const double step = parse_double(parts[1]);
    const double last = parse_double(parts[2]);
    if (!(step > 0.0)) throw ConfigError("angle step must be positive");
    if (last < first) throw ConfigError("angle stop must not precede start");
    const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
    std::vector<double> angles(count);
    for (std::size_t i = 0; i < count; ++i) angles[i] = first + static_cast<double>(i) * step;
    return angles;
}

double cos_deg(double deg) {
    const double r = std::fmod(deg, 360.0);
    const double q = r < 0 ? r + 360.0 : r;
    if (q == 0.0) return 1.0;
    if (q == 90.0 || q == 270.0) return 0.0;
    if (q == 180.0) return -1.0;
    return std::cos(deg * std::numbers::pi / 180.0);
}

double sin_deg(double deg) { return cos_deg(deg - 90.0); }

std::vector<std::pair<std::uint32_t, double>> trace_ray(std::size_t image_size, double angle_deg, double offset) {
    const double half = 0.5 * static_cast<double>(image_size);
    const double c = cos_deg(angle_deg);
    const double s = sin_deg(angle_deg);
    const double px = offset * c;
    const double py = offset * s;
    const double dx = -s;
    const double dy = c;

    // Clip the line p + t d to the image square.
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    auto clip = [&](double p, double d) {
        if (d == 0.0) {
            // Half-open cells: a ray on the far border lies outside.
            if (p < -half || p >= half) {
                t_lo = 1.0;
                t_hi = -1.0;
            }
            return;
        }
        double a = (-half - p) / d;
        double b = (half - p) / d;
        if (a > b) std::swap(a, b);
        t_lo = std::max(t_lo, a);
        t_hi = std::min(t_hi, b);
    };
    clip(px, dx);
    clip(py, dy);
    std::vector<std::pair<std::uint32_t, double>> out;
    if (!(t_hi > t_lo)) return out;

    std::vector<double> ts{t_lo, t_hi};
    ts.reserve(2 * image_size + 4);
    for (std::size_t i = 0; i <= image_size; ++i) {
        const double line = -half + static_cast<double>(i);
        if (dx != 0.0) {
            const double t = (line - px) / dx;
            if (t > t_lo && t < t_hi) ts.push_back(t);
        }
        if (dy != 0.0) {
            const double t = (line - py) / dy;
            if (t > t_lo && t < t_hi) ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());

    const double min_len = 1e-12 * static_cast<double>(image_size);
    const auto n = static_cast<long>(image_size);
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const double len = ts[k + 1] - ts[k];
        if (len <= min_len) continue;
        const double tm = 0.5 * (ts[k] + ts[k + 1]);
        const double mx = px + tm * dx;
        const double my = py + tm * dy;
        const long col = std::clamp(static_cast<long>(std::floor(mx + half)), 0L, n - 1);
        const long row = std::clamp(n - 1 - static_cast<long>(std::floor(my + half)), 0L, n - 1);
        out.emplace_back(static_cast<std::uint32_t>(col * n + row), len);
    }
    std::sort(out.begin(), out.end());
    // Merge pieces of the same pixel split by nearly coincident crossings.
    std::vector<std::pair<std::uint32_t, double>> merged;
    merged.reserve(out.size());
    for (const auto& e : out) {
        if (!merged.empty() && merged.back().first == e.first)
            merged.back().second += e.second;
        else
            merged.push_back(e);
    }
    return merged;
}

SparseMatrix build_matrix(const Geometry& g) {
    g.validate();
    const std::size_t m = g.n_measurements();
    const std::size_t n = g.n_pixels();
    std::vector<std::size_t> row_ptr(m + 1, 0);
    std::vector<std::uint32_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(m * g.image_size * 3 / 2);
    values.reserve(m * g.image_size * 3 / 2);

    std::size_t row = 0;
    for (double angle : g.angles_deg) {
        for (std::size_t i = 0; i < g.n_rays; ++i, ++row) {
            for (const auto& [pixel, len] : trace_ray(g.image_size, angle, g.ray_offset(i))) {
                col_idx.push_back(pixel);
                values.push_back(len);
            }
            row_ptr[row + 1] = values.size();
        }
    }
    return SparseMatrix(m, n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

NoisyData add_noise(std::span<const double> b_star, double eta, std::uint64_t seed) {
    if (!(eta >= 0.0)) throw ConfigError("noise level must be non-negative");
    NoisyData out;
    out.b.assign(b_star.begin(), b_star.end());
    if (eta == 0.0) return out;
    const double nb = norm2(b_star);
    if (nb == 0.0) throw DegenerateDataError("cannot scale relative noise for zero data");
    out.sigma = eta * nb / std::sqrt(static_cast<double>(b_star.size()));
    Rng rng(seed);
    for (auto& v : out.b) v += out.sigma * rng.normal();
    return out;
}

TomoProblem make_problem(SparseMatrix A, Vector x_star, double eta, std::uint64_t noise_seed) {
    TomoProblem p;
    p.b_star = A.multiply(x_star);
    auto noisy = add_noise(p.b_star, eta, noise_seed);
    p.A = std::move(A);
    p.x_star = std::move(x_star);
    p.b = std::move(noisy.b);
    p.sigma = noisy.sigma;
    p.eta = eta;
    return p;
}

} // namespace kaczmarz
