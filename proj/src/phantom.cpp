#include "kaczmarz/errors.hpp"
#include "kaczmarz/rng.hpp"
#include "kaczmarz/tomo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace kaczmarz {

namespace {

struct Ellipse {
    double intensity;
    double a;
    double b;
    double x0;
    double y0;
    double phi_deg;
};

// Modified Shepp-Logan (Toft): skull intensity 1, background 0.
constexpr std::array<Ellipse, 10> kSheppLogan{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
}};

struct Grid {
    std::size_t n;
    std::vector<double> px;

    explicit Grid(std::size_t size) : n(size), px(size * size, 0.0) {}

    double& at(std::size_t row, std::size_t col) { return px[col * n + row]; }

    // Pixel centre in [-1, 1]^2, y pointing up.
    double x(std::size_t col) const { return (2.0 * static_cast<double>(col) + 1.0) / static_cast<double>(n) - 1.0; }
    double y(std::size_t row) const { return 1.0 - (2.0 * static_cast<double>(row) + 1.0) / static_cast<double>(n); }
};

void clamp_unit(std::vector<double>& v) {
    for (auto& e : v) e = std::clamp(e, 0.0, 1.0);
}

void rescale_unit(std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double a = *lo;
    const double span = *hi - *lo;
    if (span <= 0.0) return;
    for (auto& e : v) e = (e - a) / span;
}

Grid shepp_logan(std::size_t n) {
    Grid g(n);
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t row = 0; row < n; ++row) {
            const double x = g.x(col);
            const double y = g.y(row);
            double v = 0.0;
            for (const auto& e : kSheppLogan) {
                const double phi = e.phi_deg * std::numbers::pi / 180.0;
                const double c = std::cos(phi);
                const double s = std::sin(phi);
                const double u = (x - e.x0) * c + (y - e.y0) * s;
                const double w = -(x - e.x0) * s + (y - e.y0) * c;
                if (u * u / (e.a * e.a) + w * w / (e.b * e.b) <= 1.0) v += e.intensity;
            }
            g.at(row, col) = v;
        }
    }
    return g;
}

Grid smooth(std::size_t n, Rng& rng) {
    Grid g(n);
    struct Bump {
        double cx, cy, width, amp;
    };
    std::array<Bump, 4> bumps{};
    for (auto& b : bumps) {
        b.cx = rng.uniform(-0.5, 0.5);
        b.cy = rng.uniform(-0.5, 0.5);
        b.width = rng.uniform(0.15, 0.4);
        b.amp = rng.uniform(0.5, 1.0);
    }
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t row = 0; row < n; ++row) {
            double v = 0.0;
            for (const auto& b : bumps) {
                const double dx = g.x(col) - b.cx;
                const double dy = g.y(row) - b.cy;
                v += b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.width * b.width));
            }
            g.at(row, col) = v;
        }
    }
    const double peak = *std::max_element(g.px.begin(), g.px.end());
    for (auto& e : g.px) e /= peak;
    return g;
}

struct Disk {
    double cx, cy, r;
    double level;
};

void paint(Grid& g, const Disk& d) {
    for (std::size_t col = 0; col < g.n; ++col) {
        for (std::size_t row = 0; row < g.n; ++row) {
            const double dx = g.x(col) - d.cx;
            const double dy = g.y(row) - d.cy;
            if (dx * dx + dy * dy <= d.r * d.r) g.at(row, col) = d.level;
        }
    }
}

Grid binary(std::size_t n, Rng& rng) {
    Grid g(n);
    const std::size_t count = std::max<std::size_t>(8, n / 4);
    for (std::size_t i = 0; i < count; ++i) {
        Disk d{};
        d.r = rng.uniform(0.04, 0.16);
        // Keep every disk inside the inscribed circle.
        const double reach = 0.9 - d.r;
        const double rad = reach * std::sqrt(rng.uniform());
        const double ang = 2.0 * std::numbers::pi * rng.uniform();
        d.cx = rad * std::cos(ang);
        d.cy = rad * std::sin(ang);
        d.level = 1.0;
        paint(g, d);
    }
    return g;
}

// Non-overlapping disks on a zero background, each at one of the given levels.
Grid disk_packing(std::size_t n, Rng& rng, std::span<const double> levels) {
    Grid g(n);
    std::vector<Disk> placed;
    const std::size_t target = std::max<std::size_t>(12, n / 3);
    for (std::size_t attempt = 0; attempt < 200 * target && placed.size() < target; ++attempt) {
        Disk d{};
        d.r = rng.uniform(0.05, 0.22);
        const double reach = 0.92 - d.r;
        const double rad = reach * std::sqrt(rng.uniform());
        const double ang = 2.0 * std::numbers::pi * rng.uniform();
        d.cx = rad * std::cos(ang);
        d.cy = rad * std::sin(ang);
        d.level = levels[rng.below(levels.size())];
        const bool overlaps = std::any_of(placed.begin(), placed.end(), [&](const Disk& o) {
            const double dx = o.cx - d.cx;
            const double dy = o.cy - d.cy;
            return std::sqrt(dx * dx + dy * dy) < o.r + d.r + 0.01;
        });
        if (overlaps) continue;
        placed.push_back(d);
        paint(g, d);
    }
    return g;
}

Grid gaussian_blur(const Grid& in, double sigma_px) {
    const auto radius = static_cast<long>(std::ceil(3.0 * sigma_px));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (long i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma_px * sigma_px));
        kernel[static_cast<std::size_t>(i + radius)] = v;
        total += v;
    }
    for (auto& k : kernel) k /= total;

    const auto n = static_cast<long>(in.n);
    auto clampi = [n](long i) { return std::clamp(i, 0L, n - 1); };
    Grid tmp(in.n);
    Grid out(in.n);
    for (long col = 0; col < n; ++col) {
        for (long row = 0; row < n; ++row) {
            double s = 0.0;
            for (long k = -radius; k <= radius; ++k)
                s += kernel[static_cast<std::size_t>(k + radius)] * in.px[clampi(col + k) * n + row];
            tmp.px[col * n + row] = s;
        }
    }
    for (long col = 0; col < n; ++col) {
        for (long row = 0; row < n; ++row) {
            double s = 0.0;
            for (long k = -radius; k <= radius; ++k)
                s += kernel[static_cast<std::size_t>(k + radius)] * tmp.px[col * n + clampi(row + k)];
            out.px[col * n + row] = s;
        }
    }
    return out;
}

Grid grains(std::size_t n, Rng& rng) {
    const std::size_t k = grain_count(n);
    std::vector<double> sx(k), sy(k), level(k);
    for (std::size_t i = 0; i < k; ++i) {
        sx[i] = rng.uniform(0.0, static_cast<double>(n));
        sy[i] = rng.uniform(0.0, static_cast<double>(n));
        level[i] = rng.uniform();
    }
    Grid g(n);
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t row = 0; row < n; ++row) {
            const double cx = static_cast<double>(col) + 0.5;
            const double cy = static_cast<double>(row) + 0.5;
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < k; ++i) {
                const double d = (cx - sx[i]) * (cx - sx[i]) + (cy - sy[i]) * (cy - sy[i]);
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            g.at(row, col) = level[best];
        }
    }
    return g;
}

} // namespace

std::string_view to_string(PhantomKind k) {
    switch (k) {
    case PhantomKind::shepplogan: return "shepplogan";
    case PhantomKind::smooth: return "smooth";
    case PhantomKind::binary: return "binary";
    case PhantomKind::threephases: return "threephases";
    case PhantomKind::threephasessmooth: return "threephasessmooth";
    case PhantomKind::fourphases: return "fourphases";
    case PhantomKind::grains: return "grains";
    }
    return "unknown";
}

const std::vector<PhantomKind>& all_phantom_kinds() {
    static const std::vector<PhantomKind> kinds{PhantomKind::shepplogan,  PhantomKind::smooth,
                                                PhantomKind::binary,      PhantomKind::threephases,
                                                PhantomKind::threephasessmooth, PhantomKind::fourphases,
                                                PhantomKind::grains};
    return kinds;
}

PhantomKind phantom_kind_from_string(std::string_view name) {
    for (auto k : all_phantom_kinds()) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown phantom kind: " + std::string(name));
}

std::size_t grain_count(std::size_t size) { return (size + 3) / 4; }

Phantom make_phantom(PhantomKind kind, std::size_t size, std::uint64_t seed) {
    if (size < 16) throw ConfigError("phantoms need an image size of at least 16");
    Rng rng(seed);
    static constexpr std::array<double, 2> kThree{0.5, 1.0};
    static constexpr std::array<double, 3> kFour{1.0 / 3.0, 2.0 / 3.0, 1.0};

    Grid g(size);
    switch (kind) {
    case PhantomKind::shepplogan: g = shepp_logan(size); break;
    case PhantomKind::smooth: g = smooth(size, rng); break;
    case PhantomKind::binary: g = binary(size, rng); break;
    case PhantomKind::threephases: g = disk_packing(size, rng, kThree); break;
    case PhantomKind::fourphases: g = disk_packing(size, rng, kFour); break;
    case PhantomKind::threephasessmooth: {
        g = gaussian_blur(disk_packing(size, rng, kThree), std::max(1.0, static_cast<double>(size) / 64.0));
        rescale_unit(g.px);
        break;
    }
    case PhantomKind::grains: g = grains(size, rng); break;
    }
    clamp_unit(g.px);
    return Phantom{kind, size, seed, std::move(g.px)};
}

} // namespace kaczmarz
