#include "kaczmarz/errors.hpp"
#include "kaczmarz/tomo.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

using namespace kaczmarz;
using namespace kaczmarz::testing;

namespace {

// Chord of the line {p + t d} through the square [-h, h]^2, found by
// intersecting the line with each of the four edges and taking the distance
// between the extreme intersection points.
double chord_oracle(double h, double angle_deg, double offset) {
    const double th = angle_deg * std::numbers::pi / 180.0;
    const double px = offset * std::cos(th), py = offset * std::sin(th);
    const double dx = -std::sin(th), dy = std::cos(th);
    std::vector<double> ts;
    // Edges x = +-h (y in [-h, h]) and y = +-h (x in [-h, h]).
    for (double e : {-h, h}) {
        if (std::abs(dx) > 1e-15) {
            const double t = (e - px) / dx;
            const double y = py + t * dy;
            if (y >= -h - 1e-12 && y <= h + 1e-12) ts.push_back(t);
        }
        if (std::abs(dy) > 1e-15) {
            const double t = (e - py) / dy;
            const double x = px + t * dx;
            if (x >= -h - 1e-12 && x <= h + 1e-12) ts.push_back(t);
        }
    }
    if (ts.size() < 2) return 0.0;
    const auto [lo, hi] = std::minmax_element(ts.begin(), ts.end());
    return *hi - *lo;
}

} // namespace

TEST_CASE("axis-aligned ray through a 2x2 image") {
    Geometry g;
    g.image_size = 2;
    g.angles_deg = {0.0};
    g.n_rays = 1;
    const auto A = build_matrix(g);
    REQUIRE(A.rows() == 1);
    REQUIRE(A.cols() == 4);
    const auto row = A.row(0);
    REQUIRE(row.size() == 2);
    CHECK(row.values[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(row.values[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("matrix dimensions, ordering and geometric bounds") {
    const auto g = Geometry::standard(16);
    CHECK(g.n_rays == 23);
    CHECK(g.angles_deg.size() == 120);
    const auto A = build_matrix(g);
    CHECK(A.rows() == 120 * 23);
    CHECK(A.cols() == 256);
    for (double v : A.values()) CHECK(v > 0.0);
    for (std::size_t j = 0; j < A.rows(); ++j) {
        double s = 0.0;
        for (double v : A.row(j).values) s += v;
        CHECK(s <= 16 * std::numbers::sqrt2 + 1e-9);
    }
}

TEST_CASE("constant image ray sums equal analytic chord lengths") {
    Geometry g;
    g.image_size = 8;
    g.angles_deg = parse_angles("0:15:165");
    g.n_rays = 11;
    const auto A = build_matrix(g);
    const auto sums = A.multiply(std::vector<double>(64, 1.0));
    std::size_t r = 0;
    for (double angle : g.angles_deg) {
        for (std::size_t i = 0; i < g.n_rays; ++i, ++r) {
            CHECK(sums[r] == doctest::Approx(chord_oracle(4.0, angle, g.ray_offset(i))).epsilon(1e-12));
        }
    }
}

TEST_CASE("quarter-turn of the scan permutes ray sums of a rotation-symmetric image") {
    const std::size_t N = 16;
    std::vector<double> disc(N * N);
    for (std::size_t c = 0; c < N; ++c)
        for (std::size_t r = 0; r < N; ++r) {
            const double x = c + 0.5 - N / 2.0, y = r + 0.5 - N / 2.0;
            disc[c * N + r] = (x * x + y * y <= 30.0) ? 1.0 : 0.25;
        }
    Geometry g;
    g.image_size = N;
    g.angles_deg = {0.0, 90.0};
    g.n_rays = 20;
    const auto sums = build_matrix(g).multiply(disc);
    for (std::size_t i = 0; i < g.n_rays; ++i) CHECK(std::abs(sums[i] - sums[g.n_rays + i]) <= 1e-10);
}

TEST_CASE("geometry validation and angle parsing") {
    CHECK(parse_angles("0:1.5:178.5").size() == 120);
    CHECK(parse_angles("0:1.5:178.5").back() == 178.5);
    CHECK(parse_angles("0:3:177").size() == 60);
    CHECK_THROWS_AS(parse_angles("0:0:10"), ConfigError);
    CHECK_THROWS_AS(parse_angles("0:1"), ConfigError);
    CHECK_THROWS_AS(parse_angles("a:1:2"), ConfigError);

    Geometry g;
    g.image_size = 1;
    g.angles_deg = {0.0};
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g.image_size = 4;
    g.angles_deg = {180.0};
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g.angles_deg = {};
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g.angles_deg = {10.0};
    g.n_rays = 0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("exact trig at quarter turns") {
    CHECK(cos_deg(90.0) == 0.0);
    CHECK(sin_deg(0.0) == 0.0);
    CHECK(sin_deg(90.0) == 1.0);
    CHECK(cos_deg(0.0) == 1.0);
}

TEST_CASE("phantoms lie in [0,1] and are deterministic") {
    for (auto kind : all_phantom_kinds()) {
        CAPTURE(to_string(kind));
        const auto a = make_phantom(kind, 64, 7);
        const auto b = make_phantom(kind, 64, 7);
        CHECK(a.pixels == b.pixels);
        CHECK(a.pixels.size() == 64 * 64);
        for (double v : a.pixels) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(*std::max_element(a.pixels.begin(), a.pixels.end()) > 0.0);
        CHECK(phantom_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(phantom_kind_from_string("pumpkin"), ConfigError);
    CHECK_THROWS_AS(make_phantom(PhantomKind::grains, 8, 0), ConfigError);
}

TEST_CASE("shepplogan has zero background and unit maximum") {
    const auto p = make_phantom(PhantomKind::shepplogan, 128, 0);
    CHECK(p.at(0, 0) == 0.0);
    CHECK(p.at(127, 127) == 0.0);
    CHECK(*std::max_element(p.pixels.begin(), p.pixels.end()) == 1.0);
}

TEST_CASE("grains phantom has one constant intensity per Voronoi cell") {
    const auto p = make_phantom(PhantomKind::grains, 128, 3);
    CHECK(grain_count(128) == 32);
    const std::set<double> levels(p.pixels.begin(), p.pixels.end());
    CHECK(levels.size() == grain_count(128));
}

TEST_CASE("level sets of the phase phantoms") {
    const auto three = make_phantom(PhantomKind::threephases, 64, 5);
    CHECK(std::set<double>(three.pixels.begin(), three.pixels.end()).size() == 3);
    const auto four = make_phantom(PhantomKind::fourphases, 64, 5);
    CHECK(std::set<double>(four.pixels.begin(), four.pixels.end()).size() == 4);
    const auto bin = make_phantom(PhantomKind::binary, 64, 5);
    CHECK(std::set<double>(bin.pixels.begin(), bin.pixels.end()) == std::set<double>{0.0, 1.0});
}

TEST_CASE("add_noise scaling") {
    const auto b = random_vector(100, 1);
    const auto none = add_noise(b, 0.0, 3);
    CHECK(none.b == b);
    CHECK(none.sigma == 0.0);

    const auto noisy = add_noise(b, 8e-3, 3);
    CHECK(noisy.sigma == 8e-3 * norm2(b) / std::sqrt(100.0));

    CHECK_THROWS_AS(add_noise(std::vector<double>(5, 0.0), 0.1, 1), DegenerateDataError);
    CHECK_THROWS_AS(add_noise(b, -1.0, 1), ConfigError);
}

TEST_CASE("noise level matches eta^2 in expectation") {
    const auto b = random_vector(500, 9);
    const double eta = 8e-3;
    double acc = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto nd = add_noise(b, eta, 100 + s);
        acc += std::pow(distance(nd.b, b) / norm2(b), 2);
    }
    CHECK(std::abs(acc / 200.0 / (eta * eta) - 1.0) <= 0.05);
}

TEST_CASE("per-instance noise variance for large m") {
    const auto b = random_vector(20000, 4);
    const auto nd = add_noise(b, 0.05, 17);
    double mean = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) mean += nd.b[i] - b[i];
    mean /= b.size();
    double var = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) var += std::pow(nd.b[i] - b[i] - mean, 2);
    var /= (b.size() - 1);
    CHECK(std::abs(var / (nd.sigma * nd.sigma) - 1.0) <= 0.2);
}

TEST_CASE("make_problem invariants") {
    Geometry g;
    g.image_size = 16;
    g.angles_deg = parse_angles("0:10:170");
    g.n_rays = 23;
    auto ph = make_phantom(PhantomKind::grains, 16, 1);
    const auto P = make_problem(build_matrix(g), ph.pixels, 0.01, 2);
    const auto ax = P.A.multiply(P.x_star);
    CHECK(distance(ax, P.b_star) <= 1e-12 * norm2(P.b_star));
    CHECK(P.sigma == 0.01 * norm2(P.b_star) / std::sqrt(double(P.A.rows())));
    CHECK(P.b != P.b_star);
}
