#include "kaczmarz/errors.hpp"
#include "kaczmarz/io.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <sstream>

using namespace kaczmarz;
using namespace kaczmarz::testing;

TEST_CASE("PGM round trip in both encodings") {
    // 2x2 column-major: (row 0, col 0) = 0, (row 1, col 0) = 1, (row 0, col 1) = 0.5, (row 1, col 1) = 2 (clamped)
    std::vector<double> px{0.0, 1.0, 0.5, 2.0};
    for (auto fmt : {PgmFormat::ascii, PgmFormat::binary}) {
        std::stringstream ss;
        write_pgm(ss, px, 2, fmt);
        const auto img = read_pgm(ss);
        CHECK(img.width == 2);
        CHECK(img.height == 2);
        CHECK(img.max_value == 255);
        CHECK(img.data == std::vector<int>{0, 128, 255, 255});
    }
    std::stringstream bad("P7\n1 1\n255\n0\n");
    CHECK_THROWS_AS(read_pgm(bad), IoError);
}

TEST_CASE("Matrix Market round trip") {
    const auto A = random_matrix(7, 5, 3, 0.5);
    std::stringstream ss;
    write_matrix_market(ss, A);
    CHECK(ss.str().rfind("%%MatrixMarket matrix coordinate real general", 0) == 0);
    CHECK(read_matrix_market(ss) == A);
    std::stringstream pat("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n");
    CHECK_THROWS_AS(read_matrix_market(pat), IoError);
}

TEST_CASE("vector CSV and raw round trips") {
    const auto v = random_vector(33, 5);
    std::stringstream csv;
    write_vector_csv(csv, v);
    CHECK(read_vector_csv(csv) == v);
    std::stringstream raw;
    write_vector_raw(raw, v);
    const auto s = raw.str();
    CHECK(s.substr(0, 8) == "KZSINO01");
    CHECK(s.size() == 16 + 8 * 33);
    CHECK(read_vector_raw(raw) == v);
    std::stringstream junk("NOTASINO");
    CHECK_THROWS_AS(read_vector_raw(junk), IoError);
}
