#include "kaczmarz/io.hpp"
#include "kaczmarz/tomo.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace kaczmarz;

namespace {

fs::path scratch() {
    const auto dir = fs::temp_directory_path() / ("kaczmarz_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

int cli(const std::string& args) {
    const std::string cmd = std::string("\"") + KACZMARZ_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("phantom command writes a deterministic binary PGM") {
    const auto dir = scratch();
    const auto a = dir / "a.pgm", b = dir / "b.pgm";
    REQUIRE(cli("phantom --kind shepplogan --size 128 --out " + a.string()) == 0);
    REQUIRE(cli("phantom --kind shepplogan --size 128 --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).rfind("P5", 0) == 0);
    const auto img = read_pgm(a);
    CHECK(img.width == 128);
    CHECK(img.height == 128);
    CHECK(*std::max_element(img.data.begin(), img.data.end()) == 255);
    fs::remove_all(dir);
}

TEST_CASE("run command exports one history row per sweep") {
    const auto dir = scratch();
    const auto out = dir / "r";
    REQUIRE(cli("run --kind grains --size 32 --angles 0:6:174 --method kaczmarz --rule none --maxits 50 --seed 4 --out " +
                out.string()) == 0);
    const auto csv = slurp(out.string() + ".csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 51);
    CHECK(fs::exists(out.string() + ".json"));
    CHECK(fs::exists(out.string() + ".pgm"));
    CHECK(fs::exists(out.string() + ".sino.csv"));

    const auto again = dir / "r2";
    REQUIRE(cli("run --kind grains --size 32 --angles 0:6:174 --method kaczmarz --rule none --maxits 50 --seed 4 --out " +
                again.string()) == 0);
    CHECK(slurp(out.string() + ".json") == slurp(again.string() + ".json"));
    CHECK(csv == slurp(again.string() + ".csv"));
    CHECK(slurp(out.string() + ".pgm") == slurp(again.string() + ".pgm"));
    fs::remove_all(dir);
}

TEST_CASE("twin and msa runs succeed") {
    const auto dir = scratch();
    CHECK(cli("run --kind grains --size 32 --angles 0:6:174 --method twin --out " + (dir / "t").string()) == 0);
    CHECK(cli("run --kind grains --size 32 --angles 0:6:174 --method msa --raw-sinogram --out " + (dir / "m").string()) == 0);
    CHECK(fs::exists(dir / "m.sino"));
    fs::remove_all(dir);
}

TEST_CASE("bench and spectral commands") {
    const auto dir = scratch();
    CHECK(cli("bench --kind grains,binary --size 24 --angles 0:6:174 --runs 2 --maxits 40 --out " + (dir / "b").string()) == 0);
    CHECK(fs::exists(dir / "b" / "scores.csv"));
    CHECK(fs::exists(dir / "b" / "runs.jsonl"));
    CHECK(cli("spectral --size 12x8 --trials 2 --out " + (dir / "s.json").string()) == 0);
    CHECK(slurp(dir / "s.json").find("\"pass\": true") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("exit codes") {
    const auto dir = scratch();
    CHECK(cli("run --kind pumpkin --out " + (dir / "x").string()) == 1);
    CHECK(cli("run --omega 2.5 --size 16 --out " + (dir / "x").string()) == 1);
    CHECK(cli("run --size 16 --method kaczmarz --rule lcurve --out " + (dir / "x").string()) == 1);
    CHECK(cli("spectral --size 4x8") == 1);
    std::ofstream(dir / "plain_file") << "x";
    CHECK(cli("phantom --kind grains --size 32 --out " + (dir / "plain_file" / "p.pgm").string()) == 3);
    fs::remove_all(dir);
}
