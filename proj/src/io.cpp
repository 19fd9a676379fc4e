#include "kaczmarz/io.hpp"

#include "kaczmarz/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace kaczmarz {

namespace {

constexpr char kRawMagic[8] = {'K', 'Z', 'S', 'I', 'N', 'O', '0', '1'};

int to_gray(double v) {
    const double c = std::clamp(std::isnan(v) ? 0.0 : v, 0.0, 1.0);
    return static_cast<int>(std::lround(c * 255.0));
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path.string());
    return is;
}

template <typename T>
void put_le(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw IoError("truncated raw vector");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

// Next whitespace-separated PGM header token, skipping comments.
std::string pgm_token(std::istream& is) {
    std::string tok;
    char c;
    while (is.get(c)) {
        if (c == '#') {
            std::string skip;
            std::getline(is, skip);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(c);
    }
    if (tok.empty()) throw IoError("truncated PGM header");
    return tok;
}

} // namespace

void write_pgm(std::ostream& os, std::span<const double> pixels, std::size_t size, PgmFormat fmt) {
    if (pixels.size() != size * size) throw ShapeError("write_pgm: pixel count does not match size");
    os << (fmt == PgmFormat::binary ? "P5" : "P2") << '\n' << size << ' ' << size << "\n255\n";
    for (std::size_t row = 0; row < size; ++row) {
        for (std::size_t col = 0; col < size; ++col) {
            const int g = to_gray(pixels[col * size + row]);
            if (fmt == PgmFormat::binary) {
                os.put(static_cast<char>(static_cast<unsigned char>(g)));
            } else {
                os << g << (col + 1 == size ? '\n' : ' ');
            }
        }
    }
    if (!os) throw IoError("failed writing PGM");
}

void write_pgm(const std::filesystem::path& path, std::span<const double> pixels, std::size_t size, PgmFormat fmt) {
    auto os = open_out(path, true);
    write_pgm(os, pixels, size, fmt);
}

GrayImage read_pgm(std::istream& is) {
    const std::string magic = pgm_token(is);
    if (magic != "P2" && magic != "P5") throw IoError("not a PGM file");
    GrayImage img;
    img.width = std::stoul(pgm_token(is));
    img.height = std::stoul(pgm_token(is));
    img.max_value = std::stoi(pgm_token(is));
    if (img.max_value <= 0 || img.max_value > 255) throw IoError("unsupported PGM max value");
    img.data.resize(img.width * img.height);
    if (magic == "P5") {
        for (auto& v : img.data) {
            const int c = is.get();
            if (c == EOF) throw IoError("truncated PGM data");
            v = c;
        }
    } else {
        for (auto& v : img.data) {
            if (!(is >> v)) throw IoError("truncated PGM data");
        }
    }
    return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_pgm(is);
}

void write_matrix_market(std::ostream& os, const SparseMatrix& A) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
    const auto old_precision = os.precision(17);
    for (const auto& t : A.triplets()) os << (t.row + 1) << ' ' << (t.col + 1) << ' ' << t.value << '\n';
    os.precision(old_precision);
    if (!os) throw IoError("failed writing Matrix Market data");
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& A) {
    auto os = open_out(path, false);
    write_matrix_market(os, A);
}

SparseMatrix read_matrix_market(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0) throw IoError("missing Matrix Market banner");
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "coordinate" || (field != "real" && field != "integer") ||
        symmetry != "general")
        throw IoError("only 'matrix coordinate real general' Matrix Market files are supported");
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::size_t rows = 0, cols = 0, entries = 0;
    if (!(std::istringstream(line) >> rows >> cols >> entries)) throw IoError("bad Matrix Market size line");
    std::vector<Triplet> triplets;
    triplets.reserve(entries);
    for (std::size_t i = 0; i < entries; ++i) {
        std::size_t r = 0, c = 0;
        double v = 0.0;
        if (!(is >> r >> c >> v)) throw IoError("truncated Matrix Market data");
        if (r == 0 || c == 0) throw IndexError("Matrix Market indices are 1-based");
        triplets.push_back({r - 1, c - 1, v});
    }
    return SparseMatrix::from_triplets(rows, cols, triplets);
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_matrix_market(is);
}

void write_vector_csv(std::ostream& os, std::span<const double> v) {
    const auto old_precision = os.precision(17);
    for (double e : v) os << e << '\n';
    os.precision(old_precision);
    if (!os) throw IoError("failed writing CSV");
}

std::vector<double> read_vector_csv(std::istream& is) {
    std::vector<double> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        try {
            out.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw IoError("bad CSV value: '" + line + "'");
        }
    }
    return out;
}

void write_vector_raw(std::ostream& os, std::span<const double> v) {
    os.write(kRawMagic, sizeof(kRawMagic));
    put_le<std::uint64_t>(os, v.size());
    for (double e : v) put_le(os, e);
    if (!os) throw IoError("failed writing raw vector");
}

std::vector<double> read_vector_raw(std::istream& is) {
    char magic[sizeof(kRawMagic)];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kRawMagic, sizeof(magic)) != 0)
        throw IoError("bad raw vector magic");
    const auto n = get_le<std::uint64_t>(is);
    std::vector<double> out(n);
    for (auto& e : out) e = get_le<double>(is);
    return out;
}

} // namespace kaczmarz
