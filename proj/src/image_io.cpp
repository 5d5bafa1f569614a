#include "pgc/image_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pgc/error.hpp"

namespace pgc {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string() + " for reading");
    return is;
}

// Netpbm header token: skips whitespace and '#' comments.
std::size_t read_header_int(std::istream& is, const char* what) {
    int ch = is.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = is.get();
        } else if (std::isspace(ch)) {
            ch = is.get();
        } else {
            break;
        }
    }
    if (ch == EOF || !std::isdigit(ch)) {
        throw FormatError(std::string("netpbm header: missing ") + what);
    }
    std::size_t value = 0;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + static_cast<std::size_t>(ch - '0');
        if (value > (1u << 24)) throw FormatError(std::string("netpbm header: ") + what + " too large");
        ch = is.get();
    }
    // Exactly one whitespace byte separates the header from the raster.
    if (ch == EOF || !std::isspace(ch)) {
        throw FormatError(std::string("netpbm header: malformed ") + what);
    }
    return value;
}

void expect_magic(std::istream& is, const char* magic) {
    char m[2] = {0, 0};
    is.read(m, 2);
    if (!is || m[0] != magic[0] || m[1] != magic[1]) {
        throw FormatError(std::string("expected netpbm magic ") + magic);
    }
}

std::uint8_t to_byte(float v, PixelDomain d) {
    const double scaled = d == PixelDomain::byte0_255 ? v : static_cast<double>(v) * 255.0;
    const double r = std::round(scaled);
    return static_cast<std::uint8_t>(r < 0.0 ? 0.0 : (r > 255.0 ? 255.0 : r));
}

} // namespace

void write_pgm(const PixelImage& img, std::ostream& os) {
    check_image(img);
    os << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    std::string raster(img.values.size(), '\0');
    for (std::size_t i = 0; i < img.values.size(); ++i) {
        raster[i] = static_cast<char>(to_byte(img.values[i], img.domain));
    }
    os.write(raster.data(), static_cast<std::streamsize>(raster.size()));
    if (!os) throw IoError("write_pgm: stream write failed");
}

void write_pgm(const PixelImage& img, const std::filesystem::path& path) {
    auto os = open_out(path);
    write_pgm(img, os);
}

PixelImage read_pgm(std::istream& is, PixelDomain domain) {
    expect_magic(is, "P5");
    const std::size_t width = read_header_int(is, "width");
    const std::size_t height = read_header_int(is, "height");
    const std::size_t maxval = read_header_int(is, "maxval");
    if (maxval != 255) {
        throw FormatError("read_pgm: only maxval 255 is supported, got " + std::to_string(maxval));
    }
    std::string raster(width * height, '\0');
    is.read(raster.data(), static_cast<std::streamsize>(raster.size()));
    if (static_cast<std::size_t>(is.gcount()) != raster.size()) {
        throw FormatError("read_pgm: truncated raster");
    }
    PixelImage img(height, width, domain);
    for (std::size_t i = 0; i < raster.size(); ++i) {
        const auto b = static_cast<unsigned char>(raster[i]);
        switch (domain) {
        case PixelDomain::byte0_255: img.values[i] = static_cast<float>(b); break;
        case PixelDomain::unit_interval: img.values[i] = static_cast<float>(b) / 255.0f; break;
        case PixelDomain::binary01:
            if (b != 0 && b != 255) throw DomainError("read_pgm: non-binary byte in binary01 image");
            img.values[i] = b == 255 ? 1.0f : 0.0f;
            break;
        }
    }
    return img;
}

PixelImage read_pgm(const std::filesystem::path& path, PixelDomain domain) {
    auto is = open_in(path);
    try {
        return read_pgm(is, domain);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_pbm(const ModuleMatrix& m, std::ostream& os) {
    os << "P4\n" << m.cols << ' ' << m.rows << '\n';
    const std::size_t stride = (m.cols + 7) / 8;
    std::string row(stride, '\0');
    for (std::size_t r = 0; r < m.rows; ++r) {
        std::fill(row.begin(), row.end(), '\0');
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (m.at(r, c)) row[c / 8] = static_cast<char>(row[c / 8] | (0x80 >> (c % 8)));
        }
        os.write(row.data(), static_cast<std::streamsize>(stride));
    }
    if (!os) throw IoError("write_pbm: stream write failed");
}

void write_pbm(const ModuleMatrix& m, const std::filesystem::path& path) {
    auto os = open_out(path);
    write_pbm(m, os);
}

ModuleMatrix read_pbm(std::istream& is) {
    expect_magic(is, "P4");
    const std::size_t cols = read_header_int(is, "width");
    const std::size_t rows = read_header_int(is, "height");
    const std::size_t stride = (cols + 7) / 8;
    ModuleMatrix m(rows, cols);
    std::string row(stride, '\0');
    for (std::size_t r = 0; r < rows; ++r) {
        is.read(row.data(), static_cast<std::streamsize>(stride));
        if (static_cast<std::size_t>(is.gcount()) != stride) throw FormatError("read_pbm: truncated raster");
        for (std::size_t c = 0; c < cols; ++c) {
            m.at(r, c) = (static_cast<unsigned char>(row[c / 8]) >> (7 - c % 8)) & 1u;
        }
    }
    return m;
}

ModuleMatrix read_pbm(const std::filesystem::path& path) {
    auto is = open_in(path);
    try {
        return read_pbm(is);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::string to_text(const ModuleMatrix& m) {
    std::string s;
    s.reserve(m.rows * (m.cols + 1));
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) s.push_back(m.at(r, c) ? '1' : '0');
        s.push_back('\n');
    }
    return s;
}

ModuleMatrix from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::uint8_t> bits;
    std::size_t rows = 0, cols = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (rows == 0) {
            cols = line.size();
        } else if (line.size() != cols) {
            throw FormatError("module text: row " + std::to_string(rows + 1) + " has " +
                              std::to_string(line.size()) + " columns, expected " +
                              std::to_string(cols));
        }
        for (char ch : line) {
            if (ch != '0' && ch != '1') {
                throw FormatError("module text: unexpected character on row " + std::to_string(rows + 1));
            }
            bits.push_back(ch == '1');
        }
        ++rows;
    }
    if (rows == 0) throw FormatError("module text: empty matrix");
    ModuleMatrix m(rows, cols);
    m.bits = std::move(bits);
    return m;
}

} // namespace pgc
