#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pgc/codegen.hpp"

namespace pgc {

// 8-bit binary PGM (P5, maxval 255). binary01 and unit_interval values are
// scaled by 255 and rounded to nearest; byte0_255 values are rounded.
void write_pgm(const PixelImage& img, std::ostream& os);
void write_pgm(const PixelImage& img, const std::filesystem::path& path);

/// Reads a P5 image into `domain`: byte0_255 keeps raw values, the other
/// domains divide by 255 (binary01 additionally requires every byte be 0 or 255).
PixelImage read_pgm(std::istream& is, PixelDomain domain = PixelDomain::byte0_255);
PixelImage read_pgm(const std::filesystem::path& path, PixelDomain domain = PixelDomain::byte0_255);

// Module matrices as raw PBM (P4): one pixel per module, 1 = black.
void write_pbm(const ModuleMatrix& m, std::ostream& os);
void write_pbm(const ModuleMatrix& m, const std::filesystem::path& path);
ModuleMatrix read_pbm(std::istream& is);
ModuleMatrix read_pbm(const std::filesystem::path& path);

// One line per row of '0'/'1' characters.
std::string to_text(const ModuleMatrix& m);
ModuleMatrix from_text(const std::string& text);

} // namespace pgc
