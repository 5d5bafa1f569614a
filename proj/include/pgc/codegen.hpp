#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace pgc {

/// Binary grid of code modules, row-major, 1 = dark (inked).
struct ModuleMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> bits;

    ModuleMatrix() = default;
    ModuleMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), bits(r * c, 0) {}

    std::uint8_t at(std::size_t r, std::size_t c) const { return bits[r * cols + c]; }
    std::uint8_t& at(std::size_t r, std::size_t c) { return bits[r * cols + c]; }
    std::size_t size() const { return bits.size(); }

    bool operator==(const ModuleMatrix&) const = default;
};

enum class PixelDomain : std::uint8_t {
    binary01,      // exactly 0 or 1
    byte0_255,     // luminance in [0, 255]
    unit_interval, // [0, 1]
};

std::string_view to_string(PixelDomain d);

/// Grayscale raster with an explicit value domain.
struct PixelImage {
    std::size_t height = 0;
    std::size_t width = 0;
    PixelDomain domain = PixelDomain::unit_interval;
    std::vector<float> values;

    PixelImage() = default;
    PixelImage(std::size_t h, std::size_t w, PixelDomain d, float fill = 0.0f)
        : height(h), width(w), domain(d), values(h * w, fill) {}

    float at(std::size_t r, std::size_t c) const { return values[r * width + c]; }
    float& at(std::size_t r, std::size_t c) { return values[r * width + c]; }
    std::size_t size() const { return values.size(); }

    bool operator==(const PixelImage&) const = default;
};

/// Throws DomainError if any value falls outside the declared domain, or
/// DimensionError if the value count does not match height * width.
void check_image(const PixelImage& img);

/// Non-overlapping square tiles of an image, each flattened row-major.
struct BlockSet {
    std::size_t block_px = 24;
    std::size_t grid_rows = 0;
    std::size_t grid_cols = 0;
    PixelDomain domain = PixelDomain::unit_interval;
    std::vector<std::vector<float>> blocks;

    bool operator==(const BlockSet&) const = default;
};

struct Geometry {
    std::size_t modules = 64;   // modules per side
    std::size_t module_px = 6;  // pixels per module side
    std::size_t block_px = 24;  // pixels per network block side

    std::size_t image_px() const { return modules * module_px; }
    std::size_t block_dim() const { return block_px * block_px; }
    std::size_t blocks_per_image() const {
        const std::size_t g = image_px() / block_px;
        return g * g;
    }
    /// Throws ParameterError unless the image tiles exactly into blocks.
    void validate() const;

    bool operator==(const Geometry&) const = default;
};

enum class Polarity : std::uint8_t { high_is_one, low_is_one };

ModuleMatrix generate_module_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols);

PixelImage render(const ModuleMatrix& m, std::size_t module_px);

BlockSet split_blocks(const PixelImage& img, std::size_t block_px);

PixelImage assemble_blocks(const BlockSet& bs);

/// high_is_one: 1 iff v >= t. low_is_one: 1 iff v < t.
std::vector<std::uint8_t> binarize(std::span<const float> v, double t, Polarity polarity);

/// Image form; accepts unit_interval or binary01 input, returns binary01.
PixelImage binarize(const PixelImage& img, double t, Polarity polarity);

/// Majority vote over each module_px x module_px cell; an exact half is 0.
ModuleMatrix modules_from_pixels(const PixelImage& img, std::size_t module_px);

/// Ink intensity 1 - v/255 of a luminance scan, as unit_interval.
PixelImage ink_intensity(const PixelImage& scan);

} // namespace pgc
