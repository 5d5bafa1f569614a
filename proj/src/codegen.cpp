#include "pgc/codegen.hpp"

#include <string>

#include "pgc/error.hpp"
#include "pgc/rng.hpp"

namespace pgc {

std::string_view to_string(PixelDomain d) {
    switch (d) {
    case PixelDomain::binary01: return "binary01";
    case PixelDomain::byte0_255: return "byte0_255";
    case PixelDomain::unit_interval: return "unit_interval";
    }
    return "unknown";
}

void check_image(const PixelImage& img) {
    if (img.values.size() != img.height * img.width) {
        throw DimensionError("image holds " + std::to_string(img.values.size()) +
                             " values, expected " + std::to_string(img.height * img.width));
    }
    for (float v : img.values) {
        bool ok = false;
        switch (img.domain) {
        case PixelDomain::binary01: ok = v == 0.0f || v == 1.0f; break;
        case PixelDomain::byte0_255: ok = v >= 0.0f && v <= 255.0f; break;
        case PixelDomain::unit_interval: ok = v >= 0.0f && v <= 1.0f; break;
        }
        if (!ok) {
            throw DomainError("value " + std::to_string(v) + " outside domain " +
                              std::string(to_string(img.domain)));
        }
    }
}

void Geometry::validate() const {
    if (modules == 0 || module_px == 0 || block_px == 0) {
        throw ParameterError("geometry: modules, module_px and block_px must be >= 1");
    }
    if (image_px() % block_px != 0) {
        throw ParameterError("geometry: image side " + std::to_string(image_px()) +
                             " px is not divisible by block_px " + std::to_string(block_px));
    }
}

ModuleMatrix generate_module_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw ParameterError("generate_module_matrix: rows and cols must be >= 1");
    }
    Rng rng(seed);
    ModuleMatrix m(rows, cols);
    for (auto& b : m.bits) b = rng.bit() ? 1 : 0;
    return m;
}

PixelImage render(const ModuleMatrix& m, std::size_t module_px) {
    if (module_px == 0) throw ParameterError("render: module_px must be >= 1");
    PixelImage img(m.rows * module_px, m.cols * module_px, PixelDomain::binary01);
    for (std::size_t y = 0; y < img.height; ++y) {
        const std::size_t r = y / module_px;
        for (std::size_t x = 0; x < img.width; ++x) {
            img.values[y * img.width + x] = m.at(r, x / module_px) ? 1.0f : 0.0f;
        }
    }
    return img;
}

BlockSet split_blocks(const PixelImage& img, std::size_t block_px) {
    if (block_px == 0) throw ParameterError("split_blocks: block_px must be >= 1");
    if (img.height % block_px != 0 || img.width % block_px != 0) {
        throw DimensionError("split_blocks: " + std::to_string(img.height) + "x" +
                             std::to_string(img.width) + " image is not divisible by block " +
                             std::to_string(block_px));
    }
    BlockSet bs;
    bs.block_px = block_px;
    bs.grid_rows = img.height / block_px;
    bs.grid_cols = img.width / block_px;
    bs.domain = img.domain;
    bs.blocks.reserve(bs.grid_rows * bs.grid_cols);
    for (std::size_t gr = 0; gr < bs.grid_rows; ++gr) {
        for (std::size_t gc = 0; gc < bs.grid_cols; ++gc) {
            std::vector<float> block(block_px * block_px);
            for (std::size_t y = 0; y < block_px; ++y) {
                const float* src = &img.values[(gr * block_px + y) * img.width + gc * block_px];
                std::copy(src, src + block_px, block.begin() + static_cast<std::ptrdiff_t>(y * block_px));
            }
            bs.blocks.push_back(std::move(block));
        }
    }
    return bs;
}

PixelImage assemble_blocks(const BlockSet& bs) {
    if (bs.block_px == 0 || bs.blocks.size() != bs.grid_rows * bs.grid_cols) {
        throw DimensionError("assemble_blocks: grid " + std::to_string(bs.grid_rows) + "x" +
                             std::to_string(bs.grid_cols) + " does not match " +
                             std::to_string(bs.blocks.size()) + " blocks");
    }
    const std::size_t n = bs.block_px * bs.block_px;
    PixelImage img(bs.grid_rows * bs.block_px, bs.grid_cols * bs.block_px, bs.domain);
    for (std::size_t gr = 0; gr < bs.grid_rows; ++gr) {
        for (std::size_t gc = 0; gc < bs.grid_cols; ++gc) {
            const auto& block = bs.blocks[gr * bs.grid_cols + gc];
            if (block.size() != n) {
                throw DimensionError("assemble_blocks: block of length " +
                                     std::to_string(block.size()) + ", expected " +
                                     std::to_string(n));
            }
            for (std::size_t y = 0; y < bs.block_px; ++y) {
                std::copy(block.begin() + static_cast<std::ptrdiff_t>(y * bs.block_px),
                          block.begin() + static_cast<std::ptrdiff_t>((y + 1) * bs.block_px),
                          img.values.begin() +
                              static_cast<std::ptrdiff_t>((gr * bs.block_px + y) * img.width +
                                                          gc * bs.block_px));
            }
        }
    }
    return img;
}

namespace {

void check_threshold(double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw ParameterError("binarize: threshold " + std::to_string(t) + " outside [0, 1]");
    }
}

} // namespace

std::vector<std::uint8_t> binarize(std::span<const float> v, double t, Polarity polarity) {
    check_threshold(t);
    std::vector<std::uint8_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const bool high = static_cast<double>(v[i]) >= t;
        out[i] = (polarity == Polarity::high_is_one) == high ? 1 : 0;
    }
    return out;
}

PixelImage binarize(const PixelImage& img, double t, Polarity polarity) {
    if (img.domain == PixelDomain::byte0_255) {
        throw DomainError("binarize: expects unit_interval input; normalize byte images first");
    }
    const auto bits = binarize(std::span<const float>(img.values), t, polarity);
    PixelImage out(img.height, img.width, PixelDomain::binary01);
    for (std::size_t i = 0; i < bits.size(); ++i) out.values[i] = bits[i];
    return out;
}

ModuleMatrix modules_from_pixels(const PixelImage& img, std::size_t module_px) {
    if (module_px == 0) throw ParameterError("modules_from_pixels: module_px must be >= 1");
    if (img.domain != PixelDomain::binary01) {
        throw DomainError("modules_from_pixels: expects a binary01 image");
    }
    if (img.height % module_px != 0 || img.width % module_px != 0) {
        throw DimensionError("modules_from_pixels: image is not divisible by module_px " +
                             std::to_string(module_px));
    }
    ModuleMatrix m(img.height / module_px, img.width / module_px);
    const std::size_t cell = module_px * module_px;
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            std::size_t ones = 0;
            for (std::size_t y = 0; y < module_px; ++y) {
                for (std::size_t x = 0; x < module_px; ++x) {
                    ones += img.at(r * module_px + y, c * module_px + x) != 0.0f;
                }
            }
            m.at(r, c) = 2 * ones > cell ? 1 : 0;
        }
    }
    return m;
}

PixelImage ink_intensity(const PixelImage& scan) {
    if (scan.domain != PixelDomain::byte0_255) {
        throw DomainError("ink_intensity: expects a byte0_255 luminance scan");
    }
    PixelImage out(scan.height, scan.width, PixelDomain::unit_interval);
    for (std::size_t i = 0; i < scan.values.size(); ++i) {
        out.values[i] = 1.0f - scan.values[i] / 255.0f;
    }
    return out;
}

} // namespace pgc
