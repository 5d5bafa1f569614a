#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pgc/codegen.hpp"

namespace pgc::test {

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& name) {
        path_ = std::filesystem::temp_directory_path() /
                ("pgc_" + name + "_" + std::to_string(std::random_device{}()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline ModuleMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    ModuleMatrix m(rows, cols);
    for (auto& b : m.bits) b = static_cast<std::uint8_t>(rng() & 1u);
    return m;
}

inline PixelImage random_image(std::mt19937_64& rng, std::size_t h, std::size_t w, PixelDomain d) {
    PixelImage img(h, w, d);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (auto& v : img.values) {
        switch (d) {
        case PixelDomain::binary01: v = static_cast<float>(rng() & 1u); break;
        case PixelDomain::byte0_255: v = static_cast<float>(rng() % 256); break;
        case PixelDomain::unit_interval: v = u(rng); break;
        }
    }
    return img;
}

} // namespace pgc::test
