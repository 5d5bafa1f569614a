#include "pgc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pgc/error.hpp"
#include "pgc/rng.hpp"

namespace pgc {

void ChannelParams::validate() const {
    auto fail = [](const std::string& field, const std::string& rule) {
        throw ParameterError("channel params: " + field + " " + rule);
    };
    if (!(dot_gain_prob >= 0.0 && dot_gain_prob <= 1.0)) fail("dot_gain_prob", "must lie in [0, 1]");
    if (!(psf_sigma >= 0.0) || !std::isfinite(psf_sigma)) fail("psf_sigma", "must be >= 0");
    if (!(gain > 0.0) || !std::isfinite(gain)) fail("gain", "must be > 0");
    if (!(offset >= -1.0 && offset <= 1.0)) fail("offset", "must lie in [-1, 1]");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) fail("noise_sigma", "must be >= 0");
    if (dot_gain_radius > 64) fail("dot_gain_radius", "must be <= 64");
}

std::string_view to_string(PrinterId id) {
    switch (id) {
    case PrinterId::SA: return "SA";
    case PrinterId::LX: return "LX";
    case PrinterId::HP: return "HP";
    case PrinterId::CA: return "CA";
    }
    return "??";
}

PrinterId parse_printer(std::string_view id) {
    for (PrinterId p : kAllPrinters) {
        if (to_string(p) == id) return p;
    }
    throw LookupError("unknown printer id '" + std::string(id) + "' (expected SA, LX, HP or CA)");
}

bool is_inkjet(PrinterId id) { return id == PrinterId::HP || id == PrinterId::CA; }

// Laser presets (SA, LX) spread less and are quieter than the inkjets; HP has
// the heaviest dot gain. The values are tuning knobs, not device measurements.
ChannelParams preset(PrinterId id) {
    ChannelParams p;
    p.quantize = true;
    switch (id) {
    case PrinterId::SA:
        p.dot_gain_radius = 2;
        p.dot_gain_prob = 0.45;
        p.psf_sigma = 2.5;
        p.gain = 0.9;
        p.offset = 0.05;
        p.noise_sigma = 0.08;
        break;
    case PrinterId::LX:
        p.dot_gain_radius = 2;
        p.dot_gain_prob = 0.5;
        p.psf_sigma = 2.6;
        p.gain = 0.9;
        p.offset = 0.05;
        p.noise_sigma = 0.08;
        break;
    case PrinterId::HP:
        p.dot_gain_radius = 2;
        p.dot_gain_prob = 0.8;
        p.psf_sigma = 3.0;
        p.gain = 0.85;
        p.offset = 0.08;
        p.noise_sigma = 0.12;
        break;
    case PrinterId::CA:
        p.dot_gain_radius = 2;
        p.dot_gain_prob = 0.65;
        p.psf_sigma = 2.8;
        p.gain = 0.85;
        p.offset = 0.08;
        p.noise_sigma = 0.12;
        break;
    }
    return p;
}

ChannelParams preset(std::string_view id) { return preset(parse_printer(id)); }

namespace {

using Plane = std::vector<double>;

void dot_gain(Plane& ink, std::size_t h, std::size_t w, std::size_t radius, double prob, Rng& rng) {
    // Summed-area table of the undilated ink, so every candidate test is O(1).
    std::vector<std::uint32_t> sat((h + 1) * (w + 1), 0);
    for (std::size_t y = 0; y < h; ++y) {
        std::uint32_t row = 0;
        for (std::size_t x = 0; x < w; ++x) {
            row += ink[y * w + x] != 0.0 ? 1u : 0u;
            sat[(y + 1) * (w + 1) + x + 1] = sat[y * (w + 1) + x + 1] + row;
        }
    }
    for (std::size_t y = 0; y < h; ++y) {
        const std::size_t y0 = y >= radius ? y - radius : 0;
        const std::size_t y1 = std::min(h, y + radius + 1);
        for (std::size_t x = 0; x < w; ++x) {
            if (ink[y * w + x] != 0.0) continue;
            const std::size_t x0 = x >= radius ? x - radius : 0;
            const std::size_t x1 = std::min(w, x + radius + 1);
            const std::uint32_t n = sat[y1 * (w + 1) + x1] - sat[y0 * (w + 1) + x1] -
                                    sat[y1 * (w + 1) + x0] + sat[y0 * (w + 1) + x0];
            if (n == 0) continue;
            if (rng.uniform() < prob) ink[y * w + x] = -1.0; // mark; originals must not seed growth
        }
    }
    for (double& v : ink) v = v != 0.0 ? 1.0 : 0.0;
}

void gaussian_blur(Plane& img, std::size_t h, std::size_t w, double sigma) {
    const auto r = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
    double sum = 0.0;
    for (std::ptrdiff_t i = -r; i <= r; ++i) {
        const double v = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(i + r)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;

    const auto sh = static_cast<std::ptrdiff_t>(h);
    const auto sw = static_cast<std::ptrdiff_t>(w);
    Plane tmp(img.size());
    for (std::ptrdiff_t y = 0; y < sh; ++y) {
        for (std::ptrdiff_t x = 0; x < sw; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t i = -r; i <= r; ++i) {
                const std::ptrdiff_t xx = std::clamp<std::ptrdiff_t>(x + i, 0, sw - 1);
                acc += k[static_cast<std::size_t>(i + r)] * img[static_cast<std::size_t>(y * sw + xx)];
            }
            tmp[static_cast<std::size_t>(y * sw + x)] = acc;
        }
    }
    for (std::ptrdiff_t y = 0; y < sh; ++y) {
        for (std::ptrdiff_t x = 0; x < sw; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t i = -r; i <= r; ++i) {
                const std::ptrdiff_t yy = std::clamp<std::ptrdiff_t>(y + i, 0, sh - 1);
                acc += k[static_cast<std::size_t>(i + r)] * tmp[static_cast<std::size_t>(yy * sw + x)];
            }
            img[static_cast<std::size_t>(y * sw + x)] = acc;
        }
    }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace

PixelImage print_scan(const PixelImage& img, const ChannelParams& params, std::uint64_t seed) {
    params.validate();
    if (img.domain != PixelDomain::binary01) {
        throw DomainError("print_scan: input must be a binary01 render, got " +
                          std::string(to_string(img.domain)));
    }
    check_image(img);

    const std::size_t h = img.height;
    const std::size_t w = img.width;
    Plane ink(img.values.begin(), img.values.end());

    if (params.dot_gain_radius > 0 && params.dot_gain_prob > 0.0) {
        Rng rng(derive_seed(seed, "dot_gain"));
        dot_gain(ink, h, w, params.dot_gain_radius, params.dot_gain_prob, rng);
    }
    if (params.psf_sigma > 0.0) gaussian_blur(ink, h, w, params.psf_sigma);
    for (double& v : ink) v = clamp01(params.gain * v + params.offset);
    if (params.noise_sigma > 0.0) {
        Rng rng(derive_seed(seed, "noise"));
        for (double& v : ink) v = clamp01(v + params.noise_sigma * rng.normal());
    }

    PixelImage out(h, w, PixelDomain::byte0_255);
    for (std::size_t i = 0; i < ink.size(); ++i) {
        double lum = 255.0 * (1.0 - ink[i]);
        if (params.quantize) lum = std::round(lum);
        out.values[i] = static_cast<float>(lum);
    }
    return out;
}

} // namespace pgc
