#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "pgc/codegen.hpp"

namespace pgc {

/// Simulated print-scan degradation for one printer.
struct ChannelParams {
    std::size_t dot_gain_radius = 0; // Chebyshev radius of ink spreading, px
    double dot_gain_prob = 0.0;      // chance a pixel within the radius turns inked
    double psf_sigma = 0.0;          // Gaussian blur std, px
    double gain = 1.0;
    double offset = 0.0;
    double noise_sigma = 0.0;        // additive Gaussian noise on ink intensity
    bool quantize = true;            // round output luminance to integers

    /// Throws ParameterError naming the offending field.
    void validate() const;

    /// Expected spread used to rank presets: radius * prob (0 when radius is 0).
    double dot_gain() const {
        return dot_gain_radius == 0 ? 0.0 : static_cast<double>(dot_gain_radius) * dot_gain_prob;
    }

    bool operator==(const ChannelParams&) const = default;
};

/// The zero-degradation channel: output is the exact luminance complement.
constexpr ChannelParams identity_channel() { return ChannelParams{}; }

enum class PrinterId : std::uint8_t { SA, LX, HP, CA };

inline constexpr std::array<PrinterId, 4> kAllPrinters = {PrinterId::SA, PrinterId::LX,
                                                          PrinterId::HP, PrinterId::CA};

std::string_view to_string(PrinterId id);
/// Throws LookupError for unknown ids.
PrinterId parse_printer(std::string_view id);
bool is_inkjet(PrinterId id);

ChannelParams preset(PrinterId id);
ChannelParams preset(std::string_view id);

/// Runs a binary01 render through the five-stage pipeline (dot gain, blur,
/// gain/offset, noise, luminance conversion). Output is byte0_255 with ink dark.
PixelImage print_scan(const PixelImage& img, const ChannelParams& params, std::uint64_t seed);

} // namespace pgc
