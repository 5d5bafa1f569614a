#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pgc/channel.hpp"
#include "pgc/codegen.hpp"
#include "pgc/nn.hpp"

namespace pgc {

enum class Split : std::uint8_t { train, val, test };

std::string_view to_string(Split s);

struct SplitSizes {
    std::size_t train = 100;
    std::size_t val = 50;
    std::size_t test = 234;

    std::size_t total() const { return train + val + test; }
    bool operator==(const SplitSizes&) const = default;
};

struct PrinterChannel {
    PrinterId id;
    ChannelParams params;
};

/// Originals aligned by index with one scan per image for each printer.
struct PairedDataset {
    Geometry geometry;
    SplitSizes split;
    std::uint64_t seed = 0;
    std::vector<ModuleMatrix> originals;
    std::vector<PrinterChannel> printers;
    std::vector<std::vector<PixelImage>> scans; // [printer slot][image]

    std::size_t size() const { return originals.size(); }
    Split split_of(std::size_t image) const;
    std::vector<std::size_t> indices(Split s) const;
    std::size_t block_count(Split s) const;

    bool has_printer(PrinterId id) const;
    /// Throws LookupError when the printer is absent.
    const std::vector<PixelImage>& scans_for(PrinterId id) const;
    const ChannelParams& params_for(PrinterId id) const;

    PixelImage rendered(std::size_t image) const { return render(originals[image], geometry.module_px); }
};

/// Seed used for original i is derive_seed(seed, "originals") ^ i.
std::uint64_t original_seed(std::uint64_t dataset_seed, std::size_t image);
/// Seed used for the scan of image i on printer p.
std::uint64_t scan_seed(std::uint64_t dataset_seed, PrinterId p, std::size_t image);

/// Splits are assigned by index order: train first, then val, then test.
PairedDataset build_dataset(std::size_t n_images, const Geometry& geometry, const SplitSizes& split,
                            std::span<const PrinterChannel> printers, std::uint64_t seed);

enum class Arch : std::uint8_t { fc2, fc3, fc4, bn };

std::string_view to_string(Arch a);
Arch parse_arch(std::string_view s);
nn::MlpModel build_arch(Arch a, std::uint64_t seed, std::size_t dim);

struct AttackModel {
    nn::MlpModel model;
    std::optional<double> threshold; // set by calibration
    PrinterId printer = PrinterId::SA;
};

struct TrainResult {
    AttackModel attack;
    std::vector<double> loss_history; // mean per-sample training loss, one per epoch
};

using EpochHook = std::function<void(std::size_t epoch, double mean_loss, const nn::MlpModel&)>;

/// Training pairs for one printer and split: network inputs are scan blocks as
/// ink intensity (1 - luminance/255), targets the rendered original blocks.
struct BlockPairs {
    std::size_t count = 0;
    std::size_t dim = 0;
    std::vector<float> inputs;  // count x dim
    std::vector<float> targets; // count x dim
};

BlockPairs collect_blocks(const PairedDataset& ds, PrinterId printer, Split split);

/// Trains a freshly initialized model. Each epoch visits the training blocks in
/// a seed-derived permutation.
TrainResult train_attack(const PairedDataset& ds, PrinterId printer, Arch arch,
                         const nn::TrainConfig& cfg, const EpochHook& on_epoch = {});

/// Same loop over an existing model; used by train_attack.
std::vector<double> train_model(nn::MlpModel& model, const BlockPairs& data, const nn::TrainConfig& cfg,
                                const EpochHook& on_epoch = {});

/// The 101 candidate thresholds 0.00, 0.01, ..., 1.00.
std::array<double, 101> threshold_grid();

struct Calibration {
    double threshold = 0.0;
    double error = 0.0; // mean normalized Hamming at the chosen threshold
};

/// Smallest grid threshold minimizing the pixel mismatch rate of
/// binarize(values, t, high_is_one) against binary targets.
Calibration calibrate_on(std::span<const float> values, std::span<const float> targets);

AttackModel calibrate_threshold(const AttackModel& am, const PairedDataset& ds);

struct Regeneration {
    PixelImage grey;       // model output reassembled, unit_interval
    ModuleMatrix estimate; // thresholded and majority-voted modules
};

Regeneration regenerate(const AttackModel& am, const PixelImage& scan, const Geometry& geometry);
ModuleMatrix estimate_code(const AttackModel& am, const PixelImage& scan, const Geometry& geometry);

struct ThrBaseline {
    double threshold = 0.0;
    std::vector<std::size_t> images;    // test indices
    std::vector<ModuleMatrix> estimates; // aligned with images
};

/// Direct thresholding of ink intensity followed by majority vote.
ModuleMatrix thr_estimate(const PixelImage& scan, double threshold, const Geometry& geometry);
ThrBaseline baseline_thr(const PairedDataset& ds, PrinterId printer);

} // namespace pgc
