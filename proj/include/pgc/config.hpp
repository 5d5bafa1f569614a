#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgc/attack.hpp"
#include "pgc/channel.hpp"
#include "pgc/codegen.hpp"
#include "pgc/detector.hpp"
#include "pgc/nn.hpp"

namespace pgc {

inline constexpr int kConfigFormatVersion = 1;

struct TrainingConfig {
    Arch arch = Arch::bn;
    nn::TrainConfig defaults;
    std::vector<std::pair<PrinterId, nn::TrainConfig>> per_printer;

    const nn::TrainConfig& for_printer(PrinterId id) const;
};

struct EvaluationConfig {
    std::vector<Measure> measures = {Measure::pearson, Measure::hamming};
    std::vector<double> target_pfa = {0.0, 0.01, 0.1};
    std::uint64_t seed = 11;
    bool plots = true;
    bool diff_images = true;
};

/// Everything one experiment needs. See configs/*.json for the document form.
struct ExperimentConfig {
    Geometry geometry;
    std::size_t n_images = 70;
    SplitSizes split{40, 10, 20};
    std::uint64_t dataset_seed = 1;
    std::vector<PrinterChannel> printers;
    TrainingConfig training;
    EvaluationConfig evaluation;
    std::filesystem::path output_dir = "runs/desk";

    /// 70 images split 40/10/20, 150 epochs, all four presets.
    static ExperimentConfig desk();
    /// 384 images split 100/50/234, 1000 epochs, all four presets.
    static ExperimentConfig full();

    /// Throws ConfigError naming the offending field.
    void validate() const;

    bool has_printer(PrinterId id) const;
    const ChannelParams& params_for(PrinterId id) const;

    /// Overrides dataset, training and evaluation seeds at once.
    void override_seed(std::uint64_t seed);
};

/// Parses the JSON config document. Unknown keys are rejected; omitted keys
/// keep their desk-scale defaults. Errors carry line/field diagnostics.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON text (sorted keys, two-space indent, trailing newline).
std::string dump_config(const ExperimentConfig& cfg);

} // namespace pgc
