#pragma once

// The four pipeline verbs. Every command is a pure function of the config and
// the files already under cfg.output_dir; reruns rewrite identical bytes.
//
// Layout under the output directory:
//   dataset/manifest.json
//   dataset/originals/img_NNNN.pbm
//   dataset/scans/<printer>/img_NNNN.pgm
//   models/<printer>_<arch>.pgcm, models/<printer>_<arch>_loss.csv
//   attack/<printer>_<arch>/est_NNNN.pbm, attack/<printer>_thr/est_NNNN.pbm
//   attack/<printer>_<arch>_metrics.csv
//   roc/<printer>_<arch>/...

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "pgc/attack.hpp"
#include "pgc/config.hpp"

namespace pgc {

namespace layout {

std::filesystem::path dataset_dir(const ExperimentConfig& cfg);
std::filesystem::path manifest_path(const ExperimentConfig& cfg);
std::filesystem::path model_path(const ExperimentConfig& cfg, PrinterId p, Arch a);
std::filesystem::path loss_path(const ExperimentConfig& cfg, PrinterId p, Arch a);
std::filesystem::path estimates_dir(const ExperimentConfig& cfg, PrinterId p, std::string_view method);
std::filesystem::path metrics_path(const ExperimentConfig& cfg, PrinterId p, Arch a);
std::filesystem::path roc_dir(const ExperimentConfig& cfg, PrinterId p, Arch a);
std::string image_name(std::string_view prefix, std::size_t index, std::string_view ext);

} // namespace layout

/// Writes originals, per-printer scans and the manifest.
void cmd_gen(const ExperimentConfig& cfg, std::ostream& log);

/// Reads a generated dataset back, checking it matches the config.
/// Throws MissingInputError naming `gen` when nothing has been generated.
PairedDataset load_dataset(const ExperimentConfig& cfg);

/// Trains, calibrates on the validation split, and writes the model file and
/// the per-epoch loss table.
void cmd_train(const ExperimentConfig& cfg, PrinterId printer, Arch arch, std::ostream& log);

struct AttackSummary {
    double model_pearson = 0.0;
    double model_hamming = 0.0;
    double thr_pearson = 0.0;
    double thr_hamming = 0.0;
};

/// Regenerates every test code with the trained model and with the Thr
/// baseline; writes estimates and the metrics table.
AttackSummary cmd_attack(const ExperimentConfig& cfg, PrinterId printer, Arch arch,
                         const std::optional<std::filesystem::path>& model, std::ostream& log);

/// Re-prints originals and both sets of estimates, builds ROC curves and
/// summaries, plots, and difference images.
void cmd_roc(const ExperimentConfig& cfg, PrinterId printer, Arch arch, std::ostream& log);

} // namespace pgc
