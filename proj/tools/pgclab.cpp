// pgclab: clonability experiments on simulated printed codes.
//
//   pgclab gen    --config cfg.json
//   pgclab train  --config cfg.json --printer SA --arch bn
//   pgclab attack --config cfg.json --printer SA [--model path]
//   pgclab roc    --config cfg.json --printer SA
//
// Failures print a single line "error: <category>: <message>" to stderr.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgc/commands.hpp"
#include "pgc/config.hpp"
#include "pgc/error.hpp"

namespace {

int exit_code_for(const std::string& category) {
    if (category == "config") return 3;
    if (category == "io") return 4;
    if (category == "format") return 5;
    if (category == "missing_input") return 6;
    if (category == "lookup") return 7;
    return 1;
}

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Machine-learning clonability attack lab for printable graphical codes"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string printer;
    std::string arch;
    std::string model;
    bool quiet = false;

    app.add_option("--config", config_path, "Experiment config (JSON); desk-scale defaults when omitted");
    app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
    app.add_option("--seed", seed, "Overrides dataset, training and evaluation seeds");
    app.add_option("--printer", printer, "Printer id (SA, LX, HP, CA); all configured printers when omitted");
    app.add_option("--arch", arch, "Architecture (fc2, fc3, fc4, bn); config value when omitted");
    app.add_flag("-q,--quiet", quiet, "Suppress progress output");

    auto* gen = app.add_subcommand("gen", "Generate originals, simulated scans and the manifest");
    auto* train = app.add_subcommand("train", "Train and calibrate an attack model");
    auto* attack = app.add_subcommand("attack", "Estimate test codes with the model and the Thr baseline");
    attack->add_option("--model", model, "Model file (defaults to the one written by train)");
    auto* rocc = app.add_subcommand("roc", "Score re-printed fakes and emit ROC tables");
    for (auto* sub : {gen, train, attack, rocc}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: usage: " << one_line(e.what()) << "\n";
        return 2;
    }

    std::ostream null_stream(nullptr);
    std::ostream& log = quiet ? null_stream : std::cerr;

    try {
        pgc::ExperimentConfig cfg =
            config_path.empty() ? pgc::ExperimentConfig::desk() : pgc::load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed) cfg.override_seed(*seed);
        cfg.validate();

        const pgc::Arch a = arch.empty() ? cfg.training.arch : pgc::parse_arch(arch);
        std::vector<pgc::PrinterId> printers;
        if (printer.empty()) {
            for (const auto& p : cfg.printers) printers.push_back(p.id);
        } else {
            printers.push_back(pgc::parse_printer(printer));
        }

        if (gen->parsed()) {
            pgc::cmd_gen(cfg, log);
        } else if (train->parsed()) {
            for (auto p : printers) pgc::cmd_train(cfg, p, a, log);
        } else if (attack->parsed()) {
            if (!model.empty() && printers.size() != 1) {
                throw pgc::ParameterError("--model requires a single --printer");
            }
            const std::optional<std::filesystem::path> m =
                model.empty() ? std::nullopt : std::optional<std::filesystem::path>(model);
            for (auto p : printers) pgc::cmd_attack(cfg, p, a, m, log);
        } else if (rocc->parsed()) {
            for (auto p : printers) pgc::cmd_roc(cfg, p, a, log);
        }
    } catch (const pgc::Error& e) {
        std::cerr << "error: " << e.category() << ": " << one_line(e.what()) << "\n";
        return exit_code_for(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 0;
}
