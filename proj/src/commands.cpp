#include "pgc/commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "config_json.hpp"
#include "pgc/detector.hpp"
#include "pgc/error.hpp"
#include "pgc/image_io.hpp"
#include "pgc/report.hpp"

namespace fs = std::filesystem;

namespace pgc {

using detail::json;

namespace layout {

fs::path dataset_dir(const ExperimentConfig& cfg) { return cfg.output_dir / "dataset"; }
fs::path manifest_path(const ExperimentConfig& cfg) { return dataset_dir(cfg) / "manifest.json"; }

namespace {

std::string stem(PrinterId p, Arch a) { return std::string(to_string(p)) + "_" + std::string(to_string(a)); }

} // namespace

fs::path model_path(const ExperimentConfig& cfg, PrinterId p, Arch a) {
    return cfg.output_dir / "models" / (stem(p, a) + ".pgcm");
}

fs::path loss_path(const ExperimentConfig& cfg, PrinterId p, Arch a) {
    return cfg.output_dir / "models" / (stem(p, a) + "_loss.csv");
}

fs::path estimates_dir(const ExperimentConfig& cfg, PrinterId p, std::string_view method) {
    return cfg.output_dir / "attack" / (std::string(to_string(p)) + "_" + std::string(method));
}

fs::path metrics_path(const ExperimentConfig& cfg, PrinterId p, Arch a) {
    return cfg.output_dir / "attack" / (stem(p, a) + "_metrics.csv");
}

fs::path roc_dir(const ExperimentConfig& cfg, PrinterId p, Arch a) { return cfg.output_dir / "roc" / stem(p, a); }

std::string image_name(std::string_view prefix, std::size_t index, std::string_view ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%04zu.", index);
    return std::string(prefix) + buf + std::string(ext);
}

} // namespace layout

namespace {

void make_dirs(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create directory " + p.string() + ": " + ec.message());
}

std::string scan_rel(PrinterId p, std::size_t i) {
    return "scans/" + std::string(to_string(p)) + "/" + layout::image_name("img", i, "pgm");
}

std::string original_rel(std::size_t i) { return "originals/" + layout::image_name("img", i, "pbm"); }

json manifest_json(const ExperimentConfig& cfg, const PairedDataset& ds) {
    json m;
    m["format_version"] = 1;
    m["geometry"] = detail::to_json(ds.geometry);
    m["split"] = detail::to_json(ds.split);
    m["seed"] = ds.seed;
    m["seed_derivation"] = "original i: derive(seed, 'originals') ^ i; scan i on p: derive(seed, 'scan/<p>') ^ i";
    json printers = json::array();
    for (const auto& p : ds.printers) {
        printers.push_back({{"id", std::string(to_string(p.id))}, {"params", detail::to_json(p.params)}});
    }
    m["printers"] = printers;
    json images = json::array();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        json scans = json::object();
        for (const auto& p : ds.printers) scans[std::string(to_string(p.id))] = scan_rel(p.id, i);
        images.push_back({{"index", i},
                          {"split", std::string(to_string(ds.split_of(i)))},
                          {"original", original_rel(i)},
                          {"scans", scans}});
    }
    m["images"] = images;
    m["n_images"] = cfg.n_images;
    return m;
}

void write_csv(const fs::path& path, const std::string& text) { write_text_file(path, text); }

void require_printer(const ExperimentConfig& cfg, PrinterId p) {
    if (!cfg.has_printer(p)) {
        throw LookupError("printer " + std::string(to_string(p)) + " is not listed in the config");
    }
}

std::vector<ModuleMatrix> read_estimates(const ExperimentConfig& cfg, PrinterId p, std::string_view method,
                                         const std::vector<std::size_t>& images) {
    const fs::path dir = layout::estimates_dir(cfg, p, method);
    std::vector<ModuleMatrix> out;
    for (std::size_t i : images) {
        const fs::path f = dir / layout::image_name("est", i, "pbm");
        if (!fs::exists(f)) {
            throw MissingInputError("estimate " + f.string() + " not found; run `pgclab attack --printer " +
                                    std::string(to_string(p)) + "` first");
        }
        out.push_back(read_pbm(f));
    }
    return out;
}

} // namespace

void cmd_gen(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    const PairedDataset ds = build_dataset(cfg.n_images, cfg.geometry, cfg.split, cfg.printers, cfg.dataset_seed);
    const fs::path dir = layout::dataset_dir(cfg);
    make_dirs(dir / "originals");
    for (const auto& p : ds.printers) make_dirs(dir / "scans" / std::string(to_string(p.id)));

    for (std::size_t i = 0; i < ds.size(); ++i) {
        write_pbm(ds.originals[i], dir / original_rel(i));
        for (std::size_t k = 0; k < ds.printers.size(); ++k) {
            write_pgm(ds.scans[k][i], dir / scan_rel(ds.printers[k].id, i));
        }
    }
    write_text_file(layout::manifest_path(cfg), manifest_json(cfg, ds).dump(2) + "\n");
    log << "gen: wrote " << ds.size() << " originals and " << ds.size() * ds.printers.size() << " scans to "
        << dir.string() << "\n";
}

PairedDataset load_dataset(const ExperimentConfig& cfg) {
    const fs::path mpath = layout::manifest_path(cfg);
    if (!fs::exists(mpath)) {
        throw MissingInputError("no dataset manifest at " + mpath.string() + "; run `pgclab gen` first");
    }
    std::ifstream is(mpath);
    json m;
    try {
        m = json::parse(is);
    } catch (const json::exception& e) {
        throw FormatError(mpath.string() + ": " + e.what());
    }

    PairedDataset ds;
    try {
        detail::read_geometry(m.at("geometry"), ds.geometry, "geometry");
        detail::read_split(m.at("split"), ds.split, "split");
        ds.seed = m.at("seed").get<std::uint64_t>();
        for (const auto& p : m.at("printers")) {
            PrinterChannel pc{parse_printer(p.at("id").get<std::string>()), ChannelParams{}};
            detail::read_channel_params(p.at("params"), pc.params, "params");
            ds.printers.push_back(pc);
        }
    } catch (const json::exception& e) {
        throw FormatError(mpath.string() + ": " + e.what());
    } catch (const ConfigError& e) {
        throw FormatError(mpath.string() + ": " + e.what());
    }

    const bool same = ds.geometry == cfg.geometry && ds.split == cfg.split && ds.seed == cfg.dataset_seed &&
                      ds.split.total() == cfg.n_images;
    if (!same) {
        throw ConfigError("dataset at " + layout::dataset_dir(cfg).string() +
                          " was generated from a different geometry/split/seed; rerun `pgclab gen`");
    }
    for (const auto& want : cfg.printers) {
        if (!ds.has_printer(want.id) || !(ds.params_for(want.id) == want.params)) {
            throw ConfigError("dataset scans for printer " + std::string(to_string(want.id)) +
                              " are missing or used different channel params; rerun `pgclab gen`");
        }
    }

    const fs::path dir = layout::dataset_dir(cfg);
    const std::size_t n = ds.split.total();
    ds.originals.reserve(n);
    ds.scans.resize(ds.printers.size());
    for (std::size_t i = 0; i < n; ++i) {
        ds.originals.push_back(read_pbm(dir / original_rel(i)));
        for (std::size_t k = 0; k < ds.printers.size(); ++k) {
            ds.scans[k].push_back(read_pgm(dir / scan_rel(ds.printers[k].id, i), PixelDomain::byte0_255));
        }
    }
    return ds;
}

void cmd_train(const ExperimentConfig& cfg, PrinterId printer, Arch arch, std::ostream& log) {
    cfg.validate();
    require_printer(cfg, printer);
    const PairedDataset ds = load_dataset(cfg);
    const nn::TrainConfig& tc = cfg.training.for_printer(printer);

    log << "train: " << to_string(arch) << " on " << to_string(printer) << ", "
        << ds.block_count(Split::train) << " blocks, " << tc.epochs << " epochs\n";
    const std::size_t report_every = std::max<std::size_t>(1, tc.epochs / 10);
    auto hook = [&](std::size_t epoch, double loss, const nn::MlpModel&) {
        if ((epoch + 1) % report_every == 0 || epoch + 1 == tc.epochs) {
            log << "  epoch " << epoch + 1 << "/" << tc.epochs << " loss " << format_number(loss) << "\n";
        }
    };
    TrainResult tr = train_attack(ds, printer, arch, tc, hook);
    const AttackModel am = calibrate_threshold(tr.attack, ds);

    make_dirs(cfg.output_dir / "models");
    nn::save_model(am.model, am.threshold, layout::model_path(cfg, printer, arch));
    std::ostringstream csv;
    csv << "epoch,loss\n";
    for (std::size_t e = 0; e < tr.loss_history.size(); ++e) {
        csv << e + 1 << ',' << format_number(tr.loss_history[e]) << '\n';
    }
    write_csv(layout::loss_path(cfg, printer, arch), csv.str());
    log << "train: threshold " << format_number(*am.threshold) << ", model written to "
        << layout::model_path(cfg, printer, arch).string() << "\n";
}

AttackSummary cmd_attack(const ExperimentConfig& cfg, PrinterId printer, Arch arch,
                         const std::optional<fs::path>& model, std::ostream& log) {
    cfg.validate();
    require_printer(cfg, printer);
    const fs::path mpath = model.value_or(layout::model_path(cfg, printer, arch));
    if (!fs::exists(mpath)) {
        throw MissingInputError("model " + mpath.string() + " not found; run `pgclab train --printer " +
                                std::string(to_string(printer)) + " --arch " + std::string(to_string(arch)) +
                                "` first");
    }
    const PairedDataset ds = load_dataset(cfg);
    nn::SavedModel saved = nn::load_model(mpath);
    if (saved.model.input_dim() != ds.geometry.block_dim() || saved.model.output_dim() != ds.geometry.block_dim()) {
        throw DimensionError("model " + mpath.string() + " does not match block size " +
                             std::to_string(ds.geometry.block_px));
    }
    AttackModel am{std::move(saved.model), saved.threshold, printer};

    const ThrBaseline thr = baseline_thr(ds, printer);
    const auto& scans = ds.scans_for(printer);
    const fs::path model_dir = layout::estimates_dir(cfg, printer, to_string(arch));
    const fs::path thr_dir = layout::estimates_dir(cfg, printer, "thr");
    make_dirs(model_dir);
    make_dirs(thr_dir);

    const std::string a = std::string(to_string(arch));
    std::ostringstream csv;
    csv << "image," << a << "_pearson," << a << "_hamming,thr_pearson,thr_hamming\n";
    AttackSummary sum;
    for (std::size_t k = 0; k < thr.images.size(); ++k) {
        const std::size_t i = thr.images[k];
        const PixelImage target = ds.rendered(i);
        const Regeneration r = regenerate(am, scans[i], ds.geometry);
        const PixelImage ink = ink_intensity(scans[i]);

        const double mp = pearson(std::span<const float>(target.values), std::span<const float>(r.grey.values));
        const double mh = hamming_norm(ds.originals[i], r.estimate);
        const double tp = pearson(std::span<const float>(target.values), std::span<const float>(ink.values));
        const double th = hamming_norm(ds.originals[i], thr.estimates[k]);
        sum.model_pearson += mp;
        sum.model_hamming += mh;
        sum.thr_pearson += tp;
        sum.thr_hamming += th;
        csv << i << ',' << format_number(mp) << ',' << format_number(mh) << ',' << format_number(tp) << ','
            << format_number(th) << '\n';

        write_pbm(r.estimate, model_dir / layout::image_name("est", i, "pbm"));
        write_pbm(thr.estimates[k], thr_dir / layout::image_name("est", i, "pbm"));
    }
    const auto n = static_cast<double>(thr.images.size());
    sum.model_pearson /= n;
    sum.model_hamming /= n;
    sum.thr_pearson /= n;
    sum.thr_hamming /= n;
    csv << "mean," << format_number(sum.model_pearson) << ',' << format_number(sum.model_hamming) << ','
        << format_number(sum.thr_pearson) << ',' << format_number(sum.thr_hamming) << '\n';
    write_csv(layout::metrics_path(cfg, printer, arch), csv.str());
    write_text_file(thr_dir / "threshold.txt", format_number(thr.threshold) + "\n");

    log << "attack: " << a << " pearson " << format_number(sum.model_pearson) << " hamming "
        << format_number(sum.model_hamming) << " | thr pearson " << format_number(sum.thr_pearson)
        << " hamming " << format_number(sum.thr_hamming) << "\n";
    return sum;
}

void cmd_roc(const ExperimentConfig& cfg, PrinterId printer, Arch arch, std::ostream& log) {
    cfg.validate();
    require_printer(cfg, printer);
    const PairedDataset ds = load_dataset(cfg);
    const auto test = ds.indices(Split::test);
    const std::string a = std::string(to_string(arch));
    const std::vector<std::pair<std::string, std::vector<ModuleMatrix>>> methods = {
        {a, read_estimates(cfg, printer, a, test)},
        {"thr", read_estimates(cfg, printer, "thr", test)},
    };

    const fs::path dir = layout::roc_dir(cfg, printer, arch);
    make_dirs(dir);
    const ChannelParams& params = ds.params_for(printer);
    const ReprintSeeds seeds = ReprintSeeds::derive(cfg.evaluation.seed);

    std::ostringstream summary;
    summary << "method,measure,auc";
    for (double t : cfg.evaluation.target_pfa) summary << ",pd_at_pfa_" << format_number(t);
    summary << '\n';

    std::vector<std::pair<Measure, std::vector<std::pair<std::string, RocCurve>>>> curves;
    for (Measure m : cfg.evaluation.measures) curves.push_back({m, {}});

    for (const auto& [name, estimates] : methods) {
        const ScoreExperiment se = score_experiment(ds, estimates, params, seeds);
        for (auto& [measure, list] : curves) {
            const ScoreSet& scores = measure == Measure::pearson ? se.pearson : se.hamming;
            const RocCurve curve = roc(scores);
            const std::string base = name + "_" + std::string(to_string(measure));
            std::ostringstream rc, sc;
            write_roc_csv(curve, rc);
            write_scores_csv(scores, sc);
            write_csv(dir / ("roc_" + base + ".csv"), rc.str());
            write_csv(dir / ("scores_" + base + ".csv"), sc.str());
            summary << name << ',' << to_string(measure) << ',' << format_number(auc(curve));
            for (double t : cfg.evaluation.target_pfa) summary << ',' << format_number(pd_at_pfa(curve, t));
            summary << '\n';
            log << "roc: " << name << " " << to_string(measure) << " auc " << format_number(auc(curve)) << "\n";
            list.emplace_back(name, curve);
        }

        if (cfg.evaluation.diff_images) {
            make_dirs(dir / "diff");
            for (std::size_t k = 0; k < test.size(); ++k) {
                const PixelImage x = ds.rendered(test[k]);
                const PixelImage e = render(estimates[k], ds.geometry.module_px);
                PixelImage d(x.height, x.width, PixelDomain::binary01);
                for (std::size_t p = 0; p < d.values.size(); ++p) d.values[p] = x.values[p] != e.values[p] ? 1.0f : 0.0f;
                write_pgm(d, dir / "diff" / layout::image_name(name, test[k], "pgm"));
            }
        }
    }
    write_csv(dir / "summary.csv", summary.str());

    if (cfg.evaluation.plots) {
        for (const auto& [measure, list] : curves) {
            std::vector<NamedCurve> named;
            for (const auto& [name, curve] : list) named.push_back({name, &curve});
            const std::string title = std::string(to_string(printer)) + " " + std::string(to_string(measure));
            write_text_file(dir / ("roc_" + std::string(to_string(measure)) + ".svg"), roc_svg(title, named));
        }
    }
}

} // namespace pgc
