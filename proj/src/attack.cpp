#include "pgc/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pgc/error.hpp"
#include "pgc/rng.hpp"

namespace pgc {

std::string_view to_string(Split s) {
    switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    }
    return "unknown";
}

Split PairedDataset::split_of(std::size_t image) const {
    if (image < split.train) return Split::train;
    if (image < split.train + split.val) return Split::val;
    return Split::test;
}

std::vector<std::size_t> PairedDataset::indices(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < originals.size(); ++i) {
        if (split_of(i) == s) out.push_back(i);
    }
    return out;
}

std::size_t PairedDataset::block_count(Split s) const {
    return indices(s).size() * geometry.blocks_per_image();
}

bool PairedDataset::has_printer(PrinterId id) const {
    return std::any_of(printers.begin(), printers.end(), [id](const auto& p) { return p.id == id; });
}

namespace {

std::size_t printer_slot(const PairedDataset& ds, PrinterId id) {
    for (std::size_t k = 0; k < ds.printers.size(); ++k) {
        if (ds.printers[k].id == id) return k;
    }
    throw LookupError("printer " + std::string(to_string(id)) + " is not part of this dataset");
}

} // namespace

const std::vector<PixelImage>& PairedDataset::scans_for(PrinterId id) const {
    return scans.at(printer_slot(*this, id));
}

const ChannelParams& PairedDataset::params_for(PrinterId id) const {
    return printers[printer_slot(*this, id)].params;
}

std::uint64_t original_seed(std::uint64_t dataset_seed, std::size_t image) {
    return derive_seed(dataset_seed, "originals") ^ static_cast<std::uint64_t>(image);
}

std::uint64_t scan_seed(std::uint64_t dataset_seed, PrinterId p, std::size_t image) {
    const std::string tag = "scan/" + std::string(to_string(p));
    return derive_seed(dataset_seed, tag) ^ static_cast<std::uint64_t>(image);
}

PairedDataset build_dataset(std::size_t n_images, const Geometry& geometry, const SplitSizes& split,
                            std::span<const PrinterChannel> printers, std::uint64_t seed) {
    geometry.validate();
    if (split.total() != n_images) {
        throw ParameterError("dataset: split sizes " + std::to_string(split.train) + "/" +
                             std::to_string(split.val) + "/" + std::to_string(split.test) +
                             " do not sum to n_images " + std::to_string(n_images));
    }
    for (std::size_t a = 0; a < printers.size(); ++a) {
        printers[a].params.validate();
        for (std::size_t b = a + 1; b < printers.size(); ++b) {
            if (printers[a].id == printers[b].id) {
                throw ParameterError("dataset: printer " + std::string(to_string(printers[a].id)) +
                                     " listed twice");
            }
        }
    }

    PairedDataset ds;
    ds.geometry = geometry;
    ds.split = split;
    ds.seed = seed;
    ds.printers.assign(printers.begin(), printers.end());
    ds.originals.reserve(n_images);
    for (std::size_t i = 0; i < n_images; ++i) {
        ds.originals.push_back(generate_module_matrix(original_seed(seed, i), geometry.modules, geometry.modules));
    }
    ds.scans.resize(printers.size());
    for (std::size_t k = 0; k < printers.size(); ++k) ds.scans[k].reserve(n_images);
    for (std::size_t i = 0; i < n_images; ++i) {
        const PixelImage img = ds.rendered(i);
        for (std::size_t k = 0; k < printers.size(); ++k) {
            ds.scans[k].push_back(print_scan(img, printers[k].params, scan_seed(seed, printers[k].id, i)));
        }
    }
    return ds;
}

std::string_view to_string(Arch a) {
    switch (a) {
    case Arch::fc2: return "fc2";
    case Arch::fc3: return "fc3";
    case Arch::fc4: return "fc4";
    case Arch::bn: return "bn";
    }
    return "unknown";
}

Arch parse_arch(std::string_view s) {
    for (Arch a : {Arch::fc2, Arch::fc3, Arch::fc4, Arch::bn}) {
        if (to_string(a) == s) return a;
    }
    throw LookupError("unknown architecture '" + std::string(s) + "' (expected fc2, fc3, fc4 or bn)");
}

nn::MlpModel build_arch(Arch a, std::uint64_t seed, std::size_t dim) {
    switch (a) {
    case Arch::fc2: return nn::build_fc(2, seed, dim);
    case Arch::fc3: return nn::build_fc(3, seed, dim);
    case Arch::fc4: return nn::build_fc(4, seed, dim);
    case Arch::bn: return nn::build_bn(seed, dim);
    }
    throw LookupError("unknown architecture");
}

BlockPairs collect_blocks(const PairedDataset& ds, PrinterId printer, Split split) {
    const auto& scans = ds.scans_for(printer);
    BlockPairs out;
    out.dim = ds.geometry.block_dim();
    for (std::size_t i : ds.indices(split)) {
        const BlockSet in = split_blocks(ink_intensity(scans[i]), ds.geometry.block_px);
        const BlockSet tgt = split_blocks(ds.rendered(i), ds.geometry.block_px);
        for (std::size_t b = 0; b < in.blocks.size(); ++b) {
            out.inputs.insert(out.inputs.end(), in.blocks[b].begin(), in.blocks[b].end());
            out.targets.insert(out.targets.end(), tgt.blocks[b].begin(), tgt.blocks[b].end());
        }
        out.count += in.blocks.size();
    }
    return out;
}

std::vector<double> train_model(nn::MlpModel& model, const BlockPairs& data, const nn::TrainConfig& cfg,
                                const EpochHook& on_epoch) {
    cfg.validate();
    if (data.count == 0) throw ParameterError("train: empty training split");
    if (data.dim != model.input_dim() || data.dim != model.output_dim()) {
        throw DimensionError("train: block dimension " + std::to_string(data.dim) +
                             " does not match the model");
    }

    const std::size_t n = data.count;
    const std::size_t dim = data.dim;
    nn::AdamState adam = nn::init_adam(model);
    std::vector<double> history;
    history.reserve(cfg.epochs);
    std::vector<std::size_t> order(n);
    std::vector<float> bx, bt;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(cfg.seed, "shuffle") ^ static_cast<std::uint64_t>(epoch));
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

        double total = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t b = std::min(cfg.batch_size, n - start);
            bx.resize(b * dim);
            bt.resize(b * dim);
            for (std::size_t j = 0; j < b; ++j) {
                const std::size_t src = order[start + j] * dim;
                std::copy_n(data.inputs.begin() + static_cast<std::ptrdiff_t>(src), dim,
                            bx.begin() + static_cast<std::ptrdiff_t>(j * dim));
                std::copy_n(data.targets.begin() + static_cast<std::ptrdiff_t>(src), dim,
                            bt.begin() + static_cast<std::ptrdiff_t>(j * dim));
            }
            const auto step = nn::backward(model, bx, bt, b, cfg);
            nn::optimizer_step(model, step.grads, adam, cfg.learning_rate);
            total += step.loss * static_cast<double>(b);
        }
        history.push_back(total / static_cast<double>(n));
        if (on_epoch) on_epoch(epoch, history.back(), model);
    }
    return history;
}

TrainResult train_attack(const PairedDataset& ds, PrinterId printer, Arch arch, const nn::TrainConfig& cfg,
                         const EpochHook& on_epoch) {
    cfg.validate();
    if (!ds.has_printer(printer)) {
        throw LookupError("printer " + std::string(to_string(printer)) + " is not part of this dataset");
    }
    const BlockPairs data = collect_blocks(ds, printer, Split::train);
    if (data.count == 0) throw ParameterError("train_attack: empty training split");

    TrainResult out;
    out.attack.printer = printer;
    out.attack.model = build_arch(arch, derive_seed(cfg.seed, "init"), ds.geometry.block_dim());
    out.loss_history = train_model(out.attack.model, data, cfg, on_epoch);
    return out;
}

std::array<double, 101> threshold_grid() {
    std::array<double, 101> g{};
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = static_cast<double>(k) / 100.0;
    return g;
}

Calibration calibrate_on(std::span<const float> values, std::span<const float> targets) {
    if (values.size() != targets.size()) throw DimensionError("calibration: values and targets differ in length");
    if (values.empty()) throw ParameterError("calibration: empty validation data");

    // rank(v) = number of grid points t with v >= t; binarize at grid[k] gives 1 iff k < rank(v).
    const auto grid = threshold_grid();
    constexpr std::size_t kBins = 102;
    std::array<std::uint64_t, kBins> ones{}, zeros{};
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        auto rank = static_cast<std::ptrdiff_t>(std::floor(v * 100.0)) + 1;
        rank = std::clamp<std::ptrdiff_t>(rank, 0, 101);
        while (rank > 0 && !(v >= grid[static_cast<std::size_t>(rank - 1)])) --rank;
        while (rank < 101 && v >= grid[static_cast<std::size_t>(rank)]) ++rank;
        (targets[i] != 0.0f ? ones : zeros)[static_cast<std::size_t>(rank)]++;
    }

    std::uint64_t total_zeros = 0;
    for (auto z : zeros) total_zeros += z;

    // errors(k) = #(target 1, rank <= k) + #(target 0, rank > k)
    std::uint64_t ones_le = ones[0];
    std::uint64_t zeros_le = zeros[0];
    std::uint64_t best_err = UINT64_MAX;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (k > 0) {
            ones_le += ones[k];
            zeros_le += zeros[k];
        }
        const std::uint64_t err = ones_le + (total_zeros - zeros_le);
        if (err < best_err) {
            best_err = err;
            best_k = k;
        }
    }
    return {grid[best_k], static_cast<double>(best_err) / static_cast<double>(values.size())};
}

AttackModel calibrate_threshold(const AttackModel& am, const PairedDataset& ds) {
    const BlockPairs val = collect_blocks(ds, am.printer, Split::val);
    if (val.count == 0) throw ParameterError("calibrate_threshold: empty validation split");
    const auto outputs = nn::forward_batch(am.model, val.inputs, val.count);
    AttackModel out = am;
    out.threshold = calibrate_on(outputs, val.targets).threshold;
    return out;
}

Regeneration regenerate(const AttackModel& am, const PixelImage& scan, const Geometry& geometry) {
    if (!am.threshold) throw StateError("estimate_code: model has no calibrated threshold");
    BlockSet bs = split_blocks(ink_intensity(scan), geometry.block_px);
    const std::size_t dim = geometry.block_dim();
    std::vector<float> stacked;
    stacked.reserve(bs.blocks.size() * dim);
    for (const auto& b : bs.blocks) stacked.insert(stacked.end(), b.begin(), b.end());
    const auto out = nn::forward_batch(am.model, stacked, bs.blocks.size());
    for (std::size_t b = 0; b < bs.blocks.size(); ++b) {
        std::copy_n(out.begin() + static_cast<std::ptrdiff_t>(b * dim), dim, bs.blocks[b].begin());
    }
    Regeneration r;
    r.grey = assemble_blocks(bs);
    r.estimate = modules_from_pixels(binarize(r.grey, *am.threshold, Polarity::high_is_one), geometry.module_px);
    return r;
}

ModuleMatrix estimate_code(const AttackModel& am, const PixelImage& scan, const Geometry& geometry) {
    return regenerate(am, scan, geometry).estimate;
}

ModuleMatrix thr_estimate(const PixelImage& scan, double threshold, const Geometry& geometry) {
    return modules_from_pixels(binarize(ink_intensity(scan), threshold, Polarity::high_is_one),
                               geometry.module_px);
}

ThrBaseline baseline_thr(const PairedDataset& ds, PrinterId printer) {
    const auto& scans = ds.scans_for(printer);
    const auto val = ds.indices(Split::val);
    if (val.empty()) throw ParameterError("baseline_thr: empty validation split");

    std::vector<float> values, targets;
    for (std::size_t i : val) {
        const PixelImage ink = ink_intensity(scans[i]);
        const PixelImage tgt = ds.rendered(i);
        values.insert(values.end(), ink.values.begin(), ink.values.end());
        targets.insert(targets.end(), tgt.values.begin(), tgt.values.end());
    }
    ThrBaseline out;
    out.threshold = calibrate_on(values, targets).threshold;
    out.images = ds.indices(Split::test);
    for (std::size_t i : out.images) out.estimates.push_back(thr_estimate(scans[i], out.threshold, ds.geometry));
    return out;
}

} // namespace pgc
