#include "pgc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "config_json.hpp"
#include "pgc/error.hpp"

namespace pgc {

using detail::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& msg) {
    throw ConfigError("field '" + field + "': " + msg);
}

std::string join(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) field_error(where.empty() ? "<root>" : where, "must be an object");
}

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            field_error(join(where, key), "unknown key");
        }
    }
}

std::size_t get_count(const json& j, const std::string& field) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        field_error(field, "must be a non-negative integer");
    }
    return j.get<std::size_t>();
}

std::uint64_t get_seed(const json& j, const std::string& field) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        field_error(field, "must be a non-negative integer seed");
    }
    return j.get<std::uint64_t>();
}

double get_number(const json& j, const std::string& field) {
    if (!j.is_number()) field_error(field, "must be a number");
    return j.get<double>();
}

bool get_bool(const json& j, const std::string& field) {
    if (!j.is_boolean()) field_error(field, "must be true or false");
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& field) {
    if (!j.is_string()) field_error(field, "must be a string");
    return j.get<std::string>();
}

template <typename Fn>
auto rethrow_as_field(const std::string& field, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        field_error(field, e.what());
    }
}

void read_train_config(const json& j, nn::TrainConfig& t, const std::string& where) {
    require_object(j, where);
    reject_unknown(j, where, {"epochs", "batch_size", "learning_rate", "lambda", "regularizer", "seed"});
    if (j.contains("epochs")) t.epochs = get_count(j["epochs"], join(where, "epochs"));
    if (j.contains("batch_size")) t.batch_size = get_count(j["batch_size"], join(where, "batch_size"));
    if (j.contains("learning_rate")) t.learning_rate = get_number(j["learning_rate"], join(where, "learning_rate"));
    if (j.contains("lambda")) t.lambda = get_number(j["lambda"], join(where, "lambda"));
    if (j.contains("regularizer")) {
        const std::string r = get_string(j["regularizer"], join(where, "regularizer"));
        if (r == "none") t.regularizer = nn::Regularizer::none;
        else if (r == "l2_weights") t.regularizer = nn::Regularizer::l2_weights;
        else field_error(join(where, "regularizer"), "must be \"none\" or \"l2_weights\"");
    }
    if (j.contains("seed")) t.seed = get_seed(j["seed"], join(where, "seed"));
}

void check_train_config(const nn::TrainConfig& t, const std::string& where) {
    if (t.epochs == 0) field_error(join(where, "epochs"), "must be >= 1");
    if (t.batch_size == 0) field_error(join(where, "batch_size"), "must be >= 1");
    if (!(t.learning_rate > 0.0) || !std::isfinite(t.learning_rate)) {
        field_error(join(where, "learning_rate"), "must be > 0");
    }
    if (!(t.lambda >= 0.0) || !std::isfinite(t.lambda)) field_error(join(where, "lambda"), "must be >= 0");
}

std::vector<PrinterChannel> default_printers() {
    std::vector<PrinterChannel> out;
    for (PrinterId id : kAllPrinters) out.push_back({id, preset(id)});
    return out;
}

} // namespace

namespace detail {

json to_json(const ChannelParams& p) {
    return json{{"dot_gain_radius", p.dot_gain_radius}, {"dot_gain_prob", p.dot_gain_prob},
                {"psf_sigma", p.psf_sigma},             {"gain", p.gain},
                {"offset", p.offset},                   {"noise_sigma", p.noise_sigma},
                {"quantize", p.quantize}};
}

json to_json(const Geometry& g) {
    return json{{"modules", g.modules}, {"module_px", g.module_px}, {"block_px", g.block_px}};
}

json to_json(const SplitSizes& s) { return json{{"train", s.train}, {"val", s.val}, {"test", s.test}}; }

json to_json(const nn::TrainConfig& t) {
    return json{{"epochs", t.epochs},
                {"batch_size", t.batch_size},
                {"learning_rate", t.learning_rate},
                {"lambda", t.lambda},
                {"regularizer", t.regularizer == nn::Regularizer::none ? "none" : "l2_weights"},
                {"seed", t.seed}};
}

void read_channel_params(const json& j, ChannelParams& p, const std::string& where, const char* skip_key) {
    require_object(j, where);
    for (const auto& [key, value] : j.items()) {
        const std::string field = join(where, key);
        if (skip_key && key == skip_key) continue;
        if (key == "dot_gain_radius") p.dot_gain_radius = get_count(value, field);
        else if (key == "dot_gain_prob") p.dot_gain_prob = get_number(value, field);
        else if (key == "psf_sigma") p.psf_sigma = get_number(value, field);
        else if (key == "gain") p.gain = get_number(value, field);
        else if (key == "offset") p.offset = get_number(value, field);
        else if (key == "noise_sigma") p.noise_sigma = get_number(value, field);
        else if (key == "quantize") p.quantize = get_bool(value, field);
        else field_error(field, "unknown key");
    }
}

void read_geometry(const json& j, Geometry& g, const std::string& where) {
    require_object(j, where);
    reject_unknown(j, where, {"modules", "module_px", "block_px"});
    if (j.contains("modules")) g.modules = get_count(j["modules"], join(where, "modules"));
    if (j.contains("module_px")) g.module_px = get_count(j["module_px"], join(where, "module_px"));
    if (j.contains("block_px")) g.block_px = get_count(j["block_px"], join(where, "block_px"));
}

void read_split(const json& j, SplitSizes& s, const std::string& where) {
    require_object(j, where);
    reject_unknown(j, where, {"train", "val", "test"});
    if (j.contains("train")) s.train = get_count(j["train"], join(where, "train"));
    if (j.contains("val")) s.val = get_count(j["val"], join(where, "val"));
    if (j.contains("test")) s.test = get_count(j["test"], join(where, "test"));
}

} // namespace detail

const nn::TrainConfig& TrainingConfig::for_printer(PrinterId id) const {
    for (const auto& [p, cfg] : per_printer) {
        if (p == id) return cfg;
    }
    return defaults;
}

ExperimentConfig ExperimentConfig::desk() {
    ExperimentConfig c;
    c.printers = default_printers();
    c.training.defaults.epochs = 150;
    c.training.defaults.seed = 7;
    return c;
}

ExperimentConfig ExperimentConfig::full() {
    ExperimentConfig c = desk();
    c.n_images = 384;
    c.split = {100, 50, 234};
    c.training.defaults.epochs = 1000;
    c.output_dir = "runs/full";
    return c;
}

void ExperimentConfig::validate() const {
    rethrow_as_field("geometry", [&] { geometry.validate(); });
    if (n_images == 0) field_error("dataset.n_images", "must be >= 1");
    if (split.total() != n_images) {
        field_error("dataset.split", "sizes " + std::to_string(split.train) + "/" + std::to_string(split.val) +
                                         "/" + std::to_string(split.test) + " do not sum to n_images " +
                                         std::to_string(n_images));
    }
    if (printers.empty()) field_error("printers", "must list at least one printer");
    for (std::size_t a = 0; a < printers.size(); ++a) {
        const std::string where = "printers[" + std::to_string(a) + "]";
        rethrow_as_field(where, [&] { printers[a].params.validate(); });
        for (std::size_t b = a + 1; b < printers.size(); ++b) {
            if (printers[a].id == printers[b].id) {
                field_error("printers[" + std::to_string(b) + "].id",
                            "duplicate printer id " + std::string(to_string(printers[b].id)));
            }
        }
    }
    check_train_config(training.defaults, "training");
    for (const auto& [id, cfg] : training.per_printer) {
        const std::string where = "training.per_printer." + std::string(to_string(id));
        if (!has_printer(id)) field_error(where, "printer is not listed under printers");
        check_train_config(cfg, where);
    }
    if (evaluation.measures.empty()) field_error("evaluation.measures", "must list at least one measure");
    for (std::size_t k = 0; k < evaluation.target_pfa.size(); ++k) {
        const double t = evaluation.target_pfa[k];
        if (!(t >= 0.0 && t <= 1.0)) {
            field_error("evaluation.target_pfa[" + std::to_string(k) + "]", "must lie in [0, 1]");
        }
    }
    if (output_dir.empty()) field_error("output_dir", "must not be empty");
}

bool ExperimentConfig::has_printer(PrinterId id) const {
    return std::any_of(printers.begin(), printers.end(), [id](const auto& p) { return p.id == id; });
}

const ChannelParams& ExperimentConfig::params_for(PrinterId id) const {
    for (const auto& p : printers) {
        if (p.id == id) return p.params;
    }
    throw LookupError("printer " + std::string(to_string(id)) + " is not configured");
}

void ExperimentConfig::override_seed(std::uint64_t seed) {
    dataset_seed = seed;
    training.defaults.seed = seed;
    for (auto& [id, cfg] : training.per_printer) cfg.seed = seed;
    evaluation.seed = seed;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports "... at line L, column C: ..."
        throw ConfigError(source + ": " + e.what());
    }

    ExperimentConfig c = ExperimentConfig::desk();
    try {
        require_object(root, "");
        reject_unknown(root, "", {"format_version", "geometry", "dataset", "printers", "training",
                                  "evaluation", "output_dir"});
        if (root.contains("format_version")) {
            const auto v = get_count(root["format_version"], "format_version");
            if (v != static_cast<std::size_t>(kConfigFormatVersion)) {
                field_error("format_version", "unsupported version " + std::to_string(v) + " (expected " +
                                                  std::to_string(kConfigFormatVersion) + ")");
            }
        }
        if (root.contains("geometry")) detail::read_geometry(root["geometry"], c.geometry, "geometry");
        if (root.contains("dataset")) {
            const json& d = root["dataset"];
            require_object(d, "dataset");
            reject_unknown(d, "dataset", {"n_images", "split", "seed"});
            if (d.contains("n_images")) c.n_images = get_count(d["n_images"], "dataset.n_images");
            if (d.contains("split")) detail::read_split(d["split"], c.split, "dataset.split");
            if (d.contains("seed")) c.dataset_seed = get_seed(d["seed"], "dataset.seed");
        }
        if (root.contains("printers")) {
            const json& ps = root["printers"];
            if (!ps.is_array()) field_error("printers", "must be an array");
            c.printers.clear();
            for (std::size_t k = 0; k < ps.size(); ++k) {
                const std::string where = "printers[" + std::to_string(k) + "]";
                require_object(ps[k], where);
                if (!ps[k].contains("id")) field_error(where + ".id", "is required");
                const std::string id = get_string(ps[k]["id"], where + ".id");
                const PrinterId pid = rethrow_as_field(where + ".id", [&] { return parse_printer(id); });
                ChannelParams params = preset(pid);
                detail::read_channel_params(ps[k], params, where, "id");
                c.printers.push_back({pid, params});
            }
        }
        if (root.contains("training")) {
            const json& t = root["training"];
            require_object(t, "training");
            json base = t;
            if (t.contains("arch")) {
                const std::string a = get_string(t["arch"], "training.arch");
                c.training.arch = rethrow_as_field("training.arch", [&] { return parse_arch(a); });
                base.erase("arch");
            }
            json per = json::object();
            if (t.contains("per_printer")) {
                per = t["per_printer"];
                base.erase("per_printer");
            }
            read_train_config(base, c.training.defaults, "training");
            require_object(per, "training.per_printer");
            for (const auto& [key, value] : per.items()) {
                const std::string where = "training.per_printer." + key;
                const PrinterId pid = rethrow_as_field(where, [&] { return parse_printer(key); });
                nn::TrainConfig tc = c.training.defaults;
                read_train_config(value, tc, where);
                c.training.per_printer.emplace_back(pid, tc);
            }
        }
        if (root.contains("evaluation")) {
            const json& e = root["evaluation"];
            require_object(e, "evaluation");
            reject_unknown(e, "evaluation", {"measures", "target_pfa", "seed", "plots", "diff_images"});
            if (e.contains("measures")) {
                if (!e["measures"].is_array()) field_error("evaluation.measures", "must be an array");
                c.evaluation.measures.clear();
                for (std::size_t k = 0; k < e["measures"].size(); ++k) {
                    const std::string f = "evaluation.measures[" + std::to_string(k) + "]";
                    const std::string m = get_string(e["measures"][k], f);
                    c.evaluation.measures.push_back(rethrow_as_field(f, [&] { return parse_measure(m); }));
                }
            }
            if (e.contains("target_pfa")) {
                if (!e["target_pfa"].is_array()) field_error("evaluation.target_pfa", "must be an array");
                c.evaluation.target_pfa.clear();
                for (std::size_t k = 0; k < e["target_pfa"].size(); ++k) {
                    c.evaluation.target_pfa.push_back(
                        get_number(e["target_pfa"][k], "evaluation.target_pfa[" + std::to_string(k) + "]"));
                }
            }
            if (e.contains("seed")) c.evaluation.seed = get_seed(e["seed"], "evaluation.seed");
            if (e.contains("plots")) c.evaluation.plots = get_bool(e["plots"], "evaluation.plots");
            if (e.contains("diff_images")) c.evaluation.diff_images = get_bool(e["diff_images"], "evaluation.diff_images");
        }
        if (root.contains("output_dir")) c.output_dir = get_string(root["output_dir"], "output_dir");
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string dump_config(const ExperimentConfig& c) {
    json root;
    root["format_version"] = kConfigFormatVersion;
    root["geometry"] = detail::to_json(c.geometry);
    root["dataset"] = {{"n_images", c.n_images}, {"split", detail::to_json(c.split)}, {"seed", c.dataset_seed}};
    json printers = json::array();
    for (const auto& p : c.printers) {
        json j = detail::to_json(p.params);
        j["id"] = std::string(to_string(p.id));
        printers.push_back(j);
    }
    root["printers"] = printers;
    json training = detail::to_json(c.training.defaults);
    training["arch"] = std::string(to_string(c.training.arch));
    json per = json::object();
    for (const auto& [id, cfg] : c.training.per_printer) per[std::string(to_string(id))] = detail::to_json(cfg);
    training["per_printer"] = per;
    root["training"] = training;
    json measures = json::array();
    for (Measure m : c.evaluation.measures) measures.push_back(std::string(to_string(m)));
    root["evaluation"] = {{"measures", measures},
                          {"target_pfa", c.evaluation.target_pfa},
                          {"seed", c.evaluation.seed},
                          {"plots", c.evaluation.plots},
                          {"diff_images", c.evaluation.diff_images}};
    root["output_dir"] = c.output_dir.generic_string();
    return root.dump(2) + "\n";
}

} // namespace pgc
