#include <doctest.h>

#include <string>

#include "pgc/config.hpp"
#include "pgc/error.hpp"

using namespace pgc;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(PGC_SOURCE_DIR) / "configs";

// Message of the ConfigError thrown by parsing `text`, or "" if none.
std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool mentions(const std::string& msg, const std::string& needle) {
    return msg.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("shipped configs match the built-in defaults") {
    CHECK(dump_config(load_config(kConfigs / "desk.json")) == dump_config(ExperimentConfig::desk()));
    CHECK(dump_config(load_config(kConfigs / "full.json")) == dump_config(ExperimentConfig::full()));
    const auto smoke = load_config(kConfigs / "smoke.json");
    CHECK(smoke.n_images == 6);
    CHECK(smoke.printers.size() == 2);
    CHECK(smoke.params_for(PrinterId::HP).noise_sigma == 0.1);
    CHECK(smoke.params_for(PrinterId::HP).psf_sigma == preset(PrinterId::HP).psf_sigma);
}

TEST_CASE("desk and full-scale defaults") {
    const auto d = ExperimentConfig::desk();
    CHECK(d.n_images == 70);
    CHECK(d.split == SplitSizes{40, 10, 20});
    CHECK(d.training.defaults.epochs == 150);
    CHECK(d.training.defaults.batch_size == 128);
    CHECK(d.training.defaults.learning_rate == 1e-3);
    CHECK(d.training.arch == Arch::bn);
    CHECK(d.printers.size() == 4);
    CHECK_NOTHROW(d.validate());

    const auto p = ExperimentConfig::full();
    CHECK(p.n_images == 384);
    CHECK(p.split == SplitSizes{100, 50, 234});
    CHECK(p.training.defaults.epochs == 1000);
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("dump and parse round trip") {
    auto c = ExperimentConfig::desk();
    c.n_images = 9;
    c.split = {5, 2, 2};
    c.printers.resize(2);
    c.printers[1].params.noise_sigma = 0.2;
    nn::TrainConfig hp = c.training.defaults;
    hp.epochs = 3;
    hp.regularizer = nn::Regularizer::l2_weights;
    hp.lambda = 1e-4;
    c.training.per_printer.emplace_back(c.printers[1].id, hp);
    c.evaluation.measures = {Measure::hamming};
    c.output_dir = "somewhere/else";
    const std::string text = dump_config(c);
    const auto back = parse_config(text);
    CHECK(dump_config(back) == text);
    CHECK(back.training.for_printer(c.printers[1].id).epochs == 3);
    CHECK(back.training.for_printer(c.printers[0].id).epochs == 150);
}

TEST_CASE("partial documents keep defaults and per-printer overrides inherit") {
    const auto c = parse_config(R"({"printers": [{"id": "LX", "gain": 0.8}],
                                     "training": {"epochs": 20, "per_printer": {"LX": {"batch_size": 64}}}})");
    CHECK(c.n_images == 70);
    REQUIRE(c.printers.size() == 1);
    CHECK(c.params_for(PrinterId::LX).gain == 0.8);
    CHECK(c.params_for(PrinterId::LX).psf_sigma == preset(PrinterId::LX).psf_sigma);
    CHECK(c.training.for_printer(PrinterId::LX).batch_size == 64);
    CHECK(c.training.for_printer(PrinterId::LX).epochs == 20);
    CHECK_THROWS_AS(c.params_for(PrinterId::SA), LookupError);
}

TEST_CASE("validation names the offending field") {
    CHECK(mentions(config_error(R"({"dataset": {"n_images": 10}})"), "dataset.split"));
    CHECK(mentions(config_error(R"({"dataset": {"n_images": 0, "split": {"train": 0, "val": 0, "test": 0}}})"),
                   "dataset.n_images"));
    CHECK(mentions(config_error(R"({"printers": [{"id": "SA"}, {"id": "SA"}]})"), "printers[1].id"));
    CHECK(mentions(config_error(R"({"printers": [{"id": "ZZ"}]})"), "printers[0].id"));
    CHECK(mentions(config_error(R"({"printers": []})"), "printers"));
    CHECK(mentions(config_error(R"({"printers": [{"id": "SA", "dot_gain_prob": 2}]})"), "printers[0]"));
    CHECK(mentions(config_error(R"({"printers": [{"id": "SA", "blur": 2}]})"), "printers[0].blur"));
    CHECK(mentions(config_error(R"({"training": {"batch_size": 0}})"), "training.batch_size"));
    CHECK(mentions(config_error(R"({"training": {"learning_rate": -1}})"), "training.learning_rate"));
    CHECK(mentions(config_error(R"({"training": {"arch": "cnn"}})"), "training.arch"));
    CHECK(mentions(config_error(R"({"training": {"regularizer": "l1"}})"), "training.regularizer"));
    CHECK(mentions(config_error(R"({"training": {"per_printer": {"HP": {"epochs": 0}}}})"),
                   "training.per_printer.HP.epochs"));
    CHECK(mentions(config_error(R"({"printers": [{"id": "SA"}], "training": {"per_printer": {"HP": {}}}})"),
                   "training.per_printer.HP"));
    CHECK(mentions(config_error(R"({"evaluation": {"target_pfa": [0.1, 1.5]}})"), "evaluation.target_pfa[1]"));
    CHECK(mentions(config_error(R"({"evaluation": {"measures": ["ssim"]}})"), "evaluation.measures[0]"));
    CHECK(mentions(config_error(R"({"evaluation": {"measures": []}})"), "evaluation.measures"));
    CHECK(mentions(config_error(R"({"geometry": {"block_px": 25}})"), "geometry"));
    CHECK(mentions(config_error(R"({"geometry": {"modules": -3}})"), "geometry.modules"));
    CHECK(mentions(config_error(R"({"output_dir": ""})"), "output_dir"));
    CHECK(mentions(config_error(R"({"format_version": 2})"), "format_version"));
    CHECK(mentions(config_error(R"({"dataset": {"seed": "x"}})"), "dataset.seed"));
    CHECK(mentions(config_error(R"({"colour": true})"), "colour"));
    CHECK(mentions(config_error("[1, 2]"), "<root>"));
}

TEST_CASE("syntax errors carry a position") {
    const std::string msg = config_error("{\n  \"dataset\": {\n    \"n_images\": ,\n  }\n}");
    CHECK(mentions(msg, "line 3"));
    CHECK(mentions(msg, "<config>"));
}

TEST_CASE("seed override and missing files") {
    auto c = ExperimentConfig::desk();
    c.training.per_printer.emplace_back(PrinterId::HP, c.training.defaults);
    c.override_seed(99);
    CHECK(c.dataset_seed == 99);
    CHECK(c.training.defaults.seed == 99);
    CHECK(c.training.for_printer(PrinterId::HP).seed == 99);
    CHECK(c.evaluation.seed == 99);
    CHECK_THROWS_AS(load_config(kConfigs / "missing.json"), IoError);
}
