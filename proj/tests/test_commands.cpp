#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "pgc/commands.hpp"
#include "pgc/error.hpp"
#include "pgc/image_io.hpp"
#include "support.hpp"

using namespace pgc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    }
    return files;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

// Four images split 2/1/1: SA printed through the identity channel, HP as preset.
ExperimentConfig tiny_config(const fs::path& out) {
    ExperimentConfig c = ExperimentConfig::desk();
    c.n_images = 4;
    c.split = {2, 1, 1};
    c.printers = {{PrinterId::SA, identity_channel()}, {PrinterId::HP, preset(PrinterId::HP)}};
    c.training.defaults.epochs = 2;
    c.output_dir = out;
    return c;
}

nn::MlpModel identity_model(std::size_t dim) {
    nn::MlpModel m;
    nn::DenseLayer l;
    l.spec = {dim, dim, nn::Activation::identity};
    l.weight.assign(dim * dim, 0.0f);
    for (std::size_t i = 0; i < dim; ++i) l.weight[i * dim + i] = 1.0f;
    l.bias.assign(dim, 0.0f);
    m.layers.push_back(l);
    return m;
}

} // namespace

TEST_CASE("gen writes originals, scans and manifest reproducibly") {
    test::TempDir dir("gen");
    const auto cfg = tiny_config(dir.path() / "run");
    std::ostringstream log;
    cmd_gen(cfg, log);

    std::size_t originals = 0;
    for (const auto& e : fs::directory_iterator(layout::dataset_dir(cfg) / "originals")) originals += e.is_regular_file();
    CHECK(originals == 4);
    for (const char* p : {"SA", "HP"}) {
        std::size_t scans = 0;
        for (const auto& e : fs::directory_iterator(layout::dataset_dir(cfg) / "scans" / p)) scans += e.is_regular_file();
        CHECK(scans == 4);
    }
    CHECK(fs::exists(layout::manifest_path(cfg)));
    const auto img0 = read_pbm(layout::dataset_dir(cfg) / "originals" / "img_0000.pbm");
    CHECK(img0.rows == 64);

    const auto first = snapshot(cfg.output_dir);
    cmd_gen(cfg, log);
    CHECK(snapshot(cfg.output_dir) == first);

    const auto ds = load_dataset(cfg);
    CHECK(ds.size() == 4);
    CHECK(ds.originals[0] == img0);
    CHECK(ds.block_count(Split::train) == 512);

    auto other = cfg;
    other.dataset_seed = 2;
    CHECK_THROWS_AS(load_dataset(other), ConfigError);
    auto noisier = cfg;
    noisier.printers[1].params.noise_sigma = 0.3;
    CHECK_THROWS_AS(load_dataset(noisier), ConfigError);
}

TEST_CASE("commands explain missing inputs") {
    test::TempDir dir("missing");
    const auto cfg = tiny_config(dir.path() / "run");
    std::ostringstream log;
    try {
        cmd_train(cfg, PrinterId::SA, Arch::bn, log);
        FAIL("expected MissingInputError");
    } catch (const MissingInputError& e) {
        CHECK(std::string(e.what()).find("pgclab gen") != std::string::npos);
    }
    cmd_gen(cfg, log);
    CHECK_THROWS_AS(cmd_attack(cfg, PrinterId::SA, Arch::bn, std::nullopt, log), MissingInputError);
    CHECK_THROWS_AS(cmd_roc(cfg, PrinterId::SA, Arch::bn, log), MissingInputError);
    CHECK_THROWS_AS(cmd_train(cfg, PrinterId::CA, Arch::bn, log), LookupError);
}

TEST_CASE("train writes a calibrated model and the loss table") {
    test::TempDir dir("train");
    const auto cfg = tiny_config(dir.path() / "run");
    std::ostringstream log;
    cmd_gen(cfg, log);
    cmd_train(cfg, PrinterId::HP, Arch::bn, log);

    const auto saved = nn::load_model(layout::model_path(cfg, PrinterId::HP, Arch::bn));
    CHECK(saved.model.dims() == std::vector<std::size_t>{576, 256, 128, 36, 128, 256, 576});
    REQUIRE(saved.threshold.has_value());
    CHECK(*saved.threshold >= 0.0);
    CHECK(*saved.threshold <= 1.0);

    const auto loss = lines(slurp(layout::loss_path(cfg, PrinterId::HP, Arch::bn)));
    REQUIRE(loss.size() == 1 + cfg.training.defaults.epochs);
    CHECK(loss[0] == "epoch,loss");
    CHECK(loss[1].rfind("1,", 0) == 0);

    const std::string bytes = slurp(layout::model_path(cfg, PrinterId::HP, Arch::bn));
    cmd_train(cfg, PrinterId::HP, Arch::bn, log);
    CHECK(slurp(layout::model_path(cfg, PrinterId::HP, Arch::bn)) == bytes);
}

TEST_CASE("attack and roc with a perfect model on the identity channel") {
    test::TempDir dir("attack");
    const auto cfg = tiny_config(dir.path() / "run");
    std::ostringstream log;
    cmd_gen(cfg, log);

    const fs::path model = dir.path() / "perfect.pgcm";
    nn::save_model(identity_model(576), 0.5, model);
    const auto sum = cmd_attack(cfg, PrinterId::SA, Arch::bn, model, log);
    CHECK(sum.model_hamming == 0.0);
    CHECK(sum.thr_hamming == 0.0);
    CHECK(sum.model_pearson == doctest::Approx(1.0));

    const auto metrics = lines(slurp(layout::metrics_path(cfg, PrinterId::SA, Arch::bn)));
    REQUIRE(metrics.size() == 1 + cfg.split.test + 1);
    CHECK(metrics[0] == "image,bn_pearson,bn_hamming,thr_pearson,thr_hamming");
    CHECK(metrics[1].rfind("3,", 0) == 0);
    CHECK(metrics.back().rfind("mean,", 0) == 0);
    const auto est = read_pbm(layout::estimates_dir(cfg, PrinterId::SA, "bn") / "est_0003.pbm");
    CHECK(est == load_dataset(cfg).originals[3]);

    cmd_roc(cfg, PrinterId::SA, Arch::bn, log);
    const fs::path roc = layout::roc_dir(cfg, PrinterId::SA, Arch::bn);
    for (const char* f : {"roc_bn_pearson.csv", "roc_thr_hamming.csv", "scores_bn_pearson.csv", "summary.csv",
                          "roc_pearson.svg", "roc_hamming.svg"}) {
        CHECK_MESSAGE(fs::exists(roc / f), f);
    }
    CHECK(lines(slurp(roc / "roc_bn_pearson.csv"))[0] == "gamma,pd,pfa");
    CHECK(lines(slurp(roc / "scores_thr_hamming.csv"))[0] == "score,label");
    const auto summary = lines(slurp(roc / "summary.csv"));
    REQUIRE(summary.size() == 5);
    CHECK(summary[0] == "method,measure,auc,pd_at_pfa_0,pd_at_pfa_0.01,pd_at_pfa_0.1");

    const auto diff = read_pgm(roc / "diff" / "bn_0003.pgm");
    CHECK(diff.height == 384);
    for (float v : diff.values) CHECK(v == 0.0f);

    // Reruns rewrite identical bytes.
    const auto before = snapshot(cfg.output_dir);
    cmd_attack(cfg, PrinterId::SA, Arch::bn, model, log);
    cmd_roc(cfg, PrinterId::SA, Arch::bn, log);
    CHECK(snapshot(cfg.output_dir) == before);

    nn::save_model(identity_model(144), 0.5, model);
    CHECK_THROWS_AS(cmd_attack(cfg, PrinterId::SA, Arch::bn, model, log), DimensionError);
}
