#include "pgc/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "pgc/error.hpp"
#include "pgc/report.hpp"
#include "pgc/rng.hpp"

namespace pgc {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DimensionError("pearson: lengths " + std::to_string(x.size()) + " and " +
                             std::to_string(y.size()) + " differ");
    }
    if (x.size() < 2) throw DimensionError("pearson: need at least two values");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 && syy == 0.0) throw DomainError("pearson: both inputs are constant, correlation undefined");
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double pearson(std::span<const float> x, std::span<const float> y) {
    const std::vector<double> dx(x.begin(), x.end());
    const std::vector<double> dy(y.begin(), y.end());
    return pearson(std::span<const double>(dx), std::span<const double>(dy));
}

double hamming_norm(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) {
        throw DimensionError("hamming_norm: lengths " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()) + " differ");
    }
    if (a.empty()) throw DimensionError("hamming_norm: empty vectors");
    std::size_t diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff += (a[i] != 0) != (b[i] != 0);
    return static_cast<double>(diff) / static_cast<double>(a.size());
}

double hamming_norm(const ModuleMatrix& a, const ModuleMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw DimensionError("hamming_norm: module matrices differ in shape");
    return hamming_norm(std::span<const std::uint8_t>(a.bits), std::span<const std::uint8_t>(b.bits));
}

std::string_view to_string(Measure m) { return m == Measure::pearson ? "pearson" : "hamming"; }

Measure parse_measure(std::string_view s) {
    if (s == "pearson") return Measure::pearson;
    if (s == "hamming") return Measure::hamming;
    throw LookupError("unknown measure '" + std::string(s) + "' (expected pearson or hamming)");
}

RocCurve roc(const ScoreSet& scores) {
    if (scores.authentic.empty() || scores.fake.empty()) throw ParameterError("roc: empty score list");
    const double alpha = scores.alpha();
    std::vector<double> auth, fake;
    for (double s : scores.authentic) auth.push_back(alpha * s);
    for (double s : scores.fake) fake.push_back(alpha * s);
    std::sort(auth.begin(), auth.end());
    std::sort(fake.begin(), fake.end());

    std::vector<double> gammas(auth);
    gammas.insert(gammas.end(), fake.begin(), fake.end());
    std::sort(gammas.begin(), gammas.end(), std::greater<>());
    gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());
    constexpr double inf = std::numeric_limits<double>::infinity();
    gammas.insert(gammas.begin(), inf);
    gammas.push_back(-inf);

    const auto na = static_cast<double>(auth.size());
    const auto nf = static_cast<double>(fake.size());
    RocCurve curve;
    curve.points.reserve(gammas.size());
    for (double g : gammas) {
        const auto at_least = auth.end() - std::lower_bound(auth.begin(), auth.end(), g);
        const auto above = fake.end() - std::upper_bound(fake.begin(), fake.end(), g);
        curve.points.push_back({g, static_cast<double>(at_least) / na, static_cast<double>(above) / nf});
    }
    return curve;
}

double auc(const RocCurve& curve) {
    std::vector<RocPoint> pts = curve.points;
    std::sort(pts.begin(), pts.end(), [](const RocPoint& a, const RocPoint& b) {
        return a.pfa != b.pfa ? a.pfa < b.pfa : a.pd < b.pd;
    });
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        area += (pts[i].pfa - pts[i - 1].pfa) * (pts[i].pd + pts[i - 1].pd) / 2.0;
    }
    return std::clamp(area, 0.0, 1.0);
}

double pd_at_pfa(const RocCurve& curve, double target_pfa) {
    double best = 0.0;
    for (const auto& p : curve.points) {
        if (p.pfa <= target_pfa) best = std::max(best, p.pd);
    }
    return best;
}

ReprintSeeds ReprintSeeds::derive(std::uint64_t base) {
    return {derive_seed(base, "reprint/authentic"), derive_seed(base, "reprint/fake"),
            derive_seed(base, "reprint/defender")};
}

namespace {

std::vector<double> as_doubles(const std::vector<float>& v) { return {v.begin(), v.end()}; }

} // namespace

ScoreExperiment score_experiment(const PairedDataset& ds, std::span<const ModuleMatrix> estimates,
                                 const ChannelParams& params, const ReprintSeeds& seeds) {
    const auto test = ds.indices(Split::test);
    if (estimates.size() != test.size()) {
        throw MissingInputError("score_experiment: " + std::to_string(estimates.size()) +
                                " estimates for " + std::to_string(test.size()) + " test images");
    }
    const auto val = ds.indices(Split::val);
    if (val.empty()) throw ParameterError("score_experiment: defender needs a validation split");

    const std::size_t mpx = ds.geometry.module_px;
    std::vector<float> values, targets;
    for (std::size_t i : val) {
        const PixelImage x = ds.rendered(i);
        const PixelImage ink = ink_intensity(print_scan(x, params, seeds.defender ^ i));
        values.insert(values.end(), ink.values.begin(), ink.values.end());
        targets.insert(targets.end(), x.values.begin(), x.values.end());
    }

    ScoreExperiment out;
    out.defender_threshold = calibrate_on(values, targets).threshold;
    out.pearson.measure = Measure::pearson;
    out.hamming.measure = Measure::hamming;

    auto score = [&](const ModuleMatrix& original, const PixelImage& x_render, const ModuleMatrix& printed_code,
                     std::uint64_t seed, std::vector<double>& pearson_out, std::vector<double>& hamming_out) {
        const PixelImage scan = print_scan(render(printed_code, mpx), params, seed);
        const PixelImage ink = ink_intensity(scan);
        pearson_out.push_back(pearson(std::span<const double>(as_doubles(x_render.values)),
                                      std::span<const double>(as_doubles(ink.values))));
        hamming_out.push_back(hamming_norm(original, thr_estimate(scan, out.defender_threshold, ds.geometry)));
    };

    for (std::size_t k = 0; k < test.size(); ++k) {
        const std::size_t i = test[k];
        const ModuleMatrix& x = ds.originals[i];
        if (estimates[k].rows != x.rows || estimates[k].cols != x.cols) {
            throw DimensionError("score_experiment: estimate " + std::to_string(k) + " has the wrong shape");
        }
        const PixelImage x_render = ds.rendered(i);
        score(x, x_render, x, seeds.authentic ^ i, out.pearson.authentic, out.hamming.authentic);
        score(x, x_render, estimates[k], seeds.fake ^ i, out.pearson.fake, out.hamming.fake);
    }
    return out;
}

void write_roc_csv(const RocCurve& curve, std::ostream& os) {
    os << "gamma,pd,pfa\n";
    for (const auto& p : curve.points) {
        os << format_number(p.gamma) << ',' << format_number(p.pd) << ',' << format_number(p.pfa) << '\n';
    }
}

void write_scores_csv(const ScoreSet& scores, std::ostream& os) {
    os << "score,label\n";
    for (double s : scores.authentic) os << format_number(s) << ",authentic\n";
    for (double s : scores.fake) os << format_number(s) << ",fake\n";
}

} // namespace pgc
