#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "pgc/attack.hpp"
#include "pgc/codegen.hpp"

namespace pgc {

/// Sample correlation. Throws DimensionError on length mismatch or fewer than
/// two values, DomainError when both inputs are constant. Exactly one constant
/// input has no linear association and yields 0.
double pearson(std::span<const double> x, std::span<const double> y);
double pearson(std::span<const float> x, std::span<const float> y);

/// Fraction of positions that differ.
double hamming_norm(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
double hamming_norm(const ModuleMatrix& a, const ModuleMatrix& b);

enum class Measure : std::uint8_t { pearson, hamming };

std::string_view to_string(Measure m);
Measure parse_measure(std::string_view s);

/// +1 for similarities (pearson), -1 for distances (hamming).
constexpr int alpha_of(Measure m) { return m == Measure::pearson ? 1 : -1; }

struct ScoreSet {
    Measure measure = Measure::pearson;
    std::vector<double> authentic; // scores under H0
    std::vector<double> fake;      // scores under H1

    int alpha() const { return alpha_of(measure); }
};

struct RocPoint {
    double gamma = 0.0;
    double pd = 0.0;
    double pfa = 0.0;

    bool operator==(const RocPoint&) const = default;
};

/// Points ordered by decreasing gamma, from +inf (0, 0) to -inf (1, 1).
struct RocCurve {
    std::vector<RocPoint> points;
};

/// gamma sweeps the distinct alpha-scaled scores plus +-inf;
/// pd = P(alpha*d >= gamma | H0), pfa = P(alpha*d > gamma | H1).
RocCurve roc(const ScoreSet& scores);

/// Trapezoidal area under pd over pfa in [0, 1].
double auc(const RocCurve& curve);

/// Largest pd among points with pfa <= target_pfa, 0 if none.
double pd_at_pfa(const RocCurve& curve, double target_pfa);

struct ReprintSeeds {
    std::uint64_t authentic = 1;
    std::uint64_t fake = 2;
    std::uint64_t defender = 3;

    static ReprintSeeds derive(std::uint64_t base);
};

struct ScoreExperiment {
    ScoreSet pearson;
    ScoreSet hamming;
    double defender_threshold = 0.0;
};

/// The defender calibrates its own Thr threshold on fresh prints of the
/// validation originals, then scores a re-print of each test original
/// (authentic) and of each estimate (fake). Pearson compares the render of
/// x with the ink intensity of the print; Hamming compares x with the
/// thresholded, majority-voted modules of the print.
/// `estimates` is aligned with ds.indices(Split::test).
ScoreExperiment score_experiment(const PairedDataset& ds, std::span<const ModuleMatrix> estimates,
                                 const ChannelParams& params, const ReprintSeeds& seeds);

void write_roc_csv(const RocCurve& curve, std::ostream& os);
void write_scores_csv(const ScoreSet& scores, std::ostream& os);

} // namespace pgc
