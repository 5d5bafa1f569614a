#include "pgc/nn.hpp"

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "pgc/error.hpp"
#include "pgc/rng.hpp"

namespace pgc::nn {

namespace {

using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using Map = Eigen::Map<RowMatrix>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXf>;

ConstMap weight_map(const DenseLayer& l) {
    return ConstMap(l.weight.data(), static_cast<Eigen::Index>(l.spec.out_dim),
                    static_cast<Eigen::Index>(l.spec.in_dim));
}

template <typename Matrix>
void apply_activation(Matrix& z, Activation a) {
    using S = typename Matrix::Scalar;
    switch (a) {
    case Activation::identity: break;
    case Activation::relu: z = z.cwiseMax(S(0)); break;
    case Activation::sigmoid:
        z = z.unaryExpr([](S v) { return S(1) / (S(1) + std::exp(-v)); });
        break;
    }
}

// Affine step for a whole batch: rows of `in` are samples.
RowMatrix affine(const DenseLayer& l, const RowMatrix& in) {
    RowMatrix z = in * weight_map(l).transpose();
    z.rowwise() += ConstVecMap(l.bias.data(), static_cast<Eigen::Index>(l.bias.size())).transpose();
    return z;
}

RowMatrix to_matrix(std::span<const float> x, std::size_t batch, std::size_t dim) {
    return ConstMap(x.data(), static_cast<Eigen::Index>(batch), static_cast<Eigen::Index>(dim));
}

void check_model(const MlpModel& m) {
    if (m.layers.empty()) throw DimensionError("model has no layers");
    m.validate();
}

double sum_squares(std::span<const float> v) {
    double s = 0.0;
    for (float x : v) s += static_cast<double>(x) * x;
    return s;
}

} // namespace

std::string_view to_string(Activation a) {
    switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    }
    return "unknown";
}

std::size_t MlpModel::weight_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.spec.in_dim * l.spec.out_dim;
    return n;
}

std::size_t MlpModel::bias_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.spec.out_dim;
    return n;
}

std::vector<std::size_t> MlpModel::dims() const {
    std::vector<std::size_t> d;
    if (layers.empty()) return d;
    d.push_back(layers.front().spec.in_dim);
    for (const auto& l : layers) d.push_back(l.spec.out_dim);
    return d;
}

void MlpModel::validate() const {
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& l = layers[k];
        const std::string where = "layer " + std::to_string(k);
        if (l.spec.in_dim == 0 || l.spec.out_dim == 0) throw DimensionError(where + ": zero dimension");
        if (k > 0 && layers[k - 1].spec.out_dim != l.spec.in_dim) {
            throw DimensionError(where + ": in_dim " + std::to_string(l.spec.in_dim) +
                                 " does not chain with previous out_dim " +
                                 std::to_string(layers[k - 1].spec.out_dim));
        }
        if (l.weight.size() != l.spec.in_dim * l.spec.out_dim || l.bias.size() != l.spec.out_dim) {
            throw DimensionError(where + ": parameter shapes do not match its spec");
        }
    }
    if (bottleneck_index && *bottleneck_index >= layers.size()) {
        throw DimensionError("bottleneck index out of range");
    }
}

void TrainConfig::validate() const {
    if (batch_size == 0) throw ParameterError("training: batch_size must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ParameterError("training: learning_rate must be > 0");
    }
    if (!(lambda >= 0.0)) throw ParameterError("training: lambda must be >= 0");
}

MlpModel build_mlp(std::span<const std::size_t> widths, std::uint64_t seed) {
    if (widths.size() < 2) throw ParameterError("build_mlp: need at least input and output widths");
    Rng rng(seed);
    MlpModel m;
    for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
        DenseLayer l;
        l.spec = {widths[k], widths[k + 1],
                  k + 2 == widths.size() ? Activation::sigmoid : Activation::relu};
        if (l.spec.in_dim == 0 || l.spec.out_dim == 0) throw ParameterError("build_mlp: zero width");
        const double bound = std::sqrt(6.0 / static_cast<double>(l.spec.in_dim + l.spec.out_dim));
        l.weight.resize(l.spec.in_dim * l.spec.out_dim);
        for (float& w : l.weight) w = static_cast<float>((2.0 * rng.uniform() - 1.0) * bound);
        l.bias.assign(l.spec.out_dim, 0.0f);
        m.layers.push_back(std::move(l));
    }
    return m;
}

MlpModel build_fc(std::size_t hidden_layers, std::uint64_t seed, std::size_t dim) {
    if (hidden_layers < 2 || hidden_layers > 4) {
        throw ParameterError("build_fc: hidden_layers must be 2, 3 or 4, got " +
                             std::to_string(hidden_layers));
    }
    const std::vector<std::size_t> widths(hidden_layers + 2, dim);
    return build_mlp(widths, seed);
}

MlpModel build_bn(std::uint64_t seed, std::size_t dim) {
    const std::vector<std::size_t> widths = {dim, 256, 128, 36, 128, 256, dim};
    MlpModel m = build_mlp(widths, seed);
    m.bottleneck_index = 2;
    return m;
}

std::vector<float> forward(const MlpModel& m, std::span<const float> x) {
    return forward_batch(m, x, 1);
}

std::vector<float> forward_batch(const MlpModel& m, std::span<const float> x, std::size_t batch) {
    check_model(m);
    if (x.size() != batch * m.input_dim()) {
        throw DimensionError("forward: input has " + std::to_string(x.size()) + " values, expected " +
                             std::to_string(batch * m.input_dim()));
    }
    RowMatrix a = to_matrix(x, batch, m.input_dim());
    for (const auto& l : m.layers) {
        a = affine(l, a);
        apply_activation(a, l.spec.activation);
    }
    return {a.data(), a.data() + a.size()};
}

double weight_square_sum(const MlpModel& m) {
    double s = 0.0;
    for (const auto& l : m.layers) s += sum_squares(l.weight);
    return s;
}

double loss(std::span<const float> pred, std::span<const float> target, const MlpModel& m,
            const TrainConfig& cfg) {
    if (pred.size() != target.size()) {
        throw DimensionError("loss: prediction length " + std::to_string(pred.size()) +
                             " != target length " + std::to_string(target.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = static_cast<double>(pred[i]) - target[i];
        s += d * d;
    }
    const double lambda = cfg.effective_lambda();
    if (lambda > 0.0) s += lambda * weight_square_sum(m);
    return s;
}

BackwardResult backward(const MlpModel& m, std::span<const float> batch_x,
                        std::span<const float> batch_t, std::size_t batch, const TrainConfig& cfg) {
    check_model(m);
    if (batch == 0) throw DimensionError("backward: empty batch");
    if (batch_x.size() != batch * m.input_dim() || batch_t.size() != batch * m.output_dim()) {
        throw DimensionError("backward: batch shapes do not match the model");
    }

    // Training arithmetic runs in double: with 576-wide layers, float GEMMs
    // lose small gradient entries to cancellation. Parameters stay float.
    const std::size_t depth = m.layers.size();
    std::vector<RowMatrixD> weights;
    weights.reserve(depth);
    for (const auto& l : m.layers) weights.push_back(weight_map(l).cast<double>());

    // activations[0] is the input; activations[k + 1] the output of layer k.
    std::vector<RowMatrixD> activations;
    activations.reserve(depth + 1);
    activations.push_back(to_matrix(batch_x, batch, m.input_dim()).cast<double>());
    for (std::size_t k = 0; k < depth; ++k) {
        const auto& l = m.layers[k];
        RowMatrixD z = activations.back() * weights[k].transpose();
        z.rowwise() += ConstVecMap(l.bias.data(), static_cast<Eigen::Index>(l.bias.size())).cast<double>().transpose();
        apply_activation(z, l.spec.activation);
        activations.push_back(std::move(z));
    }

    const RowMatrixD target = to_matrix(batch_t, batch, m.output_dim()).cast<double>();
    const RowMatrixD diff = activations.back() - target;

    BackwardResult out;
    const double lambda = cfg.effective_lambda();
    out.loss = diff.squaredNorm() / static_cast<double>(batch) + (lambda > 0.0 ? lambda * weight_square_sum(m) : 0.0);

    out.grads.weight.resize(depth);
    out.grads.bias.resize(depth);

    // dL/dA for the batch mean of sum-of-squares.
    RowMatrixD upstream = diff * (2.0 / static_cast<double>(batch));
    for (std::size_t k = depth; k-- > 0;) {
        const auto& l = m.layers[k];
        const RowMatrixD& a = activations[k + 1];
        RowMatrixD delta;
        switch (l.spec.activation) {
        case Activation::identity: delta = std::move(upstream); break;
        case Activation::relu:
            delta = (a.array() > 0.0).select(upstream, 0.0);
            break;
        case Activation::sigmoid:
            delta = upstream.array() * a.array() * (1.0 - a.array());
            break;
        }

        RowMatrixD gw = delta.transpose() * activations[k];
        if (lambda > 0.0) gw += (2.0 * lambda) * weights[k];
        const Eigen::VectorXd gb = delta.colwise().sum().transpose();
        out.grads.weight[k].resize(static_cast<std::size_t>(gw.size()));
        out.grads.bias[k].resize(static_cast<std::size_t>(gb.size()));
        Map(out.grads.weight[k].data(), gw.rows(), gw.cols()) = gw.cast<float>();
        Eigen::Map<Eigen::VectorXf>(out.grads.bias[k].data(), gb.size()) = gb.cast<float>();

        if (k > 0) upstream = delta * weights[k];
    }
    return out;
}

AdamState init_adam(const MlpModel& m) {
    AdamState s;
    s.initialized = true;
    for (const auto& l : m.layers) {
        s.m.weight.emplace_back(l.weight.size(), 0.0f);
        s.m.bias.emplace_back(l.bias.size(), 0.0f);
    }
    s.v = s.m;
    return s;
}

namespace {

void adam_update(std::vector<float>& p, const std::vector<float>& g, std::vector<float>& m1,
                 std::vector<float>& m2, float lr_t, float eps_t) {
    if (g.size() != p.size() || m1.size() != p.size() || m2.size() != p.size()) {
        throw DimensionError("optimizer_step: gradient shape does not match parameters");
    }
    constexpr auto b1 = static_cast<float>(AdamState::beta1);
    constexpr auto b2 = static_cast<float>(AdamState::beta2);
    for (std::size_t i = 0; i < p.size(); ++i) {
        m1[i] = b1 * m1[i] + (1.0f - b1) * g[i];
        m2[i] = b2 * m2[i] + (1.0f - b2) * g[i] * g[i];
        p[i] -= lr_t * m1[i] / (std::sqrt(m2[i]) + eps_t);
    }
}

} // namespace

void optimizer_step(MlpModel& m, const Gradients& g, AdamState& state, double learning_rate) {
    if (!state.initialized) throw StateError("optimizer_step: Adam state not initialized");
    if (g.weight.size() != m.layers.size() || g.bias.size() != m.layers.size() ||
        state.m.weight.size() != m.layers.size()) {
        throw DimensionError("optimizer_step: layer count mismatch");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(AdamState::beta1, t);
    const double c2 = 1.0 - std::pow(AdamState::beta2, t);
    // lr * m_hat / (sqrt(v_hat) + eps) rewritten with the corrections folded in.
    const auto lr_t = static_cast<float>(learning_rate * std::sqrt(c2) / c1);
    const auto eps_t = static_cast<float>(AdamState::epsilon * std::sqrt(c2));
    for (std::size_t k = 0; k < m.layers.size(); ++k) {
        adam_update(m.layers[k].weight, g.weight[k], state.m.weight[k], state.v.weight[k], lr_t, eps_t);
        adam_update(m.layers[k].bias, g.bias[k], state.m.bias[k], state.v.bias[k], lr_t, eps_t);
    }
}

} // namespace pgc::nn
