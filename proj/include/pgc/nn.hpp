#pragma once

// Dense multilayer perceptron: construction, forward pass, exact
// backpropagation, Adam, and the PGCM model file format.
//
// Parameters and inference activations are float; backward() works in double
// and rounds the gradients to float. Losses accumulate in double.
// A batch is a row-major (batch x dim) float matrix.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace pgc::nn {

enum class Activation : std::uint8_t { identity = 0, relu = 1, sigmoid = 2 };

std::string_view to_string(Activation a);

struct LayerSpec {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Activation activation = Activation::identity;

    bool operator==(const LayerSpec&) const = default;
};

struct DenseLayer {
    LayerSpec spec;
    std::vector<float> weight; // out_dim x in_dim, row-major
    std::vector<float> bias;   // out_dim

    bool operator==(const DenseLayer&) const = default;
};

struct MlpModel {
    std::vector<DenseLayer> layers;
    /// Index of the layer producing the latent code; layers [0, index] form
    /// the encoder, the rest the decoder.
    std::optional<std::size_t> bottleneck_index;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().spec.in_dim; }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().spec.out_dim; }
    std::size_t weight_count() const;
    std::size_t bias_count() const;
    /// Widths along the network, input first: [in, out_0, out_1, ...].
    std::vector<std::size_t> dims() const;
    /// Throws DimensionError if specs do not chain or shapes disagree.
    void validate() const;

    bool operator==(const MlpModel&) const = default;
};

enum class Regularizer : std::uint8_t { none, l2_weights };

struct TrainConfig {
    std::size_t epochs = 1000;
    std::size_t batch_size = 128;
    double learning_rate = 1e-3;
    double lambda = 0.0;
    Regularizer regularizer = Regularizer::none;
    std::uint64_t seed = 0;

    double effective_lambda() const { return regularizer == Regularizer::l2_weights ? lambda : 0.0; }
    void validate() const;
};

inline constexpr std::size_t kDefaultInputDim = 576;

/// Generic builder: widths [in, h1, ..., out], relu hidden, sigmoid output,
/// Glorot-uniform weights, zero biases.
MlpModel build_mlp(std::span<const std::size_t> widths, std::uint64_t seed);

/// FC-n: `hidden_layers` hidden layers all of width `dim`.
MlpModel build_fc(std::size_t hidden_layers, std::uint64_t seed, std::size_t dim = kDefaultInputDim);

/// Bottleneck model dim-256-128-36-128-256-dim.
MlpModel build_bn(std::uint64_t seed, std::size_t dim = kDefaultInputDim);

std::vector<float> forward(const MlpModel& m, std::span<const float> x);

/// Batched forward pass; returns a (batch x output_dim) row-major matrix.
std::vector<float> forward_batch(const MlpModel& m, std::span<const float> x, std::size_t batch);

/// Sum of squared errors plus lambda * sum(W^2) when the regularizer is on.
double loss(std::span<const float> pred, std::span<const float> target, const MlpModel& m,
            const TrainConfig& cfg);

/// Sum of squared weights across all layers (biases excluded).
double weight_square_sum(const MlpModel& m);

struct Gradients {
    std::vector<std::vector<float>> weight;
    std::vector<std::vector<float>> bias;
};

struct BackwardResult {
    Gradients grads;
    /// Mean per-sample loss of the batch (data term + regularizer), before the update.
    double loss = 0.0;
};

/// Exact gradient of the batch-mean objective, including 2*lambda*W.
BackwardResult backward(const MlpModel& m, std::span<const float> batch_x,
                        std::span<const float> batch_t, std::size_t batch, const TrainConfig& cfg);

struct AdamState {
    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double epsilon = 1e-8;

    bool initialized = false;
    std::uint64_t step = 0;
    Gradients m;
    Gradients v;
};

AdamState init_adam(const MlpModel& m);

/// One bias-corrected Adam update in place. Throws StateError on an
/// uninitialized state and DimensionError on shape mismatch.
void optimizer_step(MlpModel& m, const Gradients& g, AdamState& state, double learning_rate);

// PGCM file format, all integers uint32 little-endian:
//   "PGCM" | version | layer count | per layer: in_dim, out_dim, activation
//   | all weights (layer order, row-major) as f32 LE | all biases as f32 LE
//   | threshold flag (uint8) | threshold (f32 LE, present iff flag = 1)
inline constexpr std::uint32_t kModelFormatVersion = 1;

struct SavedModel {
    MlpModel model;
    std::optional<double> threshold;
};

void save_model(const MlpModel& m, std::optional<double> threshold, std::ostream& os);
void save_model(const MlpModel& m, std::optional<double> threshold, const std::filesystem::path& path);
SavedModel load_model(std::istream& is);
SavedModel load_model(const std::filesystem::path& path);

/// Byte size of a PGCM file for the given model.
std::size_t model_file_size(const MlpModel& m, bool has_threshold);

} // namespace pgc::nn
