#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hotelwatt/features.hpp"

namespace hotelwatt::ann {

enum class Activation { relu, identity };

/// Rectified linear unit.  The derivative at exactly 0 is taken as 0.
constexpr double relu(double v) noexcept { return v >= 0.0 ? v : 0.0; }

/// Dense layer: out = f(W * in + b), with W stored row-major as
/// out_dim x in_dim.
struct LayerParams {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weights;
  std::vector<double> biases;

  static LayerParams zeros(std::size_t in_dim, std::size_t out_dim);

  double& weight(std::size_t out, std::size_t in) { return weights[out * in_dim + in]; }
  double weight(std::size_t out, std::size_t in) const { return weights[out * in_dim + in]; }

  bool operator==(const LayerParams&) const = default;
};

std::vector<double> layer_forward(std::span<const double> inputs, const LayerParams& layer,
                                  Activation activation);

inline constexpr std::size_t kHiddenLayers = 3;
inline constexpr std::size_t kLayerCount = kHiddenLayers + 1;

using HiddenSizes = std::array<std::size_t, kHiddenLayers>;

/// "[h1; h2; h3]".
std::string format_hidden_sizes(const HiddenSizes& sizes);

/// Three ReLU hidden layers followed by a single linear output unit.
struct NetworkParams {
  std::size_t input_dim = 0;
  HiddenSizes hidden_sizes{};
  std::array<LayerParams, kLayerCount> layers;

  /// All-zero network of the given shape.
  static NetworkParams zeros(std::size_t input_dim, const HiddenSizes& hidden);

  /// Layer dimensions chain as input_dim -> h1 -> h2 -> h3 -> 1 and every
  /// entry is finite.  Throws Shape otherwise.
  void validate() const;

  std::size_t parameter_count() const;

  bool operator==(const NetworkParams&) const = default;
};

/// Prediction in normalized target units.
double forward(const NetworkParams& network, std::span<const double> x);

double mse(std::span<const double> predictions, std::span<const double> targets);

/// Same shape as the network it differentiates.
struct Gradients {
  std::array<LayerParams, kLayerCount> layers;
};

/// Row-major inputs (targets.size() rows of input_dim values).
struct Batch {
  std::span<const double> inputs;
  std::span<const double> targets;
};

/// Exact gradient of the batch MSE with respect to every weight and bias.
/// Samples are accumulated in index order.
Gradients gradients(const NetworkParams& network, const Batch& batch);

enum class InitScheme { he, uniform_small };

const char* to_string(InitScheme scheme) noexcept;
InitScheme parse_init_scheme(std::string_view text);

/// he: weights ~ N(0, sqrt(2 / in_dim)); uniform_small: U(-0.05, 0.05).
/// Biases start at 0 in both schemes.
NetworkParams init_params(std::size_t input_dim, const HiddenSizes& hidden, InitScheme scheme,
                          std::uint64_t seed);

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 2000;
  std::size_t batch_size = 32;
  std::uint64_t seed = 42;
  InitScheme init_scheme = InitScheme::he;
  double momentum = 0.9;
  std::optional<std::size_t> early_stop_patience = 50;
  double validation_fraction = 0.1;  // chronological tail used for early stopping
  bool shuffle_each_epoch = true;

  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

struct TrainResult {
  NetworkParams params;
  std::vector<double> loss_history;  // training MSE after each epoch
  std::size_t epochs_run = 0;
  std::optional<std::size_t> best_epoch;  // set when early stopping selected params
};

/// Mini-batch gradient descent with momentum on a normalized matrix.  With
/// early stopping the last `validation_fraction` of rows is held out and
/// the parameters of the best validation epoch are returned.  Throws
/// Training naming the epoch if the loss stops being finite.
TrainResult train(NetworkParams init, const features::FeatureMatrix& normalized,
                  const TrainConfig& config);

/// Forward pass per row, mapped back to kWh through the target range.
std::vector<double> predict(const NetworkParams& network,
                            const features::FeatureMatrix& normalized,
                            const features::NormalizationParams& norm);

}  // namespace hotelwatt::ann
