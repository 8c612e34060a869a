#include "hotelwatt/ann.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>

#include "hotelwatt/csv.hpp"
#include "hotelwatt/error.hpp"

namespace hotelwatt::ann {

namespace {

std::array<std::size_t, kLayerCount + 1> layer_dims(std::size_t input_dim, const HiddenSizes& h) {
  return {input_dim, h[0], h[1], h[2], 1};
}

// Activations of every layer for one sample; acts[0] is the input.
struct Workspace {
  std::array<std::vector<double>, kLayerCount + 1> acts;
  std::array<std::vector<double>, kLayerCount> deltas;

  explicit Workspace(const NetworkParams& net) {
    auto dims = layer_dims(net.input_dim, net.hidden_sizes);
    for (std::size_t k = 0; k <= kLayerCount; ++k) acts[k].assign(dims[k], 0.0);
    for (std::size_t k = 0; k < kLayerCount; ++k) deltas[k].assign(dims[k + 1], 0.0);
  }
};

void dense(std::span<const double> in, const LayerParams& layer, Activation act, std::span<double> out) {
  for (std::size_t o = 0; o < layer.out_dim; ++o) {
    const double* w = layer.weights.data() + o * layer.in_dim;
    double sum = 0.0;
    for (std::size_t i = 0; i < layer.in_dim; ++i) sum += in[i] * w[i];
    sum += layer.biases[o];
    out[o] = act == Activation::relu ? relu(sum) : sum;
  }
}

double forward_into(const NetworkParams& net, std::span<const double> x, Workspace& ws) {
  std::copy(x.begin(), x.end(), ws.acts[0].begin());
  for (std::size_t k = 0; k < kLayerCount; ++k) {
    auto act = k + 1 == kLayerCount ? Activation::identity : Activation::relu;
    dense(ws.acts[k], net.layers[k], act, ws.acts[k + 1]);
  }
  return ws.acts[kLayerCount][0];
}

void zero(Gradients& g) {
  for (auto& layer : g.layers) {
    std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
    std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
  }
}

Gradients zero_gradients(const NetworkParams& net) {
  Gradients g;
  for (std::size_t k = 0; k < kLayerCount; ++k) {
    g.layers[k] = LayerParams::zeros(net.layers[k].in_dim, net.layers[k].out_dim);
  }
  return g;
}

// Reverse-mode pass over `rows` samples, accumulated in sample order.
void accumulate_gradients(const NetworkParams& net, std::span<const double> inputs,
                          std::span<const double> targets, Workspace& ws, Gradients& g) {
  zero(g);
  const auto rows = targets.size();
  const double scale = 2.0 / static_cast<double>(rows);
  for (std::size_t s = 0; s < rows; ++s) {
    double prediction = forward_into(net, inputs.subspan(s * net.input_dim, net.input_dim), ws);
    ws.deltas[kLayerCount - 1][0] = scale * (prediction - targets[s]);
    for (std::size_t k = kLayerCount; k-- > 0;) {
      const auto& layer = net.layers[k];
      auto& grad = g.layers[k];
      const auto& delta = ws.deltas[k];
      const auto& prev = ws.acts[k];
      for (std::size_t o = 0; o < layer.out_dim; ++o) {
        double* gw = grad.weights.data() + o * layer.in_dim;
        for (std::size_t i = 0; i < layer.in_dim; ++i) gw[i] += delta[o] * prev[i];
        grad.biases[o] += delta[o];
      }
      if (k == 0) break;
      auto& below = ws.deltas[k - 1];
      for (std::size_t i = 0; i < layer.in_dim; ++i) {
        if (!(prev[i] > 0.0)) {
          below[i] = 0.0;
          continue;
        }
        double sum = 0.0;
        for (std::size_t o = 0; o < layer.out_dim; ++o) sum += layer.weight(o, i) * delta[o];
        below[i] = sum;
      }
    }
  }
}

double mse_rows(const NetworkParams& net, std::span<const double> inputs, std::span<const double> targets,
                Workspace& ws) {
  double sum = 0.0;
  for (std::size_t s = 0; s < targets.size(); ++s) {
    double d = forward_into(net, inputs.subspan(s * net.input_dim, net.input_dim), ws) - targets[s];
    sum += d * d;
  }
  return sum / static_cast<double>(targets.size());
}

void check_input(const NetworkParams& net, std::size_t size) {
  if (size != net.input_dim) {
    throw Error(ErrorKind::Shape, "network expects " + std::to_string(net.input_dim) + " inputs, got " +
                                      std::to_string(size));
  }
}

}  // namespace

LayerParams LayerParams::zeros(std::size_t in_dim, std::size_t out_dim) {
  return LayerParams{in_dim, out_dim, std::vector<double>(in_dim * out_dim, 0.0),
                     std::vector<double>(out_dim, 0.0)};
}

std::vector<double> layer_forward(std::span<const double> inputs, const LayerParams& layer,
                                  Activation activation) {
  if (inputs.size() != layer.in_dim) {
    throw Error(ErrorKind::Shape, "layer expects " + std::to_string(layer.in_dim) + " inputs, got " +
                                      std::to_string(inputs.size()));
  }
  if (layer.weights.size() != layer.in_dim * layer.out_dim || layer.biases.size() != layer.out_dim) {
    throw Error(ErrorKind::Shape, "layer parameter arrays do not match its dimensions");
  }
  std::vector<double> out(layer.out_dim);
  dense(inputs, layer, activation, out);
  return out;
}

std::string format_hidden_sizes(const HiddenSizes& sizes) {
  return "[" + std::to_string(sizes[0]) + "; " + std::to_string(sizes[1]) + "; " +
         std::to_string(sizes[2]) + "]";
}

NetworkParams NetworkParams::zeros(std::size_t input_dim, const HiddenSizes& hidden) {
  NetworkParams net;
  net.input_dim = input_dim;
  net.hidden_sizes = hidden;
  auto dims = layer_dims(input_dim, hidden);
  for (std::size_t k = 0; k < kLayerCount; ++k) net.layers[k] = LayerParams::zeros(dims[k], dims[k + 1]);
  return net;
}

void NetworkParams::validate() const {
  if (input_dim < 1) throw Error(ErrorKind::Shape, "network input dimension must be >= 1");
  for (auto h : hidden_sizes) {
    if (h < 1) throw Error(ErrorKind::Shape, "hidden layer widths must be >= 1");
  }
  auto dims = layer_dims(input_dim, hidden_sizes);
  for (std::size_t k = 0; k < kLayerCount; ++k) {
    const auto& layer = layers[k];
    if (layer.in_dim != dims[k] || layer.out_dim != dims[k + 1] ||
        layer.weights.size() != dims[k] * dims[k + 1] || layer.biases.size() != dims[k + 1]) {
      throw Error(ErrorKind::Shape, "layer " + std::to_string(k) + " does not chain as " +
                                        std::to_string(dims[k]) + " -> " + std::to_string(dims[k + 1]));
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(layer.weights.begin(), layer.weights.end(), finite) ||
        !std::all_of(layer.biases.begin(), layer.biases.end(), finite)) {
      throw Error(ErrorKind::Shape, "layer " + std::to_string(k) + " has non-finite parameters");
    }
  }
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weights.size() + layer.biases.size();
  return n;
}

double forward(const NetworkParams& network, std::span<const double> x) {
  check_input(network, x.size());
  Workspace ws(network);
  return forward_into(network, x, ws);
}

double mse(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size() || predictions.empty()) {
    throw Error(ErrorKind::Shape, "mse needs equal nonzero lengths, got " + std::to_string(predictions.size()) +
                                      " and " + std::to_string(targets.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    double d = predictions[i] - targets[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predictions.size());
}

Gradients gradients(const NetworkParams& network, const Batch& batch) {
  if (batch.targets.empty()) throw Error(ErrorKind::Shape, "gradient batch must not be empty");
  if (batch.inputs.size() != batch.targets.size() * network.input_dim) {
    throw Error(ErrorKind::Shape, "batch inputs do not match " + std::to_string(batch.targets.size()) +
                                      " rows of " + std::to_string(network.input_dim) + " features");
  }
  network.validate();
  Workspace ws(network);
  auto g = zero_gradients(network);
  accumulate_gradients(network, batch.inputs, batch.targets, ws, g);
  return g;
}

const char* to_string(InitScheme scheme) noexcept {
  return scheme == InitScheme::he ? "he" : "uniform-small";
}

InitScheme parse_init_scheme(std::string_view text) {
  if (text == "he") return InitScheme::he;
  if (text == "uniform-small" || text == "uniform_small") return InitScheme::uniform_small;
  throw Error(ErrorKind::Argument, "unknown init scheme '" + std::string(text) + "' (expected he or uniform-small)");
}

NetworkParams init_params(std::size_t input_dim, const HiddenSizes& hidden, InitScheme scheme,
                          std::uint64_t seed) {
  auto net = NetworkParams::zeros(input_dim, hidden);
  net.validate();
  std::mt19937_64 rng(seed);
  for (auto& layer : net.layers) {
    if (scheme == InitScheme::he) {
      std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(layer.in_dim)));
      for (auto& w : layer.weights) w = dist(rng);
    } else {
      std::uniform_real_distribution<double> dist(-0.05, 0.05);
      for (auto& w : layer.weights) w = dist(rng);
    }
  }
  return net;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::Argument, "learning rate must be a positive finite number");
  }
  if (epochs < 1) throw Error(ErrorKind::Argument, "epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorKind::Argument, "batch size must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw Error(ErrorKind::Argument, "momentum must lie in [0,1)");
  if (early_stop_patience && *early_stop_patience < 1) {
    throw Error(ErrorKind::Argument, "early-stop patience must be >= 1 when set");
  }
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw Error(ErrorKind::Argument, "validation fraction must lie in [0,1)");
  }
}

TrainResult train(NetworkParams init, const features::FeatureMatrix& data, const TrainConfig& config) {
  config.validate();
  init.validate();
  check_input(init, data.cols());
  const auto n = data.rows();
  if (n == 0 || data.values.size() != n * data.cols() || data.target.size() != n) {
    throw Error(ErrorKind::Shape, "training matrix is empty or inconsistent");
  }

  std::size_t n_val = 0;
  if (config.early_stop_patience && config.validation_fraction > 0.0) {
    n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * config.validation_fraction + 1e-9));
    if (n_val >= n) n_val = 0;
  }
  const bool early_stopping = n_val > 0;
  const auto n_fit = n - n_val;
  const auto dim = init.input_dim;
  std::span<const double> fit_inputs(data.values.data(), n_fit * dim);
  std::span<const double> fit_targets(data.target.data(), n_fit);
  std::span<const double> val_inputs(data.values.data() + n_fit * dim, n_val * dim);
  std::span<const double> val_targets(data.target.data() + n_fit, n_val);

  TrainResult result;
  NetworkParams params = std::move(init);
  NetworkParams best = params;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  Workspace ws(params);
  Gradients grad = zero_gradients(params);
  Gradients velocity = zero_gradients(params);
  std::vector<std::size_t> order(n_fit);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<double> batch_inputs, batch_targets;
  batch_inputs.reserve(config.batch_size * dim);
  batch_targets.reserve(config.batch_size);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.shuffle_each_epoch) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n_fit; start += config.batch_size) {
      auto stop = std::min(n_fit, start + config.batch_size);
      batch_inputs.clear();
      batch_targets.clear();
      for (auto i = start; i < stop; ++i) {
        auto row = data.row(order[i]);
        batch_inputs.insert(batch_inputs.end(), row.begin(), row.end());
        batch_targets.push_back(data.target[order[i]]);
      }
      accumulate_gradients(params, batch_inputs, batch_targets, ws, grad);
      for (std::size_t k = 0; k < kLayerCount; ++k) {
        auto step = [&](std::vector<double>& p, std::vector<double>& v, const std::vector<double>& g) {
          for (std::size_t j = 0; j < p.size(); ++j) {
            v[j] = config.momentum * v[j] - config.learning_rate * g[j];
            p[j] += v[j];
          }
        };
        step(params.layers[k].weights, velocity.layers[k].weights, grad.layers[k].weights);
        step(params.layers[k].biases, velocity.layers[k].biases, grad.layers[k].biases);
      }
    }

    double loss = mse_rows(params, fit_inputs, fit_targets, ws);
    if (!std::isfinite(loss)) {
      throw Error(ErrorKind::Training, "training diverged at epoch " + std::to_string(epoch) +
                                           " (loss " + csv::format_double(loss) + ")");
    }
    result.loss_history.push_back(loss);

    if (early_stopping) {
      double val = mse_rows(params, val_inputs, val_targets, ws);
      if (!std::isfinite(val)) {
        throw Error(ErrorKind::Training, "training diverged at epoch " + std::to_string(epoch) +
                                             " (validation loss " + csv::format_double(val) + ")");
      }
      if (val < best_val) {
        best_val = val;
        best = params;
        result.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= *config.early_stop_patience) {
        break;
      }
    }
  }

  result.epochs_run = result.loss_history.size();
  result.params = early_stopping ? std::move(best) : std::move(params);
  return result;
}

std::vector<double> predict(const NetworkParams& network, const features::FeatureMatrix& normalized,
                            const features::NormalizationParams& norm) {
  check_input(network, normalized.cols());
  if (normalized.values.size() != normalized.rows() * normalized.cols()) {
    throw Error(ErrorKind::Shape, "inconsistent feature matrix dimensions");
  }
  Workspace ws(network);
  std::vector<double> out(normalized.rows());
  for (std::size_t r = 0; r < normalized.rows(); ++r) {
    out[r] = norm.target.denormalize(forward_into(network, normalized.row(r), ws));
  }
  return out;
}

}  // namespace hotelwatt::ann
