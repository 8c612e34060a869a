#include "hotelwatt/model.hpp"

#include <nlohmann/json.hpp>

#include "hotelwatt/error.hpp"
#include "json_codec.hpp"

namespace hotelwatt {

namespace {

using Json = nlohmann::ordered_json;

Json range_json(const std::string& name, const features::ColumnRange& r) {
  return Json{{"name", name}, {"min", r.min}, {"max", r.max}};
}

features::ColumnRange range_from(const Json& j) {
  return features::ColumnRange{j.at("min").get<double>(), j.at("max").get<double>()};
}

}  // namespace

namespace detail {

nlohmann::ordered_json train_config_to_json(const ann::TrainConfig& c) {
  Json j;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["init_scheme"] = ann::to_string(c.init_scheme);
  j["momentum"] = c.momentum;
  j["early_stop_patience"] = c.early_stop_patience ? Json(*c.early_stop_patience) : Json(nullptr);
  j["validation_fraction"] = c.validation_fraction;
  j["shuffle_each_epoch"] = c.shuffle_each_epoch;
  return j;
}

ann::TrainConfig train_config_from_json(const nlohmann::ordered_json& j) {
  ann::TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.init_scheme = ann::parse_init_scheme(j.at("init_scheme").get<std::string>());
  c.momentum = j.at("momentum").get<double>();
  const auto& patience = j.at("early_stop_patience");
  c.early_stop_patience = patience.is_null() ? std::nullopt : std::optional(patience.get<std::size_t>());
  c.validation_fraction = j.at("validation_fraction").get<double>();
  c.shuffle_each_epoch = j.at("shuffle_each_epoch").get<bool>();
  return c;
}

}  // namespace detail

namespace {

[[noreturn]] void format_error(const std::string& what) {
  throw Error(ErrorKind::Format, "model document: " + what);
}

ModelBundle decode(const Json& doc) {
  if (!doc.is_object()) format_error("expected a JSON object");
  const auto& version = doc.at("version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    format_error("unsupported version " + version.dump() + " (supported versions: " +
                 std::to_string(kModelFormatVersion) + ")");
  }

  ModelBundle m;
  const auto& spec = doc.at("feature_spec");
  m.features.selected = spec.at("names").get<std::vector<std::string>>();
  m.features.reference_temperature = spec.at("reference_temperature").get<double>();
  m.features.clip_negative_cdd = spec.at("clip_negative_cdd").get<bool>();

  for (const auto& col : doc.at("normalization").at("columns")) {
    m.normalization.columns.push_back(col.at("name").get<std::string>());
    m.normalization.features.push_back(range_from(col));
  }
  m.normalization.target = range_from(doc.at("normalization").at("target"));

  auto& net = m.network;
  net.input_dim = doc.at("input_dim").get<std::size_t>();
  auto hidden = doc.at("hidden_sizes").get<std::vector<std::size_t>>();
  if (hidden.size() != ann::kHiddenLayers) format_error("hidden_sizes must list exactly three widths");
  std::copy(hidden.begin(), hidden.end(), net.hidden_sizes.begin());

  const auto& layers = doc.at("layers");
  if (!layers.is_array() || layers.size() != ann::kLayerCount) format_error("expected four layers");
  for (std::size_t k = 0; k < ann::kLayerCount; ++k) {
    auto rows = layers[k].at("weights").get<std::vector<std::vector<double>>>();
    auto& layer = net.layers[k];
    layer.biases = layers[k].at("biases").get<std::vector<double>>();
    layer.out_dim = rows.size();
    layer.in_dim = rows.empty() ? 0 : rows.front().size();
    for (const auto& row : rows) {
      if (row.size() != layer.in_dim) format_error("ragged weight matrix in layer " + std::to_string(k));
      layer.weights.insert(layer.weights.end(), row.begin(), row.end());
    }
  }
  try {
    net.validate();
  } catch (const Error& e) {
    format_error(e.what());
  }
  m.train_config = detail::train_config_from_json(doc.at("train_config"));

  if (m.features.selected.size() != net.input_dim || m.normalization.features.size() != net.input_dim) {
    format_error("input_dim " + std::to_string(net.input_dim) + " does not match the feature and normalization columns");
  }
  if (m.normalization.columns != m.features.selected) {
    format_error("normalization columns differ from the feature spec");
  }
  return m;
}

}  // namespace

std::string save_model(const ModelBundle& model) {
  model.network.validate();
  Json doc;
  doc["version"] = kModelFormatVersion;
  doc["input_dim"] = model.network.input_dim;
  doc["hidden_sizes"] = model.network.hidden_sizes;
  doc["feature_spec"] = Json{{"names", model.features.selected},
                             {"reference_temperature", model.features.reference_temperature},
                             {"clip_negative_cdd", model.features.clip_negative_cdd}};
  Json columns = Json::array();
  for (std::size_t c = 0; c < model.normalization.features.size(); ++c) {
    columns.push_back(range_json(model.normalization.columns.at(c), model.normalization.features[c]));
  }
  doc["normalization"] = Json{{"columns", columns}, {"target", range_json("energy_kwh", model.normalization.target)}};
  Json layers = Json::array();
  for (const auto& layer : model.network.layers) {
    Json rows = Json::array();
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
      auto first = layer.weights.begin() + static_cast<std::ptrdiff_t>(o * layer.in_dim);
      rows.push_back(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(layer.in_dim)));
    }
    layers.push_back(Json{{"weights", rows}, {"biases", layer.biases}});
  }
  doc["layers"] = layers;
  doc["train_config"] = detail::train_config_to_json(model.train_config);
  return doc.dump(2) + "\n";
}

ModelBundle load_model(std::string_view document) {
  Json doc;
  try {
    doc = Json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    format_error(std::string("invalid JSON: ") + e.what());
  }
  try {
    return decode(doc);
  } catch (const nlohmann::json::exception& e) {
    format_error(e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Format) throw;
    format_error(e.what());
  }
}

std::pair<ModelBundle, ann::TrainResult> fit_model(const features::FeatureMatrix& train_raw,
                                                   const features::FeatureSpec& spec,
                                                   const ann::HiddenSizes& hidden,
                                                   const ann::TrainConfig& config) {
  spec.validate();
  config.validate();
  if (train_raw.columns != spec.selected) {
    throw Error(ErrorKind::Shape, "training matrix columns do not follow the feature spec");
  }
  ModelBundle model;
  model.features = spec;
  model.train_config = config;
  model.normalization = features::fit_normalization(train_raw);
  auto normalized = features::apply_normalization(train_raw, model.normalization);
  auto init = ann::init_params(train_raw.cols(), hidden, config.init_scheme, config.seed);
  auto result = ann::train(std::move(init), normalized, config);
  model.network = result.params;
  return {std::move(model), std::move(result)};
}

std::vector<double> predict_dataset(const ModelBundle& model, const dataset::Dataset& data) {
  auto matrix = features::build_features(data, model.features);
  auto normalized = features::apply_normalization(matrix, model.normalization);
  return ann::predict(model.network, normalized, model.normalization);
}

}  // namespace hotelwatt
