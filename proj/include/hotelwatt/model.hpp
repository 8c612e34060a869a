#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "hotelwatt/ann.hpp"
#include "hotelwatt/features.hpp"

namespace hotelwatt {

/// Everything needed to reproduce predictions: the network, the scaling it
/// was trained under, the feature recipe (including the reference
/// temperature) and the training settings that produced it.
struct ModelBundle {
  ann::NetworkParams network;
  features::NormalizationParams normalization;
  features::FeatureSpec features;
  ann::TrainConfig train_config;

  bool operator==(const ModelBundle&) const = default;
};

inline constexpr int kModelFormatVersion = 1;

/// JSON model document.  Numbers are written in shortest round-trip form so
/// load_model(save_model(m)) == m bit for bit.
std::string save_model(const ModelBundle& model);

/// Throws Format on malformed documents, inconsistent dimensions or an
/// unsupported version.
ModelBundle load_model(std::string_view document);

/// Fits normalization on `train_raw`, initializes from config.seed and
/// trains.  The returned bundle carries the config that was used.
std::pair<ModelBundle, ann::TrainResult> fit_model(const features::FeatureMatrix& train_raw,
                                                   const features::FeatureSpec& spec,
                                                   const ann::HiddenSizes& hidden,
                                                   const ann::TrainConfig& config);

/// Builds features for `data` with the model's recipe and predicts kWh.
std::vector<double> predict_dataset(const ModelBundle& model, const dataset::Dataset& data);

}  // namespace hotelwatt
