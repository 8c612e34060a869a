#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hotelwatt/ann.hpp"
#include "hotelwatt/dataset.hpp"
#include "hotelwatt/features.hpp"
#include "hotelwatt/model.hpp"

namespace hotelwatt::eval {

/// Root mean squared error in the units of its inputs.
double rmse(std::span<const double> predictions, std::span<const double> actuals);

/// Mean absolute percentage error, in percent.  Every actual must be > 0.
double mape(std::span<const double> predictions, std::span<const double> actuals);

struct SearchSpace {
  std::array<std::vector<std::size_t>, ann::kHiddenLayers> widths{
      std::vector<std::size_t>{8, 16, 32, 64, 128, 256},
      std::vector<std::size_t>{8, 16, 32, 64, 128, 256},
      std::vector<std::size_t>{8, 16, 32, 64, 128, 256}};
  bool exhaustive = false;
  std::size_t trials = 30;
  ann::TrainConfig base;
  std::uint64_t seed = 1;

  void validate() const;
};

struct ValidationPolicy {
  double tail_fraction = 0.1;  // chronological tail of the training split
};

struct TrialRecord {
  ann::HiddenSizes hidden_sizes{};
  double validation_mse = 0.0;  // +inf when training diverged
  std::uint64_t seed = 0;
  std::size_t rank = 0;
  std::size_t index = 0;  // position in candidate order

  bool diverged() const;
  bool operator==(const TrialRecord&) const = default;
};

/// Architectures visited by a search, in trial-index order.  Exhaustive
/// spaces enumerate the full product lexicographically; random spaces draw
/// min(trials, product) distinct triples.
std::vector<ann::HiddenSizes> candidate_architectures(const SearchSpace& space);

/// Seed of trial `index`, a pure function of the space seed.
std::uint64_t trial_seed(std::uint64_t space_seed, std::size_t index);

/// Sorts by validation MSE, then lexicographic widths, then index, and
/// assigns ranks 1..n.
void rank_trials(std::vector<TrialRecord>& trials);

struct SearchResult {
  std::vector<TrialRecord> trials;  // rank order
  ModelBundle best;
  ann::TrainResult best_training;
};

/// Trains every candidate on the head of `train_raw` and scores it on the
/// chronological tail, then retrains the winner on the full training split.
/// `jobs` = 0 uses the machine's parallelism.  Throws Search when every
/// trial diverges.
SearchResult search(const SearchSpace& space, const features::FeatureMatrix& train_raw,
                    const features::FeatureSpec& spec, const ValidationPolicy& policy = {},
                    std::size_t jobs = 0);

struct SeriesPoint {
  Date date;
  double actual_kwh = 0.0;
  double predicted_kwh = 0.0;

  bool operator==(const SeriesPoint&) const = default;
};

struct EvalReport {
  std::string hotel_id;
  ann::HiddenSizes hidden_sizes{};
  double fit_rmse = 0.0;       // kWh, training split
  double forecast_mape = 0.0;  // percent, test split
  std::vector<features::Correlation> correlations;  // every feature vs energy, full data
  features::FeatureSpec features;
  ann::TrainConfig train_config;
  Date train_start, train_end, test_start, test_end;
  std::vector<SeriesPoint> test_series;

  bool operator==(const EvalReport&) const = default;
};

EvalReport evaluate(const ModelBundle& model, const dataset::Dataset& train,
                    const dataset::Dataset& test);

}  // namespace hotelwatt::eval
