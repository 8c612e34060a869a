#include "hotelwatt/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "hotelwatt/csv.hpp"
#include "hotelwatt/error.hpp"

namespace hotelwatt::eval {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorKind::Shape, std::string(what) + " needs equal nonzero lengths, got " +
                                      std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double validation_mse(const ann::NetworkParams& net, const features::FeatureMatrix& normalized) {
  std::vector<double> predictions(normalized.rows());
  for (std::size_t r = 0; r < normalized.rows(); ++r) predictions[r] = ann::forward(net, normalized.row(r));
  double v = ann::mse(predictions, normalized.target);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

std::vector<double> concat(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

double rmse(std::span<const double> predictions, std::span<const double> actuals) {
  check_pair(predictions, actuals, "rmse");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    double d = predictions[i] - actuals[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(predictions.size()));
}

double mape(std::span<const double> predictions, std::span<const double> actuals) {
  check_pair(predictions, actuals, "mape");
  double sum = 0.0;
  for (std::size_t i = 0; i < actuals.size(); ++i) {
    if (!(actuals[i] > 0.0)) {
      throw Error(ErrorKind::MetricDomain, "mape: actual value " + csv::format_double(actuals[i]) +
                                               " at index " + std::to_string(i) + " is not positive");
    }
    sum += std::abs(predictions[i] - actuals[i]) / actuals[i];
  }
  return 100.0 * sum / static_cast<double>(actuals.size());
}

void SearchSpace::validate() const {
  for (std::size_t k = 0; k < widths.size(); ++k) {
    if (widths[k].empty()) {
      throw Error(ErrorKind::Argument, "width candidates for hidden layer " + std::to_string(k + 1) + " are empty");
    }
    for (auto w : widths[k]) {
      if (w < 1) throw Error(ErrorKind::Argument, "hidden widths must be >= 1");
    }
  }
  if (!exhaustive && trials < 1) throw Error(ErrorKind::Argument, "random search needs at least one trial");
  base.validate();
}

bool TrialRecord::diverged() const { return !std::isfinite(validation_mse); }

std::vector<ann::HiddenSizes> candidate_architectures(const SearchSpace& space) {
  space.validate();
  const auto& w = space.widths;
  const std::size_t n1 = w[1].size(), n2 = w[2].size();
  const std::size_t total = w[0].size() * n1 * n2;
  auto decode = [&](std::size_t i) {
    return ann::HiddenSizes{w[0][i / (n1 * n2)], w[1][(i / n2) % n1], w[2][i % n2]};
  };
  std::vector<ann::HiddenSizes> out;
  if (space.exhaustive) {
    for (std::size_t i = 0; i < total; ++i) out.push_back(decode(i));
    return out;
  }
  const auto count = std::min(space.trials, total);
  std::mt19937_64 rng(space.seed);
  std::uniform_int_distribution<std::size_t> pick(0, total - 1);
  std::set<std::size_t> seen;
  while (out.size() < count) {
    auto i = pick(rng);
    if (seen.insert(i).second) out.push_back(decode(i));
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t space_seed, std::size_t index) {
  return splitmix64(splitmix64(space_seed) + static_cast<std::uint64_t>(index));
}

void rank_trials(std::vector<TrialRecord>& trials) {
  std::sort(trials.begin(), trials.end(), [](const TrialRecord& a, const TrialRecord& b) {
    if (a.validation_mse != b.validation_mse) return a.validation_mse < b.validation_mse;
    if (a.hidden_sizes != b.hidden_sizes) return a.hidden_sizes < b.hidden_sizes;
    return a.index < b.index;
  });
  for (std::size_t i = 0; i < trials.size(); ++i) trials[i].rank = i + 1;
}

SearchResult search(const SearchSpace& space, const features::FeatureMatrix& train_raw,
                    const features::FeatureSpec& spec, const ValidationPolicy& policy, std::size_t jobs) {
  spec.validate();
  auto candidates = candidate_architectures(space);
  if (!(policy.tail_fraction > 0.0 && policy.tail_fraction < 1.0)) {
    throw Error(ErrorKind::Argument, "validation tail fraction must lie in (0,1)");
  }
  const auto n = train_raw.rows();
  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * policy.tail_fraction + 1e-9));
  if (n_val == 0 || n_val >= n) {
    throw Error(ErrorKind::Argument, "training split of " + std::to_string(n) +
                                         " rows is too short for a validation tail");
  }
  const auto head_raw = train_raw.slice(0, n - n_val);
  const auto norm = features::fit_normalization(head_raw);
  const auto head = features::apply_normalization(head_raw, norm);
  const auto tail = features::apply_normalization(train_raw.slice(n - n_val, n_val), norm);

  std::vector<TrialRecord> trials(candidates.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (auto i = next++; i < candidates.size(); i = next++) {
      auto& trial = trials[i];
      trial.index = i;
      trial.hidden_sizes = candidates[i];
      trial.seed = trial_seed(space.seed, i);
      auto config = space.base;
      config.seed = trial.seed;
      try {
        auto init = ann::init_params(head.cols(), trial.hidden_sizes, config.init_scheme, config.seed);
        auto result = ann::train(std::move(init), head, config);
        trial.validation_mse = validation_mse(result.params, tail);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Training) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
        trial.validation_mse = std::numeric_limits<double>::infinity();
      }
    }
  };

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, candidates.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  rank_trials(trials);
  if (trials.front().diverged()) {
    throw Error(ErrorKind::Search, "all " + std::to_string(trials.size()) + " search trials diverged");
  }

  auto config = space.base;
  config.seed = trials.front().seed;
  try {
    auto [model, training] = fit_model(train_raw, spec, trials.front().hidden_sizes, config);
    return SearchResult{std::move(trials), std::move(model), std::move(training)};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Training) throw;
    throw Error(ErrorKind::Search, std::string("retraining the best architecture failed: ") + e.what());
  }
}

EvalReport evaluate(const ModelBundle& model, const dataset::Dataset& train, const dataset::Dataset& test) {
  auto train_m = features::build_features(train, model.features);
  auto test_m = features::build_features(test, model.features);
  auto train_pred = ann::predict(model.network, features::apply_normalization(train_m, model.normalization),
                                 model.normalization);
  auto test_pred = ann::predict(model.network, features::apply_normalization(test_m, model.normalization),
                                model.normalization);

  EvalReport report;
  report.hotel_id = train.hotel_id();
  report.hidden_sizes = model.network.hidden_sizes;
  report.fit_rmse = rmse(train_pred, train_m.target);
  report.forecast_mape = mape(test_pred, test_m.target);
  report.features = model.features;
  report.train_config = model.train_config;
  report.train_start = train.first_date();
  report.train_end = train.last_date();
  report.test_start = test.first_date();
  report.test_end = test.last_date();

  features::FeatureMatrix full = train_m;
  full.dates.insert(full.dates.end(), test_m.dates.begin(), test_m.dates.end());
  full.values = concat(train_m.values, test_m.values);
  full.target = concat(train_m.target, test_m.target);
  report.correlations = features::correlation_table(full);

  for (std::size_t r = 0; r < test_m.rows(); ++r) {
    report.test_series.push_back(SeriesPoint{test_m.dates[r], test_m.target[r], test_pred[r]});
  }
  return report;
}

}  // namespace hotelwatt::eval
