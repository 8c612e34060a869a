#include "hotelwatt/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hotelwatt/ann.hpp"
#include "hotelwatt/csv.hpp"
#include "hotelwatt/dataset.hpp"
#include "hotelwatt/eval.hpp"
#include "hotelwatt/features.hpp"
#include "hotelwatt/io.hpp"
#include "hotelwatt/model.hpp"
#include "hotelwatt/report.hpp"
#include "hotelwatt/weather.hpp"

namespace hotelwatt::cli {

namespace {

namespace fs = std::filesystem;

// Reads `--config file.json`: a flat object whose keys are long option
// names of the selected subcommand.  Values set on the command line take
// precedence.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App& app) : app_(app) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json doc;
    try {
      input >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    auto selected = app_.get_subcommands();
    std::vector<std::string> parents;
    if (!selected.empty()) parents.push_back(selected.front()->get_name());
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  const CLI::App& app_;
};

void add_config(CLI::App& app) {
  app.config_formatter(std::make_shared<JsonConfig>(app));
  app.set_config("--config", "", "JSON file of option values for the subcommand; command-line flags win");
}

struct DataOptions {
  std::string consumption;
  std::string weather;
  std::string hotel = "hotel";

  void add(CLI::App* sub) {
    sub->add_option("--consumption", consumption, "Consumption CSV (date,energy_kwh,occupancy_rate[,guests])")
        ->required();
    sub->add_option("--weather", weather, "Weather CSV (date,temp_mean,temp_max,temp_min[,humidity,...])")
        ->required();
    sub->add_option("--hotel", hotel, "Hotel label used in reports")->capture_default_str();
  }

  dataset::JoinResult load() const {
    auto consumption_records = dataset::parse_consumption_csv(io::read_file(consumption));
    auto weather_records = weather::fetch_file(weather);
    return dataset::join_on_date(consumption_records, weather_records, hotel);
  }
};

struct FeatureOptions {
  std::string list = "RDD,temp_mean";
  double reference_temperature = features::kDefaultReferenceTemperature;
  bool no_clip = false;

  void add(CLI::App* sub) {
    sub->add_option("--features", list, "Comma-separated features: temp_mean, temp_max, temp_min, humidity, ORD, "
                                        "guests, CDD, RDD or an extra weather column")
        ->capture_default_str();
    sub->add_option("--theta-r", reference_temperature, "Reference temperature for degree-days, deg C")
        ->capture_default_str();
    sub->add_flag("--no-clip", no_clip, "Keep negative daily degree-days instead of clipping at 0");
  }

  features::FeatureSpec spec() const {
    features::FeatureSpec s{features::parse_feature_list(list), reference_temperature, !no_clip};
    s.validate();
    return s;
  }
};

ann::HiddenSizes parse_hidden(const std::string& text) {
  std::string cleaned;
  for (char c : text) {
    if (c == ';') c = ',';
    if (c != '[' && c != ']' && c != ' ') cleaned += c;
  }
  auto parts = features::parse_feature_list(cleaned);
  if (parts.size() != ann::kHiddenLayers) {
    throw Error(ErrorKind::Argument, "--hidden needs exactly three widths, got '" + text + "'");
  }
  ann::HiddenSizes sizes{};
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto v = csv::parse_double(parts[k]);
    if (!v || *v < 1 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
      throw Error(ErrorKind::Argument, "invalid hidden width '" + parts[k] + "'");
    }
    sizes[k] = static_cast<std::size_t>(*v);
  }
  return sizes;
}

std::vector<std::size_t> parse_widths(const std::string& text, const char* flag) {
  std::vector<std::size_t> widths;
  for (const auto& part : features::parse_feature_list(text)) {
    auto v = csv::parse_double(part);
    if (!v || *v < 1 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
      throw Error(ErrorKind::Argument, std::string("invalid width '") + part + "' in " + flag);
    }
    widths.push_back(static_cast<std::size_t>(*v));
  }
  if (widths.empty()) throw Error(ErrorKind::Argument, std::string(flag) + " candidate list is empty");
  return widths;
}

struct TrainOptions {
  ann::TrainConfig config;
  std::size_t patience = 50;
  std::string init = "he";
  bool no_shuffle = false;
  double train_fraction = 0.9;

  void add(CLI::App* sub) {
    sub->add_option("--lr", config.learning_rate, "Learning rate")->capture_default_str();
    sub->add_option("--epochs", config.epochs, "Maximum epochs")->capture_default_str();
    sub->add_option("--batch-size", config.batch_size, "Mini-batch size")->capture_default_str();
    sub->add_option("--momentum", config.momentum, "Momentum coefficient in [0,1)")->capture_default_str();
    sub->add_option("--patience", patience, "Early-stopping patience in epochs, 0 disables")->capture_default_str();
    sub->add_option("--validation-fraction", config.validation_fraction,
                    "Tail of the training rows watched by early stopping")
        ->capture_default_str();
    sub->add_option("--init", init, "Weight initialization: he or uniform-small")->capture_default_str();
    sub->add_flag("--no-shuffle", no_shuffle, "Keep chronological batch order");
    sub->add_option("--seed", config.seed, "Random seed")->capture_default_str();
    sub->add_option("--train-fraction", train_fraction, "Chronological share of days used for training")
        ->capture_default_str();
  }

  ann::TrainConfig build() {
    config.init_scheme = ann::parse_init_scheme(init);
    config.early_stop_patience = patience == 0 ? std::nullopt : std::optional(patience);
    config.shuffle_each_epoch = !no_shuffle;
    config.validate();
    check_fraction(train_fraction);
    return config;
  }

  static void check_fraction(double f) {
    if (!(f > 0.0 && f < 1.0)) {
      throw Error(ErrorKind::Argument, "--train-fraction must lie in (0,1), got " + csv::format_double(f));
    }
  }
};

fs::path sibling(const fs::path& path, const std::string& suffix) {
  auto out = path;
  out.replace_extension();
  out += suffix;
  return out;
}

void report_join(const dataset::JoinResult& joined, std::ostream& out) {
  out << "joined " << joined.dataset.size() << " days (" << format_iso_date(joined.dataset.first_date())
      << " .. " << format_iso_date(joined.dataset.last_date()) << "); dropped " << joined.dropped_consumption
      << " consumption and " << joined.dropped_weather << " weather rows without a match\n";
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

void print_metrics(const eval::EvalReport& report, std::size_t train_days, std::size_t test_days,
                   std::ostream& out) {
  out << "fit RMSE (train, " << train_days << " days): " << fixed(report.fit_rmse, 2) << " kWh\n";
  out << "forecast MAPE (test, " << test_days << " days): " << fixed(report.forecast_mape, 2) << " %\n";
}

// --- subcommands ----------------------------------------------------------

struct SynthCommand {
  int days = 1200;
  std::uint64_t seed = 7;
  dataset::SyntheticParams params;
  std::string start = "2011-01-01";
  std::string consumption_out, weather_out;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("synth", "Generate a synthetic hotel dataset with a known linear generator");
    sub->add_option("--days", days, "Number of days")->capture_default_str();
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    sub->add_option("--start", start, "First date, YYYY-MM-DD")->capture_default_str();
    sub->add_option("--intercept", params.intercept, "Base load, kWh")->capture_default_str();
    sub->add_option("--rdd-coef", params.rdd_coef, "kWh per room degree-day")->capture_default_str();
    sub->add_option("--temp-coef", params.temp_coef, "kWh per deg C of mean temperature")->capture_default_str();
    sub->add_option("--sigma", params.noise_sd, "Gaussian noise standard deviation, kWh")->capture_default_str();
    sub->add_option("--temp-low", params.temp_low, "Seasonal minimum of mean temperature")->capture_default_str();
    sub->add_option("--temp-high", params.temp_high, "Seasonal maximum of mean temperature")->capture_default_str();
    sub->add_option("--ord-low", params.ord_low, "Lower bound of the occupancy rate")->capture_default_str();
    sub->add_option("--ord-high", params.ord_high, "Upper bound of the occupancy rate")->capture_default_str();
    sub->add_option("--theta-r", params.reference_temperature, "Reference temperature, deg C")
        ->capture_default_str();
    sub->add_option("--hotel", params.hotel_id, "Hotel label")->capture_default_str();
    sub->add_option("--consumption-out", consumption_out, "Consumption CSV to write")->required();
    sub->add_option("--weather-out", weather_out, "Weather CSV to write")->required();
  }

  int run(std::ostream& out) {
    auto first = parse_iso_date(start);
    if (!first) throw Error(ErrorKind::Argument, "--start must be YYYY-MM-DD, got '" + start + "'");
    params.start = *first;
    auto data = dataset::generate_synthetic(days, params, seed);
    std::vector<dataset::ConsumptionRecord> consumption;
    std::vector<dataset::WeatherRecord> weather;
    for (const auto& r : data) {
      consumption.push_back(r.consumption());
      weather.push_back(r.weather());
    }
    auto consumption_text = dataset::write_consumption_csv(consumption);
    auto weather_text = dataset::write_weather_csv(weather);
    io::write_file_atomic(consumption_out, consumption_text);
    io::write_file_atomic(weather_out, weather_text);
    out << "wrote " << data.size() << " synthetic days to " << consumption_out << " and " << weather_out << "\n";
    return kOk;
  }
};

struct FetchWeatherCommand {
  std::string location, start, end, out_path;
  weather::ProviderConfig config;
  std::string cache_dir = ".hotelwatt-cache";

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("fetch-weather", "Download daily weather history (cached on disk)");
    sub->add_option("--location", location, "Place name or \"lat,lon\"")->required();
    sub->add_option("--start", start, "First day, YYYY-MM-DD")->required();
    sub->add_option("--end", end, "Last day, YYYY-MM-DD")->required();
    sub->add_option("--out", out_path, "Weather CSV to write")->required();
    sub->add_option("--base-url", config.base_url, "Timeline API base URL")->capture_default_str();
    sub->add_option("--cache-dir", cache_dir, "Cache directory")->capture_default_str();
    sub->add_option("--timeout", config.timeout_seconds, "Request timeout, seconds")->capture_default_str();
  }

  int run(std::ostream& out) {
    auto first = parse_iso_date(start), last = parse_iso_date(end);
    if (!first || !last) throw Error(ErrorKind::Argument, "--start and --end must be YYYY-MM-DD");
    weather::WeatherQuery query{location, *first, *last, "metric"};
    query.validate();
    config.cache_dir = cache_dir;
    config.api_key = weather::api_key_from_env().value_or("");
    config.validate();
    auto records = weather::fetch_remote(query, config);
    io::write_file_atomic(out_path, dataset::write_weather_csv(records));
    out << "wrote " << records.size() << " days of weather to " << out_path << "\n";
    return kOk;
  }
};

struct FeaturesCommand {
  DataOptions data;
  FeatureOptions feature_opts;
  std::string out_path;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("features", "Build the feature matrix and correlate each feature with energy");
    data.add(sub);
    feature_opts.add(sub);
    sub->add_option("--out", out_path, "Feature matrix CSV to write")->required();
  }

  int run(std::ostream& out) {
    auto spec = feature_opts.spec();
    auto joined = data.load();
    auto matrix = features::build_features(joined.dataset, spec);
    auto table = features::correlation_table(matrix);
    io::write_file_atomic(out_path, features::write_feature_csv(matrix));
    report_join(joined, out);
    out << "reference temperature: " << csv::format_double(spec.reference_temperature) << " deg C"
        << (spec.clip_negative_cdd ? "" : " (unclipped)") << "\n";
    out << report::correlation_table_text(table);
    return kOk;
  }
};

struct TrainCommand {
  DataOptions data;
  FeatureOptions feature_opts;
  TrainOptions train_opts;
  std::string hidden = "32,16,8";
  std::string model_out, loss_out;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("train", "Train a three-hidden-layer ReLU network");
    data.add(sub);
    feature_opts.add(sub);
    train_opts.add(sub);
    sub->add_option("--hidden", hidden, "Hidden widths h1,h2,h3")->capture_default_str();
    sub->add_option("--model-out", model_out, "Model JSON to write")->required();
    sub->add_option("--loss-out", loss_out, "Loss-history CSV (default: <model>.loss.csv)");
  }

  int run(std::ostream& out) {
    auto spec = feature_opts.spec();
    auto config = train_opts.build();
    auto widths = parse_hidden(hidden);
    auto joined = data.load();
    auto split = dataset::chronological_split(joined.dataset, train_opts.train_fraction);
    auto train_matrix = features::build_features(split.train, spec);
    auto [model, result] = fit_model(train_matrix, spec, widths, config);
    auto report = eval::evaluate(model, split.train, split.test);

    auto loss_path = loss_out.empty() ? sibling(model_out, ".loss.csv") : fs::path(loss_out);
    io::write_file_atomic(model_out, save_model(model));
    io::write_file_atomic(loss_path, report::loss_history_csv(result.loss_history));

    report_join(joined, out);
    out << "trained " << ann::format_hidden_sizes(widths) << " for " << result.epochs_run << " epochs";
    if (result.best_epoch) out << " (best validation epoch " << *result.best_epoch << ")";
    out << "\n";
    print_metrics(report, split.train.size(), split.test.size(), out);
    out << "model written to " << model_out << "\n";
    return kOk;
  }
};

struct SearchCommand {
  DataOptions data;
  FeatureOptions feature_opts;
  TrainOptions train_opts;
  std::string h1 = "8,16,32,64,128,256", h2 = h1, h3 = h1;
  std::string widths;
  bool exhaustive = false;
  std::size_t trials = 30;
  std::size_t jobs = 0;
  double validation_tail = 0.1;
  std::string trials_out, model_out;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("search", "Search hidden-layer widths on a chronological validation tail");
    data.add(sub);
    feature_opts.add(sub);
    train_opts.add(sub);
    sub->add_option("--h1", h1, "Width candidates for hidden layer 1")->capture_default_str();
    sub->add_option("--h2", h2, "Width candidates for hidden layer 2")->capture_default_str();
    sub->add_option("--h3", h3, "Width candidates for hidden layer 3")->capture_default_str();
    sub->add_option("--widths", widths, "Width candidates for all three layers (overrides --h1/--h2/--h3)");
    sub->add_flag("--exhaustive", exhaustive, "Visit every width combination");
    sub->add_option("--trials", trials, "Random-search trials")->capture_default_str();
    sub->add_option("--jobs", jobs, "Parallel trainings, 0 = hardware concurrency")->capture_default_str();
    sub->add_option("--validation-tail", validation_tail, "Share of the training split scored by each trial")
        ->capture_default_str();
    sub->add_option("--trials-out", trials_out, "Ranked trial log CSV")->required();
    sub->add_option("--model-out", model_out, "Best model JSON")->required();
  }

  int run(std::ostream& out) {
    auto spec = feature_opts.spec();
    eval::SearchSpace space;
    space.base = train_opts.build();
    space.seed = space.base.seed;
    if (!widths.empty()) {
      auto w = parse_widths(widths, "--widths");
      space.widths = {w, w, w};
    } else {
      space.widths = {parse_widths(h1, "--h1"), parse_widths(h2, "--h2"), parse_widths(h3, "--h3")};
    }
    space.exhaustive = exhaustive;
    space.trials = trials;
    space.validate();
    eval::ValidationPolicy policy{validation_tail};

    auto joined = data.load();
    auto split = dataset::chronological_split(joined.dataset, train_opts.train_fraction);
    auto train_matrix = features::build_features(split.train, spec);
    auto result = eval::search(space, train_matrix, spec, policy, jobs);
    auto report = eval::evaluate(result.best, split.train, split.test);

    io::write_file_atomic(trials_out, report::trial_log_csv(result.trials));
    io::write_file_atomic(model_out, save_model(result.best));

    report_join(joined, out);
    auto diverged = std::count_if(result.trials.begin(), result.trials.end(),
                                  [](const auto& t) { return t.diverged(); });
    out << "ran " << result.trials.size() << " trials (" << diverged << " diverged)\n";
    out << "best widths: " << ann::format_hidden_sizes(result.best.network.hidden_sizes) << "\n";
    print_metrics(report, split.train.size(), split.test.size(), out);
    return kOk;
  }
};

struct PredictCommand {
  std::string model_path, out_path;
  DataOptions data;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("predict", "Predict daily energy with a saved model");
    sub->add_option("--model", model_path, "Model JSON")->required();
    data.add(sub);
    sub->add_option("--out", out_path, "Predictions CSV to write")->required();
  }

  int run(std::ostream& out) {
    auto model = load_model(io::read_file(model_path));
    auto joined = data.load();
    auto predictions = predict_dataset(model, joined.dataset);
    std::vector<Date> dates;
    for (const auto& r : joined.dataset) dates.push_back(r.date);
    io::write_file_atomic(out_path, report::predictions_csv(dates, predictions));
    out << "wrote " << predictions.size() << " predictions to " << out_path << "\n";
    return kOk;
  }
};

struct EvaluateCommand {
  std::string model_path, report_out, series_out, svg_out;
  DataOptions data;
  double train_fraction = 0.9;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("evaluate", "Score a saved model: fit RMSE on train, forecast MAPE on test");
    sub->add_option("--model", model_path, "Model JSON")->required();
    data.add(sub);
    sub->add_option("--train-fraction", train_fraction, "Chronological share of days in the training split")
        ->capture_default_str();
    sub->add_option("--report-out", report_out, "Report JSON to write")->required();
    sub->add_option("--series-out", series_out, "Actual vs predicted CSV for the test split")->required();
    sub->add_option("--svg", svg_out, "Also draw the test split as an SVG line chart");
  }

  int run(std::ostream& out) {
    TrainOptions::check_fraction(train_fraction);
    auto model = load_model(io::read_file(model_path));
    auto joined = data.load();
    auto split = dataset::chronological_split(joined.dataset, train_fraction);
    auto report = eval::evaluate(model, split.train, split.test);

    io::write_file_atomic(report_out, report::report_json(report));
    io::write_file_atomic(series_out, report::series_csv(report.test_series));
    if (!svg_out.empty()) {
      auto title = report.hotel_id + ": forecast vs actual, " + ann::format_hidden_sizes(report.hidden_sizes);
      io::write_file_atomic(svg_out, report::series_svg(report.test_series, title));
    }
    print_metrics(report, split.train.size(), split.test.size(), out);
    out << report::correlation_table_text(report.correlations);
    return kOk;
  }
};

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Argument:
      return kUsage;
    case ErrorKind::Training:
    case ErrorKind::Search:
      return kTraining;
    case ErrorKind::Provider:
    case ErrorKind::IncompleteData:
    case ErrorKind::Transport:
      return kProvider;
    default:
      return kData;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hotelwatt: daily hotel electricity forecasting with degree-day features", "hotelwatt"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  add_config(app);

  SynthCommand synth;
  FetchWeatherCommand fetch;
  FeaturesCommand features_cmd;
  TrainCommand train;
  SearchCommand search;
  PredictCommand predict;
  EvaluateCommand evaluate;
  synth.add(app);
  fetch.add(app);
  features_cmd.add(app);
  train.add(app);
  search.add(app);
  predict.add(app);
  evaluate.add(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    auto* sub = app.get_subcommands().front();
    const auto& name = sub->get_name();
    if (name == "synth") return synth.run(out);
    if (name == "fetch-weather") return fetch.run(out);
    if (name == "features") return features_cmd.run(out);
    if (name == "train") return train.run(out);
    if (name == "search") return search.run(out);
    if (name == "predict") return predict.run(out);
    if (name == "evaluate") return evaluate.run(out);
    err << "hotelwatt: unknown subcommand " << name << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "hotelwatt: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "hotelwatt: " << e.what() << "\n";
    return kData;
  }
}

}  // namespace hotelwatt::cli
