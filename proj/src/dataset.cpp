#include "hotelwatt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "hotelwatt/csv.hpp"
#include "hotelwatt/error.hpp"
#include "hotelwatt/features.hpp"

namespace hotelwatt::dataset {

namespace {

std::size_t require_column(const csv::Table& table, const char* name) {
  auto idx = table.column(name);
  if (!idx) throw ParseError(0, name, "missing required column");
  return *idx;
}

Date parse_date_field(const std::string& text, std::size_t row) {
  auto date = parse_iso_date(text);
  if (!date) throw ParseError(row, "date", "malformed date '" + text + "', expected YYYY-MM-DD");
  return *date;
}

double parse_number_field(const std::string& text, std::size_t row, const std::string& column) {
  auto value = csv::parse_double(text);
  if (!value) throw ParseError(row, column, "non-numeric value '" + text + "'");
  return *value;
}

std::optional<double> parse_optional_field(const std::string& text, std::size_t row,
                                           const std::string& column) {
  if (text.empty()) return std::nullopt;
  return parse_number_field(text, row, column);
}

// Sorts records by date and rejects duplicates, reporting the later of the
// two source rows.
template <typename Record>
std::vector<Record> sort_unique(std::vector<std::pair<Record, std::size_t>> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::chrono::sys_days{a.first.date} < std::chrono::sys_days{b.first.date};
  });
  std::vector<Record> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].first.date == rows[i - 1].first.date) {
      auto later = std::max(rows[i].second, rows[i - 1].second);
      auto earlier = std::min(rows[i].second, rows[i - 1].second);
      throw ParseError(later, "date",
                       "duplicate date " + format_iso_date(rows[i].first.date) + " (also on row " +
                           std::to_string(earlier) + ")");
    }
    out.push_back(std::move(rows[i].first));
  }
  return out;
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string{};
}

void check_record_order(const std::vector<DailyRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::Data, "dataset must not be empty");
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (std::chrono::sys_days{records[i].date} <= std::chrono::sys_days{records[i - 1].date}) {
      throw Error(ErrorKind::Data, "dataset dates must be strictly increasing (at " +
                                       format_iso_date(records[i].date) + ")");
    }
  }
}

}  // namespace

DailyRecord DailyRecord::join(const ConsumptionRecord& c, const WeatherRecord& w) {
  return DailyRecord{c.date,       c.energy_kwh, c.occupancy_rate, c.guests, w.temp_mean,
                     w.temp_max,   w.temp_min,   w.humidity,       w.extras};
}

ConsumptionRecord DailyRecord::consumption() const {
  return ConsumptionRecord{date, energy_kwh, occupancy_rate, guests};
}

WeatherRecord DailyRecord::weather() const {
  return WeatherRecord{date, temp_mean, temp_max, temp_min, humidity, extras};
}

Dataset::Dataset(std::string hotel_id, std::vector<DailyRecord> records)
    : hotel_id_(std::move(hotel_id)), records_(std::move(records)) {
  check_record_order(records_);
}

Dataset Dataset::slice(std::size_t first, std::size_t count) const {
  if (first + count > records_.size()) throw Error(ErrorKind::Argument, "slice out of range");
  return Dataset(hotel_id_, std::vector<DailyRecord>(records_.begin() + static_cast<std::ptrdiff_t>(first),
                                                     records_.begin() + static_cast<std::ptrdiff_t>(first + count)));
}

std::vector<ConsumptionRecord> parse_consumption_csv(std::string_view text) {
  auto table = csv::read(text);
  auto date_col = require_column(table, "date");
  auto energy_col = require_column(table, "energy_kwh");
  auto ord_col = require_column(table, "occupancy_rate");
  auto guests_col = table.column("guests");

  std::vector<std::pair<ConsumptionRecord, std::size_t>> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    auto row = i + 1;
    ConsumptionRecord rec;
    rec.date = parse_date_field(f[date_col], row);
    rec.energy_kwh = parse_number_field(f[energy_col], row, "energy_kwh");
    if (rec.energy_kwh <= 0.0) throw ParseError(row, "energy_kwh", "energy must be > 0");
    rec.occupancy_rate = parse_number_field(f[ord_col], row, "occupancy_rate");
    if (rec.occupancy_rate < 0.0 || rec.occupancy_rate > 1.0) {
      throw ParseError(row, "occupancy_rate", "occupancy rate must lie in [0,1], got " + f[ord_col]);
    }
    if (guests_col) {
      rec.guests = parse_optional_field(f[*guests_col], row, "guests");
      if (rec.guests && *rec.guests < 0.0) throw ParseError(row, "guests", "guest count must be >= 0");
    }
    rows.emplace_back(std::move(rec), row);
  }
  return sort_unique(std::move(rows));
}

std::vector<WeatherRecord> parse_weather_csv(std::string_view text) {
  auto table = csv::read(text);
  auto date_col = require_column(table, "date");
  auto mean_col = require_column(table, "temp_mean");
  auto max_col = require_column(table, "temp_max");
  auto min_col = require_column(table, "temp_min");
  auto hum_col = table.column("humidity");
  std::vector<std::size_t> extra_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c != date_col && c != mean_col && c != max_col && c != min_col && c != hum_col) {
      extra_cols.push_back(c);
    }
  }

  std::vector<std::pair<WeatherRecord, std::size_t>> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    auto row = i + 1;
    WeatherRecord rec;
    rec.date = parse_date_field(f[date_col], row);
    rec.temp_mean = parse_number_field(f[mean_col], row, "temp_mean");
    rec.temp_max = parse_number_field(f[max_col], row, "temp_max");
    rec.temp_min = parse_number_field(f[min_col], row, "temp_min");
    if (rec.temp_min > rec.temp_max) {
      throw Error(ErrorKind::Consistency, "row " + std::to_string(row) + ": temp_min " + f[min_col] +
                                              " exceeds temp_max " + f[max_col]);
    }
    if (rec.temp_mean < rec.temp_min || rec.temp_mean > rec.temp_max) {
      throw Error(ErrorKind::Consistency, "row " + std::to_string(row) + ": temp_mean " + f[mean_col] +
                                              " outside [temp_min, temp_max]");
    }
    if (hum_col) {
      rec.humidity = parse_optional_field(f[*hum_col], row, "humidity");
      if (rec.humidity && (*rec.humidity < 0.0 || *rec.humidity > 100.0)) {
        throw ParseError(row, "humidity", "humidity must lie in [0,100]");
      }
    }
    for (auto c : extra_cols) {
      if (auto v = parse_optional_field(f[c], row, table.header[c])) rec.extras.emplace(table.header[c], *v);
    }
    rows.emplace_back(std::move(rec), row);
  }
  return sort_unique(std::move(rows));
}

std::string write_consumption_csv(std::span<const ConsumptionRecord> records) {
  bool with_guests = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.guests.has_value(); });
  std::vector<std::string> header{"date", "energy_kwh", "occupancy_rate"};
  if (with_guests) header.emplace_back("guests");
  std::string out = csv::join_row(header);
  for (const auto& r : records) {
    std::vector<std::string> f{format_iso_date(r.date), csv::format_double(r.energy_kwh),
                               csv::format_double(r.occupancy_rate)};
    if (with_guests) f.push_back(optional_cell(r.guests));
    out += csv::join_row(f);
  }
  return out;
}

namespace {

struct WeatherColumns {
  bool humidity = false;
  std::set<std::string, std::less<>> extras;
};

template <typename Range>
WeatherColumns weather_columns(const Range& records) {
  WeatherColumns cols;
  for (const auto& r : records) {
    cols.humidity = cols.humidity || r.humidity.has_value();
    for (const auto& [name, value] : r.extras) cols.extras.insert(name);
  }
  return cols;
}

void append_weather_header(std::vector<std::string>& header, const WeatherColumns& cols) {
  header.insert(header.end(), {"temp_mean", "temp_max", "temp_min"});
  if (cols.humidity) header.emplace_back("humidity");
  header.insert(header.end(), cols.extras.begin(), cols.extras.end());
}

template <typename Record>
void append_weather_fields(std::vector<std::string>& f, const Record& r, const WeatherColumns& cols) {
  f.push_back(csv::format_double(r.temp_mean));
  f.push_back(csv::format_double(r.temp_max));
  f.push_back(csv::format_double(r.temp_min));
  if (cols.humidity) f.push_back(optional_cell(r.humidity));
  for (const auto& name : cols.extras) {
    auto it = r.extras.find(name);
    f.push_back(it == r.extras.end() ? std::string{} : csv::format_double(it->second));
  }
}

}  // namespace

std::string write_weather_csv(std::span<const WeatherRecord> records) {
  auto cols = weather_columns(records);
  std::vector<std::string> header{"date"};
  append_weather_header(header, cols);
  std::string out = csv::join_row(header);
  for (const auto& r : records) {
    std::vector<std::string> f{format_iso_date(r.date)};
    append_weather_fields(f, r, cols);
    out += csv::join_row(f);
  }
  return out;
}

std::string write_dataset_csv(const Dataset& dataset) {
  auto records = dataset.records();
  bool with_guests = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.guests.has_value(); });
  auto cols = weather_columns(records);
  std::vector<std::string> header{"date", "energy_kwh", "occupancy_rate"};
  if (with_guests) header.emplace_back("guests");
  append_weather_header(header, cols);
  std::string out = csv::join_row(header);
  for (const auto& r : records) {
    std::vector<std::string> f{format_iso_date(r.date), csv::format_double(r.energy_kwh),
                               csv::format_double(r.occupancy_rate)};
    if (with_guests) f.push_back(optional_cell(r.guests));
    append_weather_fields(f, r, cols);
    out += csv::join_row(f);
  }
  return out;
}

JoinResult join_on_date(std::span<const ConsumptionRecord> consumption,
                        std::span<const WeatherRecord> weather, std::string hotel_id) {
  if (consumption.empty() || weather.empty()) {
    throw Error(ErrorKind::Join, "cannot join: consumption and weather series must both be nonempty");
  }
  std::map<std::chrono::sys_days, const WeatherRecord*> by_date;
  for (const auto& w : weather) {
    if (!by_date.emplace(std::chrono::sys_days{w.date}, &w).second) {
      throw Error(ErrorKind::Join, "duplicate weather date " + format_iso_date(w.date));
    }
  }
  std::vector<const ConsumptionRecord*> ordered;
  ordered.reserve(consumption.size());
  for (const auto& c : consumption) ordered.push_back(&c);
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return std::chrono::sys_days{a->date} < std::chrono::sys_days{b->date};
  });

  std::vector<DailyRecord> joined;
  std::size_t dropped_consumption = 0;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (i > 0 && ordered[i]->date == ordered[i - 1]->date) {
      throw Error(ErrorKind::Join, "duplicate consumption date " + format_iso_date(ordered[i]->date));
    }
    auto it = by_date.find(std::chrono::sys_days{ordered[i]->date});
    if (it == by_date.end()) {
      ++dropped_consumption;
      continue;
    }
    joined.push_back(DailyRecord::join(*ordered[i], *it->second));
  }
  if (joined.empty()) throw Error(ErrorKind::Join, "consumption and weather dates do not overlap");
  auto dropped_weather = weather.size() - joined.size();
  return JoinResult{Dataset(std::move(hotel_id), std::move(joined)), dropped_consumption, dropped_weather};
}

Split chronological_split(const Dataset& dataset, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::Argument, "train fraction must lie in (0,1), got " + csv::format_double(train_fraction));
  }
  auto n = dataset.size();
  // The epsilon keeps products such as 0.29 * 100 from flooring one short.
  auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction + 1e-9));
  if (n_train == 0 || n_train >= n) {
    throw Error(ErrorKind::Argument, "train fraction " + csv::format_double(train_fraction) + " over " +
                                         std::to_string(n) + " records leaves an empty partition");
  }
  return Split{dataset.slice(0, n_train), dataset.slice(n_train, n - n_train)};
}

Dataset generate_synthetic(int days, const SyntheticParams& p, std::uint64_t seed) {
  if (days < kMinSyntheticDays) {
    throw Error(ErrorKind::Argument, "synthetic series needs at least " + std::to_string(kMinSyntheticDays) +
                                         " days, got " + std::to_string(days));
  }
  if (!(p.noise_sd >= 0.0)) throw Error(ErrorKind::Argument, "noise standard deviation must be >= 0");
  if (!(p.temp_low <= p.temp_high)) throw Error(ErrorKind::Argument, "temp_low must not exceed temp_high");
  if (!(p.daily_temp_range >= 0.0)) throw Error(ErrorKind::Argument, "daily temperature range must be >= 0");
  if (!(0.0 <= p.ord_low && p.ord_low <= p.ord_high && p.ord_high <= 1.0)) {
    throw Error(ErrorKind::Argument, "occupancy band must satisfy 0 <= low <= high <= 1");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> occupancy(p.ord_low, p.ord_high);
  std::normal_distribution<double> noise(0.0, p.noise_sd > 0.0 ? p.noise_sd : 1.0);

  const double mid = 0.5 * (p.temp_low + p.temp_high);
  const double amp = 0.5 * (p.temp_high - p.temp_low);
  constexpr double kYear = 365.25;
  constexpr double kPhase = 109.75;  // puts the peak near day 201, late July

  std::vector<DailyRecord> records;
  records.reserve(static_cast<std::size_t>(days));
  for (int t = 0; t < days; ++t) {
    DailyRecord r;
    r.date = add_days(p.start, t);
    auto doy = static_cast<double>(day_of_year(r.date));
    double season = std::sin(2.0 * std::numbers::pi * (doy - kPhase) / kYear);
    r.temp_mean = mid + amp * season;
    r.temp_max = r.temp_mean + 0.5 * p.daily_temp_range;
    r.temp_min = r.temp_mean - 0.5 * p.daily_temp_range;
    r.humidity = 75.0 - 10.0 * season;
    r.occupancy_rate = p.ord_low == p.ord_high ? p.ord_low : occupancy(rng);

    double rdd = features::rdd(features::cdd(r.temp_mean, p.reference_temperature, p.clip_negative_cdd),
                               r.occupancy_rate);
    r.energy_kwh = p.intercept + p.rdd_coef * rdd + p.temp_coef * r.temp_mean;
    if (p.noise_sd > 0.0) r.energy_kwh += noise(rng);
    if (!(r.energy_kwh > 0.0)) {
      throw Error(ErrorKind::Generation, "generator produced non-positive energy " +
                                             csv::format_double(r.energy_kwh) + " on " + format_iso_date(r.date));
    }
    records.push_back(std::move(r));
  }
  return Dataset(p.hotel_id, std::move(records));
}

}  // namespace hotelwatt::dataset
