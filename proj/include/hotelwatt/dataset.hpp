#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hotelwatt/date.hpp"

namespace hotelwatt::dataset {

/// One day of metered hotel consumption.
struct ConsumptionRecord {
  Date date;
  double energy_kwh = 0.0;
  double occupancy_rate = 0.0;  // ORD, fraction of rooms occupied
  std::optional<double> guests;

  bool operator==(const ConsumptionRecord&) const = default;
};

/// Named climatological scalars beyond the core temperature set (wind
/// speed, precipitation, ...).  A name absent from the map is a missing
/// observation.
using Extras = std::map<std::string, double, std::less<>>;

struct WeatherRecord {
  Date date;
  double temp_mean = 0.0;
  double temp_max = 0.0;
  double temp_min = 0.0;
  std::optional<double> humidity;  // percent
  Extras extras;

  bool operator==(const WeatherRecord&) const = default;
};

/// Consumption and weather observations joined on the same calendar day.
struct DailyRecord {
  Date date;
  double energy_kwh = 0.0;
  double occupancy_rate = 0.0;
  std::optional<double> guests;
  double temp_mean = 0.0;
  double temp_max = 0.0;
  double temp_min = 0.0;
  std::optional<double> humidity;
  Extras extras;

  static DailyRecord join(const ConsumptionRecord& consumption, const WeatherRecord& weather);
  ConsumptionRecord consumption() const;
  WeatherRecord weather() const;

  bool operator==(const DailyRecord&) const = default;
};

/// Nonempty daily series of one hotel with strictly increasing dates.
class Dataset {
 public:
  Dataset(std::string hotel_id, std::vector<DailyRecord> records);

  const std::string& hotel_id() const noexcept { return hotel_id_; }
  std::span<const DailyRecord> records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  const DailyRecord& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const noexcept { return records_.begin(); }
  auto end() const noexcept { return records_.end(); }
  Date first_date() const { return records_.front().date; }
  Date last_date() const { return records_.back().date; }

  /// Contiguous sub-range [first, first + count) carrying the same hotel id.
  Dataset slice(std::size_t first, std::size_t count) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::string hotel_id_;
  std::vector<DailyRecord> records_;
};

/// Header `date,energy_kwh,occupancy_rate[,guests]`.  Output is sorted by
/// date; duplicate dates, malformed fields, energy <= 0 and occupancy
/// outside [0,1] raise ParseError naming the row and column.
std::vector<ConsumptionRecord> parse_consumption_csv(std::string_view text);

/// Header `date,temp_mean,temp_max,temp_min[,humidity,...]`.  Columns other
/// than the core set are kept as extras; empty cells are absent values.
std::vector<WeatherRecord> parse_weather_csv(std::string_view text);

std::string write_consumption_csv(std::span<const ConsumptionRecord> records);
std::string write_weather_csv(std::span<const WeatherRecord> records);

/// Column union of both inputs, one row per day.
std::string write_dataset_csv(const Dataset& dataset);

struct JoinResult {
  Dataset dataset;
  std::size_t dropped_consumption = 0;
  std::size_t dropped_weather = 0;
};

/// Inner join on date.  Throws Join when the date sets do not intersect.
JoinResult join_on_date(std::span<const ConsumptionRecord> consumption,
                        std::span<const WeatherRecord> weather,
                        std::string hotel_id = "hotel");

struct Split {
  Dataset train;
  Dataset test;
};

/// Train is the first floor(n * train_fraction) days, test the remainder.
Split chronological_split(const Dataset& dataset, double train_fraction);

/// Coefficients of the synthetic hotel generator:
///   energy = intercept + rdd_coef * RDD + temp_coef * temp_mean + N(0, noise_sd)
/// with temp_mean a yearly sinusoid spanning [temp_low, temp_high] and the
/// occupancy rate uniform in [ord_low, ord_high].
struct SyntheticParams {
  double intercept = 500.0;
  double rdd_coef = 12.0;
  double temp_coef = 3.0;
  double noise_sd = 10.0;
  double temp_low = 22.0;
  double temp_high = 32.0;
  double daily_temp_range = 8.0;
  double ord_low = 0.4;
  double ord_high = 0.95;
  double reference_temperature = 24.0;
  bool clip_negative_cdd = true;
  Date start{std::chrono::year{2011}, std::chrono::January, std::chrono::day{1}};
  std::string hotel_id = "synthetic";
};

inline constexpr int kMinSyntheticDays = 30;

Dataset generate_synthetic(int days, const SyntheticParams& params, std::uint64_t seed);

}  // namespace hotelwatt::dataset
