#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hotelwatt/dataset.hpp"

namespace hotelwatt::features {

// Canonical feature names.  Any other name is looked up in the weather
// extras of each record.
inline constexpr const char* kTempMean = "temp_mean";
inline constexpr const char* kTempMax = "temp_max";
inline constexpr const char* kTempMin = "temp_min";
inline constexpr const char* kHumidity = "humidity";
inline constexpr const char* kOccupancy = "ORD";
inline constexpr const char* kGuests = "guests";
inline constexpr const char* kCdd = "CDD";
inline constexpr const char* kRdd = "RDD";

inline constexpr double kDefaultReferenceTemperature = 24.0;

/// Daily cooling degree-days of a mean outside temperature over the
/// reference.  With `clip` the negative part is dropped.
double cdd(double temp_mean, double reference_temperature, bool clip);

/// Room degree-days: cooling degree-days weighted by the occupancy rate.
/// Throws Argument when the rate lies outside [0,1].
double rdd(double cdd_value, double occupancy_rate);

struct FeatureSpec {
  std::vector<std::string> selected;
  double reference_temperature = kDefaultReferenceTemperature;
  bool clip_negative_cdd = true;

  /// Nonempty, duplicate-free, finite reference temperature.
  void validate() const;

  bool operator==(const FeatureSpec&) const = default;
};

/// Parses a comma-separated feature list such as "RDD,temp_mean".
std::vector<std::string> parse_feature_list(std::string_view text);

/// Model-ready design matrix.  Values are row-major, one row per day.
struct FeatureMatrix {
  std::vector<Date> dates;
  std::vector<std::string> columns;
  std::vector<double> values;
  std::vector<double> target;  // energy, kWh (or normalized)

  std::size_t rows() const noexcept { return dates.size(); }
  std::size_t cols() const noexcept { return columns.size(); }
  double at(std::size_t row, std::size_t col) const { return values[row * cols() + col]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * cols(), cols());
  }
  std::vector<double> column(std::size_t col) const;

  /// Rows [first, first + count).
  FeatureMatrix slice(std::size_t first, std::size_t count) const;

  bool operator==(const FeatureMatrix&) const = default;
};

/// Value of one named feature on one day, or nullopt when the record does
/// not carry it.
std::optional<double> feature_value(const dataset::DailyRecord& record, const std::string& name,
                                    const FeatureSpec& spec);

/// Columns follow spec order, the target is the energy column.  Throws
/// MissingFeature naming the first date and feature that cannot be resolved.
FeatureMatrix build_features(const dataset::Dataset& data, const FeatureSpec& spec);

/// Min-max range of one column in original units.
struct ColumnRange {
  double min = 0.0;
  double max = 0.0;

  /// (x - min) / (max - min); a constant column maps to 0.  Values outside
  /// the range extend affinely and are not clamped.
  double normalize(double x) const;
  double denormalize(double u) const;

  bool operator==(const ColumnRange&) const = default;
};

struct NormalizationParams {
  std::vector<std::string> columns;
  std::vector<ColumnRange> features;
  ColumnRange target;

  bool operator==(const NormalizationParams&) const = default;
};

NormalizationParams fit_normalization(const FeatureMatrix& matrix);

/// Scales feature columns and the target into training units.
FeatureMatrix apply_normalization(const FeatureMatrix& matrix, const NormalizationParams& params);

FeatureMatrix invert_normalization(const FeatureMatrix& matrix, const NormalizationParams& params);

std::vector<double> normalize_values(std::span<const double> values, const ColumnRange& range);
std::vector<double> invert_values(std::span<const double> values, const ColumnRange& range);

/// Sample Pearson correlation.  Throws UndefinedCorrelation when either
/// series is constant.
double pearson(std::span<const double> x, std::span<const double> y);

struct Correlation {
  std::string feature;
  std::optional<double> r;  // nullopt when undefined

  bool operator==(const Correlation&) const = default;
};

/// Pearson r of every feature column against the target.
std::vector<Correlation> correlation_table(const FeatureMatrix& matrix);

/// `date,<features...>,energy_kwh`.
std::string write_feature_csv(const FeatureMatrix& matrix);

}  // namespace hotelwatt::features
