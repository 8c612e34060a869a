#include "hotelwatt/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hotelwatt/csv.hpp"
#include "hotelwatt/error.hpp"

namespace hotelwatt::features {

double cdd(double temp_mean, double reference_temperature, bool clip) {
  double excess = temp_mean - reference_temperature;
  return clip ? std::max(excess, 0.0) : excess;
}

double rdd(double cdd_value, double occupancy_rate) {
  if (!(occupancy_rate >= 0.0 && occupancy_rate <= 1.0)) {
    throw Error(ErrorKind::Argument, "occupancy rate must lie in [0,1], got " + csv::format_double(occupancy_rate));
  }
  return cdd_value * occupancy_rate;
}

void FeatureSpec::validate() const {
  if (selected.empty()) throw Error(ErrorKind::Argument, "feature list must not be empty");
  std::set<std::string> seen;
  for (const auto& name : selected) {
    if (name.empty()) throw Error(ErrorKind::Argument, "feature names must not be empty");
    if (!seen.insert(name).second) throw Error(ErrorKind::Argument, "duplicate feature '" + name + "'");
  }
  if (!std::isfinite(reference_temperature)) {
    throw Error(ErrorKind::Argument, "reference temperature must be finite");
  }
}

std::vector<std::string> parse_feature_list(std::string_view text) {
  std::vector<std::string> names;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) names.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return names;
}

std::vector<double> FeatureMatrix::column(std::size_t col) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, col);
  return out;
}

FeatureMatrix FeatureMatrix::slice(std::size_t first, std::size_t count) const {
  if (first + count > rows()) throw Error(ErrorKind::Shape, "matrix slice out of range");
  FeatureMatrix out;
  out.columns = columns;
  auto f = static_cast<std::ptrdiff_t>(first), c = static_cast<std::ptrdiff_t>(count);
  auto w = static_cast<std::ptrdiff_t>(cols());
  out.dates.assign(dates.begin() + f, dates.begin() + f + c);
  out.target.assign(target.begin() + f, target.begin() + f + c);
  out.values.assign(values.begin() + f * w, values.begin() + (f + c) * w);
  return out;
}

std::optional<double> feature_value(const dataset::DailyRecord& r, const std::string& name,
                                    const FeatureSpec& spec) {
  if (name == kTempMean) return r.temp_mean;
  if (name == kTempMax) return r.temp_max;
  if (name == kTempMin) return r.temp_min;
  if (name == kHumidity) return r.humidity;
  if (name == kOccupancy) return r.occupancy_rate;
  if (name == kGuests) return r.guests;
  if (name == kCdd) return cdd(r.temp_mean, spec.reference_temperature, spec.clip_negative_cdd);
  if (name == kRdd) {
    return rdd(cdd(r.temp_mean, spec.reference_temperature, spec.clip_negative_cdd), r.occupancy_rate);
  }
  auto it = r.extras.find(name);
  if (it == r.extras.end()) return std::nullopt;
  return it->second;
}

FeatureMatrix build_features(const dataset::Dataset& data, const FeatureSpec& spec) {
  spec.validate();
  FeatureMatrix m;
  m.columns = spec.selected;
  m.dates.reserve(data.size());
  m.target.reserve(data.size());
  m.values.reserve(data.size() * spec.selected.size());
  for (const auto& record : data) {
    for (const auto& name : spec.selected) {
      auto v = feature_value(record, name, spec);
      if (!v) {
        throw Error(ErrorKind::MissingFeature,
                    "feature '" + name + "' is missing on " + format_iso_date(record.date));
      }
      m.values.push_back(*v);
    }
    m.dates.push_back(record.date);
    m.target.push_back(record.energy_kwh);
  }
  return m;
}

double ColumnRange::normalize(double x) const {
  double span = max - min;
  if (span == 0.0) return 0.0;
  return (x - min) / span;
}

double ColumnRange::denormalize(double u) const {
  double span = max - min;
  if (span == 0.0) return min;
  return u * span + min;
}

namespace {

ColumnRange range_of(std::span<const double> values, const std::string& name) {
  if (values.empty()) throw Error(ErrorKind::Data, "cannot fit normalization on an empty matrix");
  ColumnRange r{values[0], values[0]};
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Data, "non-finite value in column '" + name + "'");
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
  }
  return r;
}

void check_compatible(const FeatureMatrix& m, const NormalizationParams& p) {
  if (m.cols() != p.features.size()) {
    throw Error(ErrorKind::Shape, "matrix has " + std::to_string(m.cols()) +
                                      " feature columns, normalization expects " +
                                      std::to_string(p.features.size()));
  }
  if (m.values.size() != m.rows() * m.cols() || m.target.size() != m.rows()) {
    throw Error(ErrorKind::Shape, "inconsistent feature matrix dimensions");
  }
}

template <typename Map>
FeatureMatrix transform(const FeatureMatrix& m, const NormalizationParams& p, Map map) {
  check_compatible(m, p);
  FeatureMatrix out = m;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out.values[r * m.cols() + c] = map(p.features[c], m.at(r, c));
    }
    out.target[r] = map(p.target, m.target[r]);
  }
  return out;
}

}  // namespace

NormalizationParams fit_normalization(const FeatureMatrix& m) {
  if (m.rows() == 0) throw Error(ErrorKind::Data, "cannot fit normalization on an empty matrix");
  NormalizationParams p;
  p.columns = m.columns;
  for (std::size_t c = 0; c < m.cols(); ++c) p.features.push_back(range_of(m.column(c), m.columns[c]));
  p.target = range_of(m.target, "energy_kwh");
  return p;
}

FeatureMatrix apply_normalization(const FeatureMatrix& m, const NormalizationParams& p) {
  return transform(m, p, [](const ColumnRange& r, double x) { return r.normalize(x); });
}

FeatureMatrix invert_normalization(const FeatureMatrix& m, const NormalizationParams& p) {
  return transform(m, p, [](const ColumnRange& r, double u) { return r.denormalize(u); });
}

std::vector<double> normalize_values(std::span<const double> values, const ColumnRange& range) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [&](double x) { return range.normalize(x); });
  return out;
}

std::vector<double> invert_values(std::span<const double> values, const ColumnRange& range) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [&](double u) { return range.denormalize(u); });
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::Shape, "pearson: series lengths differ");
  if (x.size() < 2) throw Error(ErrorKind::Shape, "pearson: need at least two observations");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
  };
  if (constant(x) || constant(y) || sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::UndefinedCorrelation, "pearson: correlation undefined for a constant series");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<Correlation> correlation_table(const FeatureMatrix& m) {
  std::vector<Correlation> table;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    Correlation entry{m.columns[c], std::nullopt};
    try {
      entry.r = pearson(m.column(c), m.target);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UndefinedCorrelation) throw;
    }
    table.push_back(std::move(entry));
  }
  return table;
}

std::string write_feature_csv(const FeatureMatrix& m) {
  std::vector<std::string> header{"date"};
  header.insert(header.end(), m.columns.begin(), m.columns.end());
  header.emplace_back("energy_kwh");
  std::string out = csv::join_row(header);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::vector<std::string> f{format_iso_date(m.dates[r])};
    for (std::size_t c = 0; c < m.cols(); ++c) f.push_back(csv::format_double(m.at(r, c)));
    f.push_back(csv::format_double(m.target[r]));
    out += csv::join_row(f);
  }
  return out;
}

}  // namespace hotelwatt::features
