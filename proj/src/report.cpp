#include "hotelwatt/report.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "hotelwatt/csv.hpp"
#include "json_codec.hpp"

namespace hotelwatt::report {

namespace {

using Json = nlohmann::ordered_json;

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

Json period(Date start, Date end) {
  return Json{{"start", format_iso_date(start)}, {"end", format_iso_date(end)}};
}

}  // namespace

std::string report_json(const eval::EvalReport& r) {
  Json doc;
  doc["hotel"] = r.hotel_id;
  doc["hidden_sizes"] = r.hidden_sizes;
  doc["activation"] = "ReLU";
  doc["fit_rmse_kwh"] = Json{{"value", r.fit_rmse}, {"split", "train"}};
  doc["forecast_mape_percent"] = Json{{"value", r.forecast_mape}, {"split", "test"}};
  Json correlations = Json::array();
  for (const auto& c : r.correlations) {
    correlations.push_back(Json{{"feature", c.feature}, {"pearson_r", c.r ? Json(*c.r) : Json(nullptr)}});
  }
  doc["correlations_vs_energy"] = correlations;
  doc["features"] = r.features.selected;
  doc["reference_temperature"] = r.features.reference_temperature;
  doc["clip_negative_cdd"] = r.features.clip_negative_cdd;
  doc["train_period"] = period(r.train_start, r.train_end);
  doc["test_period"] = period(r.test_start, r.test_end);
  doc["train_config"] = detail::train_config_to_json(r.train_config);
  return doc.dump(2) + "\n";
}

std::string series_csv(std::span<const eval::SeriesPoint> series) {
  std::string out = "date,actual_kwh,predicted_kwh\n";
  for (const auto& p : series) {
    out += csv::join_row({format_iso_date(p.date), csv::format_double(p.actual_kwh),
                          csv::format_double(p.predicted_kwh)});
  }
  return out;
}

std::string trial_log_csv(std::span<const eval::TrialRecord> trials) {
  std::string out = "h1,h2,h3,val_mse,seed,rank\n";
  for (const auto& t : trials) {
    out += csv::join_row({std::to_string(t.hidden_sizes[0]), std::to_string(t.hidden_sizes[1]),
                          std::to_string(t.hidden_sizes[2]),
                          t.diverged() ? std::string("inf") : csv::format_double(t.validation_mse),
                          std::to_string(t.seed), std::to_string(t.rank)});
  }
  return out;
}

std::string loss_history_csv(std::span<const double> loss_history) {
  std::string out = "epoch,train_mse\n";
  for (std::size_t i = 0; i < loss_history.size(); ++i) {
    out += csv::join_row({std::to_string(i + 1), csv::format_double(loss_history[i])});
  }
  return out;
}

std::string predictions_csv(std::span<const Date> dates, std::span<const double> predictions) {
  std::string out = "date,predicted_kwh\n";
  for (std::size_t i = 0; i < dates.size() && i < predictions.size(); ++i) {
    out += csv::join_row({format_iso_date(dates[i]), csv::format_double(predictions[i])});
  }
  return out;
}

std::string correlation_table_text(std::span<const features::Correlation> correlations) {
  std::size_t width = 7;
  for (const auto& c : correlations) width = std::max(width, c.feature.size());
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size() + 2, ' '); };
  std::string out = pad("feature") + "pearson_r\n";
  for (const auto& c : correlations) out += pad(c.feature) + (c.r ? fixed(*c.r, 4) : "n/a") + "\n";
  return out;
}

std::string series_svg(std::span<const eval::SeriesPoint> series, const std::string& title) {
  constexpr double kWidth = 900, kHeight = 420;
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  constexpr double kPlotW = kWidth - kLeft - kRight, kPlotH = kHeight - kTop - kBottom;

  double lo = 0.0, hi = 1.0;
  if (!series.empty()) {
    lo = hi = series.front().actual_kwh;
    for (const auto& p : series) {
      lo = std::min({lo, p.actual_kwh, p.predicted_kwh});
      hi = std::max({hi, p.actual_kwh, p.predicted_kwh});
    }
  }
  if (hi == lo) {
    lo -= 1.0;
    hi += 1.0;
  }
  double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  auto x_at = [&](std::size_t i) {
    return series.size() < 2 ? kLeft + kPlotW / 2
                             : kLeft + kPlotW * static_cast<double>(i) / static_cast<double>(series.size() - 1);
  };
  auto y_at = [&](double v) { return kTop + kPlotH * (hi - v) / (hi - lo); };
  auto polyline = [&](auto value, const char* colour) {
    std::string pts;
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (i) pts += ' ';
      pts += fixed(x_at(i), 2) + "," + fixed(y_at(value(series[i])), 2);
    }
    return "  <polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"" +
           pts + "\"/>\n";
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"420\" viewBox=\"0 0 900 420\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "  <rect width=\"900\" height=\"420\" fill=\"white\"/>\n";
  svg += "  <text x=\"450\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + xml_escape(title) + "</text>\n";
  svg += "  <line x1=\"" + fixed(kLeft, 0) + "\" y1=\"" + fixed(kTop, 0) + "\" x2=\"" + fixed(kLeft, 0) +
         "\" y2=\"" + fixed(kTop + kPlotH, 0) + "\" stroke=\"black\"/>\n";
  svg += "  <line x1=\"" + fixed(kLeft, 0) + "\" y1=\"" + fixed(kTop + kPlotH, 0) + "\" x2=\"" +
         fixed(kLeft + kPlotW, 0) + "\" y2=\"" + fixed(kTop + kPlotH, 0) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    double v = lo + (hi - lo) * t / 4.0;
    auto y = fixed(y_at(v), 2);
    svg += "  <line x1=\"" + fixed(kLeft - 4, 0) + "\" y1=\"" + y + "\" x2=\"" + fixed(kLeft, 0) + "\" y2=\"" + y +
           "\" stroke=\"black\"/>\n";
    svg += "  <text x=\"" + fixed(kLeft - 8, 0) + "\" y=\"" + y + "\" text-anchor=\"end\" dominant-baseline=\"middle\">" +
           fixed(v, 0) + "</text>\n";
  }
  svg += "  <text x=\"16\" y=\"" + fixed(kTop + kPlotH / 2, 0) + "\" transform=\"rotate(-90 16 " +
         fixed(kTop + kPlotH / 2, 0) + ")\" text-anchor=\"middle\">energy (kWh)</text>\n";
  if (!series.empty()) {
    auto base = fixed(kTop + kPlotH + 18, 0);
    svg += "  <text x=\"" + fixed(kLeft, 0) + "\" y=\"" + base + "\" text-anchor=\"start\">" +
           format_iso_date(series.front().date) + "</text>\n";
    svg += "  <text x=\"" + fixed(kLeft + kPlotW, 0) + "\" y=\"" + base + "\" text-anchor=\"end\">" +
           format_iso_date(series.back().date) + "</text>\n";
  }
  svg += polyline([](const eval::SeriesPoint& p) { return p.actual_kwh; }, "#1f77b4");
  svg += polyline([](const eval::SeriesPoint& p) { return p.predicted_kwh; }, "#d62728");
  auto legend_y = fixed(kHeight - 12, 0);
  svg += "  <line x1=\"340\" y1=\"" + legend_y + "\" x2=\"370\" y2=\"" + legend_y +
         "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  svg += "  <text x=\"376\" y=\"" + legend_y + "\" dominant-baseline=\"middle\">actual</text>\n";
  svg += "  <line x1=\"450\" y1=\"" + legend_y + "\" x2=\"480\" y2=\"" + legend_y +
         "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
  svg += "  <text x=\"486\" y=\"" + legend_y + "\" dominant-baseline=\"middle\">predicted</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace hotelwatt::report
