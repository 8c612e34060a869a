#include "hotelwatt/report.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

using namespace hotelwatt;

namespace {

Date day(int d) { return add_days(Date{std::chrono::year{2013}, std::chrono::March, std::chrono::day{1}}, d); }

std::vector<eval::SeriesPoint> series(int n) {
  std::vector<eval::SeriesPoint> s;
  for (int i = 0; i < n; ++i) s.push_back({day(i), 600.0 + i, 598.5 + i * 1.01});
  return s;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(SeriesCsv, OneRowPerPoint) {
  auto text = report::series_csv(series(3));
  EXPECT_EQ(text.substr(0, text.find('\n')), "date,actual_kwh,predicted_kwh");
  EXPECT_EQ(count(text, "\n"), 4u);
  EXPECT_NE(text.find("2013-03-01,600,598.5\n"), std::string::npos);
}

TEST(TrialLogCsv, HeaderAndDivergedRows) {
  std::vector<eval::TrialRecord> trials{{{2, 1, 1}, 0.25, 77, 1, 1}, {{1, 1, 1}, INFINITY, 5, 2, 0}};
  EXPECT_EQ(report::trial_log_csv(trials), "h1,h2,h3,val_mse,seed,rank\n2,1,1,0.25,77,1\n1,1,1,inf,5,2\n");
}

TEST(LossAndPredictionsCsv, Layout) {
  std::vector<double> loss{0.5, 0.25};
  EXPECT_EQ(report::loss_history_csv(loss), "epoch,train_mse\n1,0.5\n2,0.25\n");
  std::vector<Date> dates{day(0), day(1)};
  std::vector<double> predictions{1.5, 2};
  EXPECT_EQ(report::predictions_csv(dates, predictions), "date,predicted_kwh\n2013-03-01,1.5\n2013-03-02,2\n");
}

TEST(CorrelationTable, PrintsFourDecimalsOrNa) {
  std::vector<features::Correlation> c{{"RDD", 0.82912}, {"ORD", std::nullopt}};
  auto text = report::correlation_table_text(c);
  EXPECT_NE(text.find("RDD      0.8291"), std::string::npos);
  EXPECT_NE(text.find("ORD      n/a"), std::string::npos);
}

TEST(ReportJson, LabelsSplitsAndNullCorrelations) {
  eval::EvalReport r;
  r.hotel_id = "H1";
  r.hidden_sizes = {230, 41, 13};
  r.fit_rmse = 59.56;
  r.forecast_mape = 2.83;
  r.correlations = {{"RDD", 0.829}, {"ORD", std::nullopt}};
  r.features = {{"RDD", "ORD"}, 24.0, true};
  r.train_start = day(0);
  r.train_end = day(9);
  r.test_start = day(10);
  r.test_end = day(11);
  auto doc = nlohmann::json::parse(report::report_json(r));
  EXPECT_EQ(doc["fit_rmse_kwh"]["split"], "train");
  EXPECT_EQ(doc["forecast_mape_percent"]["split"], "test");
  EXPECT_EQ(doc["forecast_mape_percent"]["value"], 2.83);
  EXPECT_TRUE(doc["correlations_vs_energy"][1]["pearson_r"].is_null());
  EXPECT_EQ(doc["reference_temperature"], 24.0);
  EXPECT_EQ(doc["test_period"]["start"], "2013-03-11");
  EXPECT_EQ(doc["hidden_sizes"], (std::vector<int>{230, 41, 13}));
}

TEST(SeriesSvg, DeterministicWithTwoLines) {
  auto s = series(30);
  auto a = report::series_svg(s, "H1 <test>");
  EXPECT_EQ(a, report::series_svg(s, "H1 <test>"));
  EXPECT_EQ(a.rfind("<?xml", 0), 0u);
  EXPECT_EQ(count(a, "<polyline"), 2u);
  EXPECT_NE(a.find("H1 &lt;test&gt;"), std::string::npos);
  EXPECT_NE(a.find("2013-03-01"), std::string::npos);
  EXPECT_NE(a.find("2013-03-30"), std::string::npos);
  EXPECT_NE(a.find("actual"), std::string::npos);
  EXPECT_NE(a.find("predicted"), std::string::npos);
  EXPECT_EQ(a.substr(a.size() - 7), "</svg>\n");
}

TEST(SeriesSvg, HandlesDegenerateSeries) {
  EXPECT_EQ(count(report::series_svg({}, "empty"), "<polyline"), 2u);
  std::vector<eval::SeriesPoint> flat{{day(0), 5, 5}};
  auto svg = report::series_svg(flat, "flat");
  for (auto pos = svg.find("dominant"); pos != std::string::npos; pos = svg.find("dominant")) svg.erase(pos, 8);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(svg.find("inf"), std::string::npos);
}
