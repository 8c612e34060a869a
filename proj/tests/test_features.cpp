#include "hotelwatt/features.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hotelwatt/error.hpp"

using namespace hotelwatt;
using namespace hotelwatt::features;

namespace {

dataset::Dataset three_days() {
  std::vector<dataset::DailyRecord> records;
  const double temps[] = {30.0, 20.0, 27.5};
  const double ords[] = {0.5, 0.9, 0.8};
  for (int i = 0; i < 3; ++i) {
    dataset::DailyRecord r;
    r.date = add_days(Date{std::chrono::year{2011}, std::chrono::July, std::chrono::day{1}}, i);
    r.energy_kwh = 1000.0 + i;
    r.occupancy_rate = ords[i];
    r.temp_mean = temps[i];
    r.temp_max = temps[i] + 4;
    r.temp_min = temps[i] - 4;
    records.push_back(r);
  }
  return dataset::Dataset("h", records);
}

FeatureMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, bool constant_column) {
  std::uniform_real_distribution<double> u(-500.0, 500.0);
  FeatureMatrix m;
  for (std::size_t c = 0; c < cols; ++c) m.columns.push_back("c" + std::to_string(c));
  double constant = u(rng);
  for (std::size_t r = 0; r < rows; ++r) {
    m.dates.push_back(add_days(Date{std::chrono::year{2011}, std::chrono::January, std::chrono::day{1}},
                               static_cast<int>(r)));
    for (std::size_t c = 0; c < cols; ++c) m.values.push_back(constant_column && c == 0 ? constant : u(rng));
    m.target.push_back(u(rng));
  }
  return m;
}

}  // namespace

TEST(DegreeDays, CoolingDegreeDays) {
  EXPECT_EQ(cdd(30, 24, true), 6.0);
  EXPECT_EQ(cdd(20, 24, true), 0.0);
  EXPECT_EQ(cdd(20, 24, false), -4.0);
}

TEST(DegreeDays, RoomDegreeDays) {
  EXPECT_EQ(rdd(6, 0.5), 3.0);
  for (double x : {-4.0, 0.0, 7.25}) EXPECT_EQ(rdd(x, 0.0), 0.0);
  for (double y : {0.0, 0.3, 1.0}) EXPECT_EQ(rdd(0.0, y), 0.0);
  EXPECT_THROW(rdd(1.0, 1.2), Error);
  EXPECT_THROW(rdd(1.0, -0.1), Error);
}

TEST(DegreeDays, RddMonotoneInTemperatureWhenClipped) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> temp(0.0, 45.0), ord(0.01, 1.0);
  for (int i = 0; i < 500; ++i) {
    double a = temp(rng), b = temp(rng), o = ord(rng);
    if (a > b) std::swap(a, b);
    EXPECT_LE(rdd(cdd(a, 24, true), o), rdd(cdd(b, 24, true), o));
  }
}

TEST(FeatureSpec, Validation) {
  EXPECT_THROW((FeatureSpec{{}, 24, true}.validate()), Error);
  EXPECT_THROW((FeatureSpec{{"RDD", "RDD"}, 24, true}.validate()), Error);
  EXPECT_THROW((FeatureSpec{{"RDD"}, NAN, true}.validate()), Error);
  EXPECT_NO_THROW((FeatureSpec{{"RDD", "temp_mean"}, 24, true}.validate()));
  EXPECT_EQ(parse_feature_list(" RDD, temp_mean ,"), (std::vector<std::string>{"RDD", "temp_mean"}));
}

TEST(BuildFeatures, RddColumnMatchesHandComputation) {
  auto m = build_features(three_days(), FeatureSpec{{"RDD"}, 24.0, true});
  ASSERT_EQ(m.rows(), 3u);
  ASSERT_EQ(m.cols(), 1u);
  // (30-24)*0.5, clipped (20-24)->0, (27.5-24)*0.8
  EXPECT_DOUBLE_EQ(m.at(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(m.at(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(m.at(2, 0), 2.8);
  EXPECT_EQ(m.target, (std::vector<double>{1000.0, 1001.0, 1002.0}));
}

TEST(BuildFeatures, PassThroughColumnsAreVerbatim) {
  auto data = three_days();
  auto m = build_features(data, FeatureSpec{{"temp_mean", "ORD"}, 24.0, true});
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(m.at(r, 0), data[r].temp_mean);
    EXPECT_EQ(m.at(r, 1), data[r].occupancy_rate);
    EXPECT_EQ(m.dates[r], data[r].date);
  }
}

TEST(BuildFeatures, MissingFeatureNamesDateAndFeature) {
  try {
    build_features(three_days(), FeatureSpec{{"humidity"}, 24.0, true});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingFeature);
    std::string msg = e.what();
    EXPECT_NE(msg.find("humidity"), std::string::npos);
    EXPECT_NE(msg.find("2011-07-01"), std::string::npos);
  }
}

TEST(BuildFeatures, UnclippedCddKeepsNegativeValues) {
  auto m = build_features(three_days(), FeatureSpec{{"CDD"}, 24.0, false});
  EXPECT_EQ(m.at(1, 0), -4.0);
}

TEST(Normalization, FitExamples) {
  FeatureMatrix m;
  m.columns = {"a", "b"};
  m.dates.resize(3);
  m.values = {2, 5, 4, 5, 6, 5};
  m.target = {1, 2, 3};
  auto p = fit_normalization(m);
  EXPECT_EQ(p.features[0], (ColumnRange{2, 6}));
  EXPECT_EQ(p.features[1], (ColumnRange{5, 5}));
  EXPECT_EQ(p.target, (ColumnRange{1, 3}));

  m.values[0] = NAN;
  EXPECT_THROW(fit_normalization(m), Error);
}

TEST(Normalization, ApplyInvertAndAffineExtension) {
  ColumnRange r{2, 6};
  std::vector<double> x{2, 4, 6};
  EXPECT_EQ(normalize_values(x, r), (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(invert_values(std::vector<double>{0, 0.5, 1}, r), x);
  EXPECT_EQ(r.normalize(8), 1.5);
  ColumnRange constant{5, 5};
  EXPECT_EQ(constant.normalize(5), 0.0);
  EXPECT_EQ(constant.normalize(7), 0.0);
  EXPECT_EQ(constant.denormalize(0.0), 5.0);
}

TEST(Normalization, ColumnCountMismatchIsShapeError) {
  std::mt19937_64 rng(1);
  auto m = random_matrix(rng, 5, 3, false);
  auto p = fit_normalization(m);
  auto narrow = random_matrix(rng, 5, 2, false);
  try {
    apply_normalization(narrow, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Shape);
  }
}

TEST(Normalization, RoundTripAndTrainingRangeProperties) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    auto m = random_matrix(rng, 2 + rng() % 30, 1 + rng() % 5, trial % 3 == 0);
    auto p = fit_normalization(m);
    auto n = apply_normalization(m, p);
    for (double v : n.values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    auto back = invert_normalization(n, p);
    for (std::size_t i = 0; i < m.values.size(); ++i) EXPECT_NEAR(back.values[i], m.values[i], 1e-12);
    for (std::size_t i = 0; i < m.rows(); ++i) EXPECT_NEAR(back.target[i], m.target[i], 1e-12);

    // invert then apply on arbitrary normalized values, non-constant columns
    auto again = apply_normalization(invert_normalization(n, p), p);
    for (std::size_t r = 0; r < n.rows(); ++r) {
      for (std::size_t c = 0; c < n.cols(); ++c) {
        if (p.features[c].min != p.features[c].max) EXPECT_NEAR(again.at(r, c), n.at(r, c), 1e-12);
      }
    }
  }
}

TEST(Pearson, Examples) {
  std::vector<double> x{1, 2, 3, 4, 5.5};
  std::vector<double> y, neg;
  for (double v : x) {
    y.push_back(2 * v + 1);
    neg.push_back(-v);
  }
  EXPECT_NEAR(pearson(x, y), 1.0, 1e-12);
  EXPECT_NEAR(pearson(x, neg), -1.0, 1e-12);
}

TEST(Pearson, ConstantSeriesIsUndefined) {
  std::vector<double> c{3, 3, 3}, v{1, 2, 3};
  for (auto [a, b] : {std::pair{c, c}, std::pair{c, v}, std::pair{v, c}}) {
    try {
      pearson(a, b);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::UndefinedCorrelation);
    }
  }
  EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{2}), Error);
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{2}), Error);
}

TEST(Pearson, AffineInvariance) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> scale(0.1, 10), shift(-100, 100);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(20), y(20);
    for (int i = 0; i < 20; ++i) {
      x[i] = g(rng);
      y[i] = 0.5 * x[i] + g(rng);
    }
    double r = pearson(x, y);
    double a = scale(rng), b = shift(rng);
    std::vector<double> pos(20), neg(20);
    for (int i = 0; i < 20; ++i) {
      pos[i] = a * x[i] + b;
      neg[i] = -a * x[i] + b;
    }
    EXPECT_NEAR(pearson(pos, y), r, 1e-12);
    EXPECT_NEAR(pearson(neg, y), -r, 1e-12);
    EXPECT_NEAR(pearson(x, pos), 1.0, 1e-12);
    EXPECT_LE(std::abs(r), 1.0);
  }
}

TEST(CorrelationTable, ConstantColumnIsReportedUndefined) {
  auto data = three_days();
  auto m = build_features(data, FeatureSpec{{"temp_mean", "ORD"}, 24, true});
  for (std::size_t r = 0; r < 3; ++r) m.values[r * 2 + 1] = 0.7;
  auto table = correlation_table(m);
  ASSERT_EQ(table.size(), 2u);
  EXPECT_TRUE(table[0].r);
  EXPECT_FALSE(table[1].r);
}

TEST(FeatureCsv, HeaderAndRows) {
  auto m = build_features(three_days(), FeatureSpec{{"RDD", "temp_mean"}, 24, true});
  auto text = write_feature_csv(m);
  EXPECT_EQ(text.substr(0, text.find('\n')), "date,RDD,temp_mean,energy_kwh");
  EXPECT_NE(text.find("2011-07-01,3,30,1000\n"), std::string::npos);
}
