#include "hotelwatt/dataset.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "hotelwatt/error.hpp"
#include "hotelwatt/features.hpp"

using namespace hotelwatt;
using namespace hotelwatt::dataset;
using std::chrono::year;

namespace {

Date day(int y, unsigned m, unsigned d) {
  return Date{year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::Argument;
}

Dataset make_dataset(int days) {
  std::vector<DailyRecord> records;
  for (int i = 0; i < days; ++i) {
    DailyRecord r;
    r.date = add_days(day(2012, 1, 1), i);
    r.energy_kwh = 100.0 + i;
    r.occupancy_rate = 0.5;
    r.temp_mean = 25.0;
    r.temp_max = 30.0;
    r.temp_min = 20.0;
    records.push_back(r);
  }
  return Dataset("h", std::move(records));
}

}  // namespace

TEST(Date, ParsesStrictIsoDates) {
  EXPECT_EQ(parse_iso_date("2011-01-01"), day(2011, 1, 1));
  EXPECT_FALSE(parse_iso_date("2011-02-30"));
  EXPECT_FALSE(parse_iso_date("2011-1-01"));
  EXPECT_FALSE(parse_iso_date("01/01/2011"));
  EXPECT_EQ(format_iso_date(day(2011, 3, 9)), "2011-03-09");
  EXPECT_EQ(days_between(day(2011, 12, 31), day(2012, 3, 1)), 61);
}

TEST(ParseConsumption, SingleWellFormedRow) {
  auto records = parse_consumption_csv("date,energy_kwh,occupancy_rate\n2011-01-01,5000,0.5");
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].date, day(2011, 1, 1));
  EXPECT_EQ(records[0].energy_kwh, 5000.0);
  EXPECT_EQ(records[0].occupancy_rate, 0.5);
  EXPECT_FALSE(records[0].guests);
}

TEST(ParseConsumption, OccupancyOutOfRangeNamesRowAndColumn) {
  try {
    parse_consumption_csv("date,energy_kwh,occupancy_rate\n2011-01-01,5000,1.5");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 1u);
    EXPECT_EQ(e.column(), "occupancy_rate");
  }
}

TEST(ParseConsumption, DuplicateDatesRejected) {
  try {
    parse_consumption_csv("date,energy_kwh,occupancy_rate\n2011-01-01,5000,0.5\n2011-01-01,5100,0.6\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), "date");
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(ParseConsumption, RejectsBadFieldsAndSortsRows) {
  const std::string header = "date,energy_kwh,occupancy_rate,guests\n";
  EXPECT_THROW(parse_consumption_csv(header + "2011-13-01,5000,0.5,\n"), ParseError);
  EXPECT_THROW(parse_consumption_csv(header + "2011-01-01,abc,0.5,\n"), ParseError);
  EXPECT_THROW(parse_consumption_csv(header + "2011-01-01,0,0.5,\n"), ParseError);
  EXPECT_THROW(parse_consumption_csv(header + "2011-01-01,10,0.5,-3\n"), ParseError);
  EXPECT_THROW(parse_consumption_csv("date,energy_kwh\n2011-01-01,10\n"), ParseError);

  auto records = parse_consumption_csv(header + "2011-01-03,3,0.1,\r\n2011-01-01,1,0.2,40\r\n");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].date, day(2011, 1, 1));
  EXPECT_EQ(records[0].guests, 40.0);
  EXPECT_FALSE(records[1].guests);
}

TEST(ParseWeather, WellFormedRowWithHumidity) {
  auto records = parse_weather_csv("date,temp_mean,temp_max,temp_min,humidity\n2011-01-01,28,32,24,70\n");
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].temp_mean, 28.0);
  EXPECT_EQ(records[0].humidity, 70.0);
}

TEST(ParseWeather, InvertedTemperaturesAreAConsistencyError) {
  EXPECT_EQ(kind_of([] { parse_weather_csv("date,temp_mean,temp_max,temp_min\n2011-01-01,32,32,33\n"); }),
            ErrorKind::Consistency);
}

TEST(ParseWeather, HumidityColumnIsOptional) {
  auto records = parse_weather_csv("date,temp_mean,temp_max,temp_min\n2011-01-01,28,32,24\n");
  ASSERT_EQ(records.size(), 1u);
  EXPECT_FALSE(records[0].humidity);
}

TEST(ParseWeather, UnknownColumnsBecomeExtras) {
  auto records = parse_weather_csv(
      "date,temp_mean,temp_max,temp_min,windspeed,precip\n2011-01-01,28,32,24,12.5,\n");
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].extras.at("windspeed"), 12.5);
  EXPECT_FALSE(records[0].extras.contains("precip"));
  EXPECT_THROW(parse_weather_csv("date,temp_mean,temp_max,temp_min,windspeed\n2011-01-01,28,32,24,x\n"),
               ParseError);
}

TEST(CsvRoundTrip, ParseAfterWriteIsIdentityOnRandomRecords) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<ConsumptionRecord> consumption;
    std::vector<WeatherRecord> weather;
    int n = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      auto date = add_days(day(2011, 1, 1), i * 3 + static_cast<int>(rng() % 3));
      std::optional<double> guests;
      if (u(rng) < 0.5) guests = std::floor(u(rng) * 300);
      consumption.push_back({date, 1.0 + u(rng) * 9000.0, u(rng), guests});
      double lo = 10 + 20 * u(rng), hi = lo + 10 * u(rng);
      WeatherRecord w{date, lo + (hi - lo) * u(rng), hi, lo, std::nullopt, {}};
      if (u(rng) < 0.7) w.humidity = 100.0 * u(rng);
      if (u(rng) < 0.5) w.extras["windspeed"] = 30 * u(rng);
      if (u(rng) < 0.5) w.extras["precip"] = 5 * u(rng);
      weather.push_back(w);
    }
    EXPECT_EQ(parse_consumption_csv(write_consumption_csv(consumption)), consumption);
    EXPECT_EQ(parse_weather_csv(write_weather_csv(weather)), weather);
  }
}

TEST(Join, FullOverlap) {
  std::vector<ConsumptionRecord> c;
  std::vector<WeatherRecord> w;
  for (int i = 0; i < 3; ++i) {
    c.push_back({add_days(day(2011, 1, 1), i), 100.0, 0.5, std::nullopt});
    w.push_back({add_days(day(2011, 1, 1), i), 25, 30, 20, std::nullopt, {}});
  }
  auto joined = join_on_date(c, w);
  EXPECT_EQ(joined.dataset.size(), 3u);
  EXPECT_EQ(joined.dropped_consumption, 0u);
  EXPECT_EQ(joined.dropped_weather, 0u);
}

TEST(Join, PartialOverlapReportsDrops) {
  std::vector<ConsumptionRecord> c;
  std::vector<WeatherRecord> w;
  for (int i : {1, 2, 3}) c.push_back({day(2011, 1, static_cast<unsigned>(i)), 100.0, 0.5, std::nullopt});
  for (int i : {2, 3, 4}) w.push_back({day(2011, 1, static_cast<unsigned>(i)), 25, 30, 20, std::nullopt, {}});
  auto joined = join_on_date(c, w);
  EXPECT_EQ(joined.dataset.size(), 2u);
  EXPECT_EQ(joined.dropped_consumption, 1u);
  EXPECT_EQ(joined.dropped_weather, 1u);
  EXPECT_EQ(joined.dataset.first_date(), day(2011, 1, 2));
}

TEST(Join, EmptyIntersectionIsAnError) {
  std::vector<ConsumptionRecord> c{{day(2011, 1, 1), 100.0, 0.5, std::nullopt}};
  std::vector<WeatherRecord> w{{day(2011, 1, 2), 25, 30, 20, std::nullopt, {}}};
  EXPECT_EQ(kind_of([&] { join_on_date(c, w); }), ErrorKind::Join);
  EXPECT_EQ(kind_of([&] { join_on_date(c, {}); }), ErrorKind::Join);
}

TEST(Join, OutputDatesEqualBruteForceIntersection) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::set<int> a, b;
    for (int i = 0; i < 15; ++i) {
      if (rng() % 2) a.insert(i);
      if (rng() % 2) b.insert(i);
    }
    a.insert(7);
    b.insert(7);
    std::vector<ConsumptionRecord> c;
    std::vector<WeatherRecord> w;
    for (int i : a) c.push_back({add_days(day(2011, 1, 1), i), 1.0 + i, 0.5, std::nullopt});
    for (int i : b) w.push_back({add_days(day(2011, 1, 1), i), 25, 30, 20, std::nullopt, {}});
    std::vector<Date> expected;
    for (int i : a) {
      if (b.contains(i)) expected.push_back(add_days(day(2011, 1, 1), i));
    }
    auto joined = join_on_date(c, w);
    std::vector<Date> got;
    for (const auto& r : joined.dataset) got.push_back(r.date);
    EXPECT_EQ(got, expected);
    EXPECT_EQ(joined.dropped_consumption, a.size() - expected.size());
    EXPECT_EQ(joined.dropped_weather, b.size() - expected.size());
  }
}

TEST(Dataset, RejectsEmptyAndUnorderedRecords) {
  EXPECT_EQ(kind_of([] { Dataset("h", {}); }), ErrorKind::Data);
  auto data = make_dataset(2);
  std::vector<DailyRecord> swapped{data[1], data[0]};
  EXPECT_EQ(kind_of([&] { Dataset("h", swapped); }), ErrorKind::Data);
}

TEST(ChronologicalSplit, NinetyTen) {
  auto split = chronological_split(make_dataset(100), 0.9);
  EXPECT_EQ(split.train.size(), 90u);
  EXPECT_EQ(split.test.size(), 10u);
  auto small = chronological_split(make_dataset(10), 0.9);
  EXPECT_EQ(small.train.size(), 9u);
  EXPECT_EQ(small.test.size(), 1u);
}

TEST(ChronologicalSplit, GuardsDegenerateFractions) {
  EXPECT_EQ(kind_of([] { chronological_split(make_dataset(2), 0.4); }), ErrorKind::Argument);
  EXPECT_EQ(kind_of([] { chronological_split(make_dataset(10), 1.0); }), ErrorKind::Argument);
  EXPECT_EQ(kind_of([] { chronological_split(make_dataset(10), 0.0); }), ErrorKind::Argument);
}

TEST(ChronologicalSplit, ConcatenationRestoresDatasetExactly) {
  for (int n : {2, 3, 17, 100, 365}) {
    auto data = make_dataset(n);
    for (double f : {0.1, 0.29, 0.5, 0.9, 0.99}) {
      Split split = [&] {
        try {
          return chronological_split(data, f);
        } catch (const Error&) {
          return Split{data, data};
        }
      }();
      if (split.train.size() == data.size()) continue;  // degenerate partition, rejected
      std::vector<DailyRecord> joined(split.train.begin(), split.train.end());
      joined.insert(joined.end(), split.test.begin(), split.test.end());
      EXPECT_EQ(Dataset("h", joined), data);
      EXPECT_LT(std::chrono::sys_days{split.train.last_date()}, std::chrono::sys_days{split.test.first_date()});
    }
  }
  EXPECT_EQ(chronological_split(make_dataset(100), 0.29).train.size(), 29u);
}

TEST(Synthetic, ZeroNoiseIsExactlyTheGenerator) {
  SyntheticParams p;
  p.noise_sd = 0.0;
  auto data = generate_synthetic(365, p, 7);
  ASSERT_EQ(data.size(), 365u);
  for (const auto& r : data) {
    double cdd = std::max(r.temp_mean - 24.0, 0.0);
    double rdd = cdd * r.occupancy_rate;
    EXPECT_EQ(r.energy_kwh, 500.0 + 12.0 * rdd + 3.0 * r.temp_mean);
    EXPECT_GE(r.temp_mean, p.temp_low - 1e-12);
    EXPECT_LE(r.temp_mean, p.temp_high + 1e-12);
    EXPECT_GE(r.occupancy_rate, p.ord_low);
    EXPECT_LE(r.occupancy_rate, p.ord_high);
  }
}

TEST(Synthetic, SameSeedIsBitIdentical) {
  SyntheticParams p;
  EXPECT_EQ(generate_synthetic(200, p, 3), generate_synthetic(200, p, 3));
  EXPECT_NE(generate_synthetic(200, p, 3), generate_synthetic(200, p, 4));
}

TEST(Synthetic, Guards) {
  SyntheticParams p;
  EXPECT_EQ(kind_of([&] { generate_synthetic(10, p, 1); }), ErrorKind::Argument);
  p.intercept = -1000.0;
  EXPECT_EQ(kind_of([&] { generate_synthetic(60, p, 1); }), ErrorKind::Generation);
}
