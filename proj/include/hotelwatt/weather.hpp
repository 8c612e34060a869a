#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hotelwatt/dataset.hpp"

namespace hotelwatt::weather {

inline constexpr const char* kApiKeyEnv = "HOTELWATT_WEATHER_KEY";
inline constexpr const char* kDefaultBaseUrl =
    "https://weather.visualcrossing.com/VisualCrossingWebServices/rest/services/timeline";

struct WeatherQuery {
  std::string location;  // place name or "lat,lon"
  Date start_date;
  Date end_date;
  std::string units = "metric";

  void validate() const;
};

/// JSON field names of the provider's daily payload.
struct FieldMap {
  std::string days = "days";
  std::string date = "datetime";
  std::string temp_mean = "temp";
  std::string temp_max = "tempmax";
  std::string temp_min = "tempmin";
  std::string humidity = "humidity";
  /// Provider field -> extras name.
  std::map<std::string, std::string> extras{{"windspeed", "windspeed"}, {"precip", "precip"}};
};

struct ProviderConfig {
  std::string base_url = kDefaultBaseUrl;
  std::string api_key;
  double timeout_seconds = 30.0;
  std::filesystem::path cache_dir = ".hotelwatt-cache";
  FieldMap fields;

  void validate() const;
};

/// Value of the API key environment variable, if set and nonempty.
std::optional<std::string> api_key_from_env();

/// Hex hash of (location, start, end, units).
std::string cache_key(const WeatherQuery& query);

std::filesystem::path cache_path(const WeatherQuery& query, const ProviderConfig& config);

/// Decodes a provider payload into one record per requested day.  Days
/// outside the query window are ignored; gaps raise IncompleteData.
std::vector<dataset::WeatherRecord> decode_payload(const std::string& body,
                                                   const WeatherQuery& query,
                                                   const FieldMap& fields);

/// Serves a warm cache without touching the network.  Otherwise issues
/// GET {base_url}/{location}/{start}/{end}?unitGroup=metric&key=..&include=days,
/// stores the result in the cache and returns it.
std::vector<dataset::WeatherRecord> fetch_remote(const WeatherQuery& query,
                                                 const ProviderConfig& config);

/// Reads a weather CSV from disk.
std::vector<dataset::WeatherRecord> fetch_file(const std::filesystem::path& path);

}  // namespace hotelwatt::weather
