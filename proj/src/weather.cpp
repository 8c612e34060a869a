#include "hotelwatt/weather.hpp"

#include <cstdio>
#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hotelwatt/error.hpp"
#include "hotelwatt/io.hpp"

namespace hotelwatt::weather {

namespace {

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == ',') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

struct Endpoint {
  std::string origin;       // scheme://host[:port]
  std::string path_prefix;  // without trailing slash
};

Endpoint split_base_url(const std::string& base_url) {
  auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::Argument, "weather base URL must start with http:// or https://: " + base_url);
  }
  auto path_start = base_url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = base_url.substr(0, path_start);
  if (path_start != std::string::npos) e.path_prefix = base_url.substr(path_start);
  while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
  return e;
}

std::optional<double> number_field(const nlohmann::json& day, const std::string& name) {
  auto it = day.find(name);
  if (it == day.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

void WeatherQuery::validate() const {
  if (location.empty()) throw Error(ErrorKind::Argument, "weather location must not be empty");
  if (!start_date.ok() || !end_date.ok()) throw Error(ErrorKind::Argument, "weather query dates are invalid");
  if (days_between(start_date, end_date) < 0) {
    throw Error(ErrorKind::Argument, "end date " + format_iso_date(end_date) + " precedes start date " +
                                         format_iso_date(start_date));
  }
}

void ProviderConfig::validate() const {
  if (!(timeout_seconds > 0.0)) throw Error(ErrorKind::Argument, "provider timeout must be > 0 seconds");
  split_base_url(base_url);
}

std::optional<std::string> api_key_from_env() {
  const char* value = std::getenv(kApiKeyEnv);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

std::string cache_key(const WeatherQuery& query) {
  // FNV-1a, 64 bit: stable across platforms and runs.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0x1f;
    h *= 0x100000001b3ULL;
  };
  mix(query.location);
  mix(format_iso_date(query.start_date));
  mix(format_iso_date(query.end_date));
  mix(query.units);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path cache_path(const WeatherQuery& query, const ProviderConfig& config) {
  return config.cache_dir / (cache_key(query) + ".csv");
}

std::vector<dataset::WeatherRecord> decode_payload(const std::string& body, const WeatherQuery& query,
                                                   const FieldMap& fields) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(0, std::string("provider payload is not valid JSON: ") + e.what());
  }
  auto days = doc.find(fields.days);
  if (days == doc.end() || !days->is_array()) {
    throw ProviderError(0, "provider payload has no '" + fields.days + "' array");
  }

  const auto first = std::chrono::sys_days{query.start_date};
  const auto span = days_between(query.start_date, query.end_date) + 1;
  std::vector<std::optional<dataset::WeatherRecord>> by_offset(static_cast<std::size_t>(span));
  for (const auto& day : *days) {
    auto date_it = day.find(fields.date);
    if (date_it == day.end() || !date_it->is_string()) continue;
    auto date = parse_iso_date(date_it->get<std::string>());
    if (!date) throw ProviderError(0, "provider returned malformed date " + date_it->dump());
    auto offset = (std::chrono::sys_days{*date} - first).count();
    if (offset < 0 || offset >= span) continue;

    auto mean = number_field(day, fields.temp_mean);
    auto max = number_field(day, fields.temp_max);
    auto min = number_field(day, fields.temp_min);
    if (!mean || !max || !min) continue;  // reported as a gap below
    dataset::WeatherRecord rec{*date, *mean, *max, *min, number_field(day, fields.humidity), {}};
    for (const auto& [provider_name, extra_name] : fields.extras) {
      if (auto v = number_field(day, provider_name)) rec.extras.emplace(extra_name, *v);
    }
    auto& slot = by_offset[static_cast<std::size_t>(offset)];
    if (slot) throw ProviderError(0, "provider returned " + format_iso_date(*date) + " twice");
    slot = std::move(rec);
  }

  std::vector<dataset::WeatherRecord> records;
  std::string missing;
  std::size_t gaps = 0;
  for (int i = 0; i < span; ++i) {
    auto& slot = by_offset[static_cast<std::size_t>(i)];
    if (slot) {
      records.push_back(std::move(*slot));
    } else {
      if (gaps++) missing += ", ";
      missing += format_iso_date(add_days(query.start_date, i));
    }
  }
  if (gaps) {
    throw Error(ErrorKind::IncompleteData, "provider response is missing " + std::to_string(gaps) +
                                               " day(s): " + missing);
  }
  return records;
}

std::vector<dataset::WeatherRecord> fetch_remote(const WeatherQuery& query, const ProviderConfig& config) {
  query.validate();
  config.validate();
  auto cached = cache_path(query, config);
  if (std::filesystem::exists(cached)) return fetch_file(cached);

  if (config.api_key.empty()) {
    throw ProviderError(0, std::string("no weather API key: set ") + kApiKeyEnv + " or warm the cache");
  }

  auto endpoint = split_base_url(config.base_url);
  auto path = endpoint.path_prefix + "/" + percent_encode(query.location) + "/" +
              format_iso_date(query.start_date) + "/" + format_iso_date(query.end_date) +
              "?unitGroup=" + percent_encode(query.units) + "&key=" + percent_encode(config.api_key) +
              "&include=days";

  httplib::Client client(endpoint.origin);
  auto secs = static_cast<time_t>(config.timeout_seconds);
  auto usecs = static_cast<time_t>((config.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_follow_location(true);

  auto response = client.Get(path, httplib::Headers{{"Accept", "application/json"}});
  if (!response) {
    throw Error(ErrorKind::Transport, "weather request to " + endpoint.origin + " failed: " +
                                          httplib::to_string(response.error()));
  }
  if (response->status < 200 || response->status >= 300) {
    auto snippet = response->body.substr(0, 200);
    throw ProviderError(response->status, "weather provider returned HTTP " +
                                              std::to_string(response->status) + ": " + snippet);
  }

  auto records = decode_payload(response->body, query, config.fields);
  // Fresh and cached results both come out of the CSV parser.
  auto text = dataset::write_weather_csv(records);
  auto validated = dataset::parse_weather_csv(text);
  io::write_file_atomic(cached, text);
  return validated;
}

std::vector<dataset::WeatherRecord> fetch_file(const std::filesystem::path& path) {
  return dataset::parse_weather_csv(io::read_file(path));
}

}  // namespace hotelwatt::weather
