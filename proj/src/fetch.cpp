#include "forkvol/fetch.hpp"

#include <httplib.h>

#include <algorithm>
#include <json.hpp>

#include "forkvol/checksum.hpp"
#include "forkvol/errors.hpp"

namespace forkvol {

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw FetchError("endpoint '" + url + "' has no scheme", false);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string expand_url_template(std::string url, const std::string& symbol, DateRange range) {
  replace_all(url, "{symbol}", symbol);
  replace_all(url, "{start}", range.first.iso());
  replace_all(url, "{end}", range.last.iso());
  return url;
}

PriceSeries parse_price_json(const std::string& body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw FetchError(std::string("response is not valid JSON: ") + e.what(), false);
  }
  if (!doc.is_array()) throw FetchError("response is not a JSON array", false);

  PriceSeries out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    const std::string where = "record " + std::to_string(i);
    if (!rec.is_object()) throw FetchError(where + " is not an object", false);
    if (!rec.contains("date")) throw FetchError("missing field 'date' in " + where, false);
    if (!rec.contains("close")) throw FetchError("missing field 'close' in " + where, false);
    if (!rec["date"].is_string()) throw FetchError("field 'date' in " + where + " is not a string", false);
    if (!rec["close"].is_number()) {
      throw FetchError("field 'close' in " + where + " is not a number", false);
    }
    const auto date = Date::try_parse(rec["date"].get<std::string>());
    if (!date) throw FetchError("field 'date' in " + where + " is not YYYY-MM-DD", false);
    out.push_back({*date, rec["close"].get<double>()});
  }
  std::sort(out.begin(), out.end(),
            [](const PricePoint& a, const PricePoint& b) { return a.date < b.date; });
  try {
    validate_prices(out, "endpoint");
  } catch (const InputError& e) {
    throw FetchError(e.what(), false);
  }
  return out;
}

PriceFetcher::PriceFetcher(std::filesystem::path cache_dir) : cache_dir_(std::move(cache_dir)) {}

std::filesystem::path PriceFetcher::cache_path(const std::string& endpoint,
                                               const std::string& symbol, DateRange range) const {
  const std::string key = endpoint + '\n' + symbol + '\n' + range.first.iso() + '\n' + range.last.iso();
  return cache_dir_ / ("prices_" + sha256_hex(key).substr(0, 24) + ".csv");
}

std::mutex& PriceFetcher::key_mutex(const std::string& key) {
  std::lock_guard lock(registry_mutex_);
  auto& slot = in_flight_[key];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

PriceSeries PriceFetcher::fetch(const std::string& endpoint, const std::string& symbol,
                                DateRange range) {
  if (range.last < range.first) throw UsageError("fetch: date range is not well ordered");
  std::lock_guard key_lock(key_mutex(endpoint + '\n' + symbol));

  const auto cached = cache_path(endpoint, symbol, range);
  if (std::filesystem::exists(cached)) return read_prices(cached, cached.string());

  const auto url = split_url(expand_url_template(endpoint, symbol, range));
  httplib::Client client(url.origin);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);
  ++network_calls_;
  const auto res = client.Get(url.target);
  if (!res) {
    throw FetchError("request to " + url.origin + url.target + " failed: " +
                         httplib::to_string(res.error()),
                     true);
  }
  if (res->status >= 500) {
    throw FetchError("server error " + std::to_string(res->status) + " from " + url.origin, true);
  }
  if (res->status != 200) {
    throw FetchError("HTTP " + std::to_string(res->status) + " from " + url.origin + url.target,
                     false);
  }

  PriceSeries series = clip(parse_price_json(res->body), range.first, range.last);
  std::filesystem::create_directories(cache_dir_);
  const auto tmp = cached.string() + ".tmp";
  write_prices(std::filesystem::path(tmp), series);
  std::filesystem::rename(tmp, cached);
  return series;
}

}  // namespace forkvol
