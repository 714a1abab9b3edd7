#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "forkvol/date.hpp"
#include "forkvol/ingestion.hpp"

namespace forkvol {

struct DateRange {
  Date first;
  Date last;
};

/// Downloads daily closes from an HTTP endpoint returning a JSON array of
/// `{"date": "YYYY-MM-DD", "close": <number>}` and caches them as price CSVs.
///
/// The endpoint is a URL template; `{symbol}`, `{start}` and `{end}` are
/// substituted before the request. Cache entries are keyed by
/// (endpoint, symbol, range) and never expire. Concurrent calls for the same
/// (endpoint, symbol) are serialized so at most one request is in flight.
class PriceFetcher {
 public:
  explicit PriceFetcher(std::filesystem::path cache_dir);

  PriceSeries fetch(const std::string& endpoint, const std::string& symbol, DateRange range);

  std::filesystem::path cache_path(const std::string& endpoint, const std::string& symbol,
                                   DateRange range) const;

  /// Number of HTTP requests issued by this instance.
  std::size_t network_calls() const { return network_calls_.load(); }

  void set_timeout_seconds(int seconds) { timeout_seconds_ = seconds; }

 private:
  std::mutex& key_mutex(const std::string& key);

  std::filesystem::path cache_dir_;
  std::mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> in_flight_;
  std::atomic<std::size_t> network_calls_{0};
  int timeout_seconds_ = 30;
};

/// Parses the endpoint's JSON body. Throws FetchError (permanent) naming the
/// offending field on schema mismatch.
PriceSeries parse_price_json(const std::string& body);

std::string expand_url_template(std::string url, const std::string& symbol, DateRange range);

}  // namespace forkvol
