#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "forkvol/egarch.hpp"
#include "forkvol/events.hpp"

namespace testing {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 gen(std::random_device{}());
    path_ = fs::temp_directory_path() / ("forkvol_" + tag + "_" + std::to_string(gen()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

inline forkvol::Date day(const char* iso) { return forkvol::Date::parse(iso); }

inline forkvol::ParameterSet reference_params(const forkvol::ModelSpec& spec) {
  auto p = forkvol::ParameterSet::for_spec(spec);
  p.mu = 0.001;
  p.omega = -0.15;
  p.alpha = 0.05;
  p.gamma = 0.2;
  p.beta = 0.97;
  if (p.delta_fork_variance) p.delta_fork_variance = 0.2;
  if (p.delta_fork_mean) p.delta_fork_mean = 0.0;
  if (p.delta_crix) p.delta_crix = 0.8;
  return p;
}

// Consecutive dates from 2015-01-01 with an event every `every` days.
inline forkvol::EventRegressors periodic_events(std::size_t n, std::size_t every) {
  std::vector<forkvol::Date> dates;
  forkvol::EventCalendar cal;
  const auto start = forkvol::Date::from_ymd(2015, 1, 1);
  for (std::size_t t = 0; t < n; ++t) {
    dates.push_back(start.plus_days(static_cast<int>(t)));
    if (every > 0 && (t + 1) % every == 0) cal.push_back({dates.back(), "e", "E", forkvol::ForkKind::hard});
  }
  return forkvol::build_regressors(cal, dates);
}

}  // namespace testing
