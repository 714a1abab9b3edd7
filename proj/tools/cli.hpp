#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace forkvol::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInternalError = 1,
  kInputError = 2,
  kEstimationFailure = 3,
  kPartialReport = 4,
  kUsageError = 64,
};

/// Everything a subcommand may need. Empty strings mean "not given".
struct RunConfig {
  std::string asset;
  std::string index;
  std::string asset_returns;
  std::string index_returns;
  std::string events;
  std::string returns_method = "log";
  std::string start;
  std::string end;
  std::string dummy_location = "variance";
  std::string regressor = "dummy";
  std::optional<bool> include_index;
  bool hard_only = false;
  int window = 3;
  double nu = 5.0;
  bool estimate_nu = false;
  std::string policy = "next_day";
  std::string proxy = "sigma";
  std::string out;
  std::string format = "text";
  std::uint64_t seed = 1;
  int starts = 5;

  // simulate
  long long horizon = -1;
  double mu = 0.001;
  double omega = -0.15;
  double alpha = 0.05;
  double gamma = 0.2;
  double beta = 0.97;
  double delta_mean = 0.0;
  double delta_crix = 1.0;
  double delta_var = 0.2;
  int event_every = 0;

  // fetch
  std::string endpoint;
  std::string symbol;
  std::string cache;
  std::string output;
};

/// Parses `argv` and runs the chosen subcommand. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_descriptive(const RunConfig& cfg, std::ostream& out);
int cmd_fit(const RunConfig& cfg, std::ostream& out);
int cmd_events(const RunConfig& cfg, std::ostream& out);
int cmd_welch(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_fetch(const RunConfig& cfg, std::ostream& out);

}  // namespace forkvol::cli
