#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <ostream>

#include "forkvol/errors.hpp"

namespace forkvol::cli {

namespace {

void add_data_options(CLI::App& app, RunConfig& c) {
  app.add_option("--asset", c.asset, "asset price CSV (date,close)");
  app.add_option("--index", c.index, "market index price CSV (date,close)");
  app.add_option("--asset-returns", c.asset_returns, "asset returns CSV (date,return)");
  app.add_option("--index-returns", c.index_returns, "index returns CSV (date,return)");
  app.add_option("--events", c.events, "event CSV (date,name,ticker,kind)");
  app.add_option("--returns", c.returns_method, "return definition")
      ->check(CLI::IsMember({"log", "simple"}));
  app.add_option("--start", c.start, "first date (YYYY-MM-DD)");
  app.add_option("--end", c.end, "last date (YYYY-MM-DD)");
  app.add_option("--dummy-location", c.dummy_location, "where the event regressor enters")
      ->check(CLI::IsMember({"none", "mean", "variance"}));
  app.add_option("--regressor", c.regressor, "event regressor: indicator or daily count")
      ->check(CLI::IsMember({"dummy", "count"}));
  app.add_flag_callback("--with-index", [&c] { c.include_index = true; }, "include the index in the mean");
  app.add_flag_callback("--no-index", [&c] { c.include_index = false; }, "exclude the index");
  app.add_flag("--hard-only", c.hard_only, "keep hard forks only");
  app.add_option("--window", c.window, "cluster look-ahead window in days")->check(CLI::PositiveNumber);
  app.add_option("--nu", c.nu, "Student-t degrees of freedom (fixed)");
  app.add_flag("--estimate-nu", c.estimate_nu, "estimate nu instead of fixing it");
  app.add_option("--policy", c.policy, "events on missing dates")
      ->check(CLI::IsMember({"drop", "next_day"}));
  app.add_option("--proxy", c.proxy, "volatility proxy for the Welch suites")
      ->check(CLI::IsMember({"sigma", "absret"}));
  app.add_option("--out", c.out, "output directory");
  app.add_option("--format", c.format, "stdout format")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--starts", c.starts, "optimizer starts")->check(CLI::PositiveNumber);

  app.add_option("--horizon,-T", c.horizon, "simulated days");
  app.add_option("--mu", c.mu);
  app.add_option("--omega", c.omega);
  app.add_option("--alpha", c.alpha);
  app.add_option("--gamma", c.gamma);
  app.add_option("--beta", c.beta);
  app.add_option("--delta-mean", c.delta_mean);
  app.add_option("--delta-crix", c.delta_crix);
  app.add_option("--delta-var", c.delta_var);
  app.add_option("--event-every", c.event_every, "synthetic event every N days");

  app.add_option("--endpoint", c.endpoint, "URL template with {symbol} {start} {end}");
  app.add_option("--symbol", c.symbol);
  app.add_option("--cache", c.cache, "cache directory");
  app.add_option("--output", c.output, "output CSV path");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Fork-event EGARCH(1,1)-t analysis"};
  app.set_config("--config", "", "flat key=value config file; flags override");
  app.require_subcommand(1);
  add_data_options(app, cfg);

  auto* descriptive = app.add_subcommand("descriptive", "descriptive statistics of daily returns");
  auto* fit = app.add_subcommand("fit", "estimate one EGARCH specification");
  auto* events = app.add_subcommand("events", "event regressors and clusters");
  auto* welch = app.add_subcommand("welch", "same-day and delayed-effect Welch tests");
  auto* simulate = app.add_subcommand("simulate", "simulate returns from given parameters");
  auto* report = app.add_subcommand("report", "full reproduction bundle with manifest");
  auto* fetch = app.add_subcommand("fetch", "download prices from an HTTP endpoint");
  for (auto* sub : {descriptive, fit, events, welch, simulate, report, fetch}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (descriptive->parsed()) return cmd_descriptive(cfg, out);
    if (fit->parsed()) return cmd_fit(cfg, out);
    if (events->parsed()) return cmd_events(cfg, out);
    if (welch->parsed()) return cmd_welch(cfg, out);
    if (simulate->parsed()) return cmd_simulate(cfg, out);
    if (report->parsed()) return cmd_report(cfg, out, err);
    if (fetch->parsed()) return cmd_fetch(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const FetchError& e) {
    err << "error: " << e.what() << (e.retriable() ? " (retriable)" : "") << '\n';
    return kInputError;
  } catch (const EstimationError& e) {
    err << "estimation failed: " << e.what() << '\n';
    return kEstimationFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kUsageError;
}

}  // namespace forkvol::cli
