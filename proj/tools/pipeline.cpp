#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "cli.hpp"
#include "forkvol/checksum.hpp"
#include "forkvol/errors.hpp"
#include "forkvol/estimation.hpp"
#include "forkvol/events.hpp"
#include "forkvol/fetch.hpp"
#include "forkvol/grouptests.hpp"
#include "forkvol/ingestion.hpp"
#include "forkvol/serialize.hpp"
#include "forkvol/timeseries.hpp"

namespace forkvol::cli {

namespace fs = std::filesystem;

namespace {

struct Dataset {
  ReturnSeries asset;
  std::optional<ReturnSeries> index;
  EventCalendar calendar;  // as read, after the hard-fork filter
  PlacedEvents placed;     // calendar resolved onto the return dates
  EventRegressors regressors;
  std::vector<std::string> inputs;
};

std::optional<Date> optional_date(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return Date::parse(s);
}

void require_range(const RunConfig& c) {
  const auto first = optional_date(c.start);
  const auto last = optional_date(c.end);
  if (first && last && *last < *first) throw UsageError("--start is after --end");
}

ReturnSeries clip_returns(const ReturnSeries& r, const RunConfig& c) {
  const auto first = optional_date(c.start);
  const auto last = optional_date(c.end);
  ReturnSeries out;
  for (std::size_t t = 0; t < r.size(); ++t) {
    if (first && r.dates[t] < *first) continue;
    if (last && *last < r.dates[t]) continue;
    out.dates.push_back(r.dates[t]);
    out.values.push_back(r.values[t]);
  }
  return out;
}

// Keeps the dates present in both series.
void intersect(ReturnSeries& a, ReturnSeries& b) {
  ReturnSeries ka, kb;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a.dates[i] < b.dates[j]) {
      ++i;
    } else if (b.dates[j] < a.dates[i]) {
      ++j;
    } else {
      ka.dates.push_back(a.dates[i]);
      ka.values.push_back(a.values[i]);
      kb.dates.push_back(b.dates[j]);
      kb.values.push_back(b.values[j]);
      ++i;
      ++j;
    }
  }
  if (ka.empty()) throw InputError("asset and index returns share no dates");
  a = std::move(ka);
  b = std::move(kb);
}

bool has_index_input(const RunConfig& c) { return !c.index.empty() || !c.index_returns.empty(); }

Dataset load_dataset(const RunConfig& c, bool need_events) {
  require_range(c);
  Dataset d;
  const auto method = parse_return_method(c.returns_method);
  const auto first = optional_date(c.start);
  const auto last = optional_date(c.end);

  if (c.asset.empty() && c.asset_returns.empty()) throw UsageError("--asset or --asset-returns is required");
  if (!c.asset.empty() && !c.asset_returns.empty()) throw UsageError("give --asset or --asset-returns, not both");
  if (!c.index.empty() && !c.index_returns.empty()) throw UsageError("give --index or --index-returns, not both");

  if (!c.asset.empty() && (!c.index.empty() || c.index_returns.empty())) {
    const auto asset = clip(read_prices(c.asset), first, last);
    d.inputs.push_back(c.asset);
    std::optional<PriceSeries> index;
    if (!c.index.empty()) {
      index = clip(read_prices(c.index), first, last);
      d.inputs.push_back(c.index);
    }
    const Panel panel = index ? align(asset, std::span<const PricePoint>(*index)) : align(asset);
    d.asset = to_returns(panel.dates, panel.asset_close, method);
    if (panel.index_close) d.index = to_returns(panel.dates, *panel.index_close, method);
  } else {
    if (!c.asset.empty()) {
      const auto asset = clip(read_prices(c.asset), first, last);
      const Panel panel = align(asset);
      d.asset = to_returns(panel.dates, panel.asset_close, method);
      d.inputs.push_back(c.asset);
    } else {
      d.asset = clip_returns(read_returns(c.asset_returns), c);
      d.inputs.push_back(c.asset_returns);
    }
    if (!c.index_returns.empty()) {
      d.index = clip_returns(read_returns(c.index_returns), c);
      d.inputs.push_back(c.index_returns);
    } else if (!c.index.empty()) {
      const auto index = clip(read_prices(c.index), first, last);
      const Panel panel = align(index);
      d.index = to_returns(panel.dates, panel.asset_close, method);
      d.inputs.push_back(c.index);
    }
    if (d.index) intersect(d.asset, *d.index);
  }
  if (d.asset.empty()) throw InputError("no asset returns in the selected date range");

  if (!c.events.empty()) {
    d.calendar = read_events(c.events);
    d.inputs.push_back(c.events);
    if (c.hard_only) d.calendar = filter_hard(d.calendar);
  } else if (need_events) {
    throw UsageError("--events is required");
  }
  const auto policy = parse_date_policy(c.policy);
  d.placed = place_events(d.calendar, d.asset.dates, policy);
  d.regressors = build_regressors(d.calendar, d.asset.dates, policy);
  return d;
}

// Validated before any file is read so flag errors win over input errors.
ModelSpec spec_from(const RunConfig& c, bool index_available) {
  ModelSpec s;
  s.include_index = c.include_index.value_or(index_available);
  s.dummy_location = parse_dummy_location(c.dummy_location);
  s.regressor_kind = parse_regressor_kind(c.regressor);
  s.nu = c.nu;
  s.estimate_nu = c.estimate_nu;
  s.validate();
  if (s.include_index && !index_available) throw UsageError("--with-index requires --index or --index-returns");
  return s;
}

FitOptions fit_options(const RunConfig& c) {
  FitOptions o;
  o.starts = c.starts;
  return o;
}

ModelData model_data(const Dataset& d, const ModelSpec& spec) {
  return make_model_data(d.asset, d.index ? &*d.index : nullptr, d.regressors, spec);
}

fs::path out_dir(const RunConfig& c) { return c.out.empty() ? fs::path(".") : fs::path(c.out); }

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  f << content;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

NamedStats descriptive_columns(const Dataset& d) {
  NamedStats cols{{"asset", describe(d.asset.values)}};
  if (d.index) cols.emplace_back("index", describe(d.index->values));
  return cols;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_descriptive(const RunConfig& cfg, std::ostream& out) {
  const Dataset d = load_dataset(cfg, false);
  const auto cols = descriptive_columns(d);
  if (cfg.format == "json") out << dump(to_json(cols));
  else if (cfg.format == "csv") out << descriptive_csv(cols);
  else out << "returns: " << cfg.returns_method << '\n' << descriptive_text(cols);
  if (!cfg.out.empty()) {
    write_text(out_dir(cfg) / "descriptive.json", dump(to_json(cols)));
    write_text(out_dir(cfg) / "descriptive.csv", descriptive_csv(cols));
    write_text(out_dir(cfg) / "descriptive.txt", descriptive_text(cols));
  }
  return kSuccess;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const ModelSpec spec = spec_from(cfg, has_index_input(cfg));
  const Dataset d = load_dataset(cfg, spec.dummy_location != DummyLocation::none);
  const fs::path dir = out_dir(cfg);
  FitResult result;
  try {
    result = fit(model_data(d, spec), spec, fit_options(cfg));
  } catch (const EstimationError& e) {
    write_text(dir / ("fit_" + spec.slug() + ".diagnostics.txt"),
               std::string(e.what()) + "\n" + e.diagnostics());
    throw;
  }
  const auto json = dump(to_json(result));
  write_text(dir / ("fit_" + spec.slug() + ".json"), json);
  write_text(dir / ("fit_" + spec.slug() + ".txt"), fit_text(result));
  write_text(dir / ("sigma_" + spec.slug() + ".csv"), volatility_csv(result.sigma_path));
  if (cfg.format == "json") out << json;
  else if (cfg.format == "csv") out << fit_csv(result);
  else out << fit_text(result);
  return kSuccess;
}

int cmd_events(const RunConfig& cfg, std::ostream& out) {
  if (cfg.events.empty()) throw UsageError("--events is required");
  EventCalendar calendar = read_events(cfg.events);
  if (cfg.hard_only) calendar = filter_hard(calendar);

  std::optional<Dataset> d;
  if (!cfg.asset.empty() || !cfg.asset_returns.empty()) d = load_dataset(cfg, true);
  const auto& placed_events = d ? d->placed.events : calendar;
  const auto clusters = classify_clusters(placed_events, cfg.window);
  std::size_t followed = 0;
  for (const auto& c : clusters) followed += c.is_followed ? 1 : 0;

  Json summary{{"events", calendar.size()},
               {"hard", filter_hard(calendar).size()},
               {"distinct_dates", clusters.size()},
               {"followed_within_window", followed},
               {"window_days", cfg.window}};
  if (d) {
    summary["placed"] = d->placed.events.size();
    summary["dropped"] = d->regressors.dropped;
    summary["off_range"] = d->regressors.off_range;
    summary["event_days"] = d->regressors.event_days();
    summary["policy"] = cfg.policy;
  }
  if (cfg.format == "json") {
    out << dump(summary);
  } else if (cfg.format == "csv") {
    out << (d ? regressors_csv(d->regressors) : clusters_csv(clusters));
  } else {
    for (const auto& [k, v] : summary.items()) out << k << ": " << v.dump() << '\n';
  }
  if (!cfg.out.empty()) {
    write_text(out_dir(cfg) / "events_summary.json", dump(summary));
    write_text(out_dir(cfg) / "clusters.csv", clusters_csv(clusters));
    if (d) write_text(out_dir(cfg) / "regressors.csv", regressors_csv(d->regressors));
  }
  return kSuccess;
}

namespace {

struct WelchTables {
  std::vector<GroupComparison> multiplicity;
  DelayedEffectTable delayed;
  ReturnSeries proxy;
};

ReturnSeries volatility_proxy(const RunConfig& cfg, const Dataset& d) {
  ReturnSeries proxy;
  proxy.dates = d.asset.dates;
  if (cfg.proxy == "absret") {
    for (double r : d.asset.values) proxy.values.push_back(std::abs(r));
    return proxy;
  }
  ModelSpec spec;
  spec.include_index = cfg.include_index.value_or(d.index.has_value()) && d.index.has_value();
  spec.nu = cfg.nu;
  const auto result = fit(model_data(d, spec), spec, fit_options(cfg));
  proxy.values = result.sigma_path.sigma;
  return proxy;
}

WelchTables welch_tables(const RunConfig& cfg, const Dataset& d, ReturnSeries proxy) {
  WelchTables t;
  t.proxy = std::move(proxy);
  const DailyValues vol(t.proxy.dates, t.proxy.values);
  const auto clusters = classify_clusters(d.placed.events, cfg.window);
  t.multiplicity = multiplicity_suite(vol, clusters);
  t.delayed = delayed_effect_suite(vol, clusters, 3);
  return t;
}

}  // namespace

int cmd_welch(const RunConfig& cfg, std::ostream& out) {
  const Dataset d = load_dataset(cfg, true);
  const auto tables = welch_tables(cfg, d, volatility_proxy(cfg, d));
  if (cfg.format == "csv") {
    out << multiplicity_csv(tables.multiplicity) << '\n' << delayed_effect_csv(tables.delayed);
  } else if (cfg.format == "json") {
    Json j{{"multiplicity", Json::array()}};
    for (const auto& g : tables.multiplicity) {
      j["multiplicity"].push_back(Json{{"variable_1", g.label_1},
                                       {"variable_2", g.label_2},
                                       {"result", g.result ? to_json(*g.result) : Json()},
                                       {"note", g.note}});
    }
    out << dump(j);
  } else {
    out << "volatility proxy: " << cfg.proxy << '\n'
        << multiplicity_text(tables.multiplicity) << '\n'
        << delayed_effect_text(tables.delayed);
  }
  if (!cfg.out.empty()) {
    write_text(out_dir(cfg) / "welch_multiplicity.csv", multiplicity_csv(tables.multiplicity));
    write_text(out_dir(cfg) / "welch_delayed.csv", delayed_effect_csv(tables.delayed));
  }
  return kSuccess;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.horizon < 1) throw UsageError("--horizon must be >= 1");
  const auto horizon = static_cast<std::size_t>(cfg.horizon);
  ModelSpec spec;
  spec.dummy_location = parse_dummy_location(cfg.dummy_location);
  spec.regressor_kind = parse_regressor_kind(cfg.regressor);
  spec.include_index = cfg.include_index.value_or(!cfg.index_returns.empty());
  spec.nu = cfg.nu;
  spec.validate();

  ParameterSet p = ParameterSet::for_spec(spec);
  p.mu = cfg.mu;
  p.omega = cfg.omega;
  p.alpha = cfg.alpha;
  p.gamma = cfg.gamma;
  p.beta = cfg.beta;
  if (p.delta_fork_mean) p.delta_fork_mean = cfg.delta_mean;
  if (p.delta_crix) p.delta_crix = cfg.delta_crix;
  if (p.delta_fork_variance) p.delta_fork_variance = cfg.delta_var;
  p.validate(spec);

  const Date start = optional_date(cfg.start).value_or(Date::from_ymd(2015, 1, 1));
  std::vector<Date> dates(horizon);
  for (std::size_t t = 0; t < horizon; ++t) dates[t] = start.plus_days(static_cast<std::int32_t>(t));

  EventCalendar calendar;
  if (!cfg.events.empty()) {
    calendar = read_events(cfg.events);
    if (cfg.hard_only) calendar = filter_hard(calendar);
  } else if (cfg.event_every > 0) {
    for (std::size_t t = static_cast<std::size_t>(cfg.event_every) - 1; t < horizon;
         t += static_cast<std::size_t>(cfg.event_every)) {
      calendar.push_back({dates[t], "synthetic " + std::to_string(calendar.size() + 1), "SYN", ForkKind::hard});
    }
  }
  const EventRegressors regressors = build_regressors(calendar, dates, parse_date_policy(cfg.policy));

  ReturnSeries index;
  if (spec.include_index) {
    if (!cfg.index_returns.empty()) {
      index = read_returns(cfg.index_returns);
      if (index.size() < horizon) throw InputError("index returns shorter than --horizon");
      index.dates.resize(horizon);
      index.values.resize(horizon);
      index.dates = dates;
    } else {
      index.dates = dates;
      index.values = draw_standardized_t(horizon, 5.0, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
      for (double& v : index.values) v *= 0.035;
    }
  }

  const auto sim = simulate(p, spec, regressors, index.values, horizon, cfg.seed);
  const fs::path dir = out_dir(cfg);
  std::ostringstream returns_csv;
  write_returns(returns_csv, sim.returns);
  write_text(dir / "returns.csv", returns_csv.str());
  write_text(dir / "sigma.csv", volatility_csv(sim.path));
  if (!calendar.empty()) {
    std::ostringstream ev;
    write_events(ev, calendar);
    write_text(dir / "events.csv", ev.str());
  }
  if (spec.include_index) {
    std::ostringstream ix;
    write_returns(ix, index);
    write_text(dir / "index_returns.csv", ix.str());
  }
  out << "simulated " << horizon << " days (seed " << cfg.seed << ", spec " << spec.slug() << ") into "
      << dir.string() << '\n';
  return kSuccess;
}

int cmd_fetch(const RunConfig& cfg, std::ostream& out) {
  if (cfg.endpoint.empty() || cfg.symbol.empty()) throw UsageError("--endpoint and --symbol are required");
  if (cfg.start.empty() || cfg.end.empty()) throw UsageError("--start and --end are required");
  require_range(cfg);
  const fs::path cache = cfg.cache.empty() ? out_dir(cfg) / ".forkvol-cache" : fs::path(cfg.cache);
  PriceFetcher fetcher(cache);
  const auto series = fetcher.fetch(cfg.endpoint, cfg.symbol, {Date::parse(cfg.start), Date::parse(cfg.end)});
  const fs::path target = cfg.output.empty() ? out_dir(cfg) / (cfg.symbol + ".csv") : fs::path(cfg.output);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  write_prices(target, series);
  out << "fetched " << series.size() << " prices for " << cfg.symbol << " into " << target.string()
      << (fetcher.network_calls() == 0 ? " (cache)" : "") << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------------------
// report

namespace {

class Bundle {
 public:
  explicit Bundle(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& stage, const std::string& name, const std::string& content) {
    write_text(dir_ / name, content);
    artifacts_.push_back(Json{{"stage", stage}, {"path", name}, {"sha256", sha256_hex(content)}});
  }

  void stage(const std::string& name, const std::function<void()>& body) {
    try {
      body();
      stages_.push_back(Json{{"name", name}, {"status", "ok"}});
    } catch (const std::exception& e) {
      ++failures_;
      stages_.push_back(Json{{"name", name}, {"status", "failed"}, {"error", e.what()}});
    }
  }

  int failures() const { return failures_; }
  Json artifacts() const { return artifacts_; }
  Json stages() const { return stages_; }

 private:
  fs::path dir_;
  Json artifacts_ = Json::array();
  Json stages_ = Json::array();
  int failures_ = 0;
};

}  // namespace

int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.events.empty()) throw UsageError("report needs --events");
  if (!has_index_input(cfg)) throw UsageError("report needs --index or --index-returns");
  const Dataset d = load_dataset(cfg, true);
  const fs::path dir = out_dir(cfg);
  fs::create_directories(dir);
  Bundle bundle(dir);
  const FitOptions options = fit_options(cfg);

  bundle.stage("descriptive", [&] {
    const auto cols = descriptive_columns(d);
    bundle.write("descriptive", "descriptive.json", dump(to_json(cols)));
    bundle.write("descriptive", "descriptive.csv", descriptive_csv(cols));
    bundle.write("descriptive", "descriptive.txt", descriptive_text(cols));
  });

  bundle.stage("events", [&] {
    bundle.write("events", "regressors.csv", regressors_csv(d.regressors));
    bundle.write("events", "clusters.csv", clusters_csv(classify_clusters(d.placed.events, cfg.window)));
  });

  auto run_fit = [&](const std::string& stage, const Dataset& data, ModelSpec spec,
                     const std::string& prefix) -> std::optional<FitResult> {
    std::optional<FitResult> result;
    bundle.stage(stage, [&] {
      result = fit(model_data(data, spec), spec, options);
      bundle.write(stage, prefix + spec.slug() + ".json", dump(to_json(*result)));
      bundle.write(stage, prefix + spec.slug() + ".txt", fit_text(*result));
      bundle.write(stage, "sigma_" + prefix + spec.slug() + ".csv", volatility_csv(result->sigma_path));
    });
    return result;
  };

  std::optional<FitResult> variance_dummy_index;
  for (const auto location : {DummyLocation::mean, DummyLocation::variance}) {
    for (const bool with_index : {false, true}) {
      ModelSpec spec;
      spec.dummy_location = location;
      spec.include_index = with_index;
      spec.nu = cfg.nu;
      auto r = run_fit("fit_" + spec.slug(), d, spec, "fit_");
      if (location == DummyLocation::variance && with_index) variance_dummy_index = std::move(r);
    }
  }

  Dataset hard = d;
  hard.calendar = filter_hard(d.calendar);
  hard.placed = place_events(hard.calendar, hard.asset.dates, parse_date_policy(cfg.policy));
  hard.regressors = build_regressors(hard.calendar, hard.asset.dates, parse_date_policy(cfg.policy));
  for (const auto location : {DummyLocation::mean, DummyLocation::variance}) {
    ModelSpec spec;
    spec.dummy_location = location;
    spec.include_index = true;
    spec.nu = cfg.nu;
    run_fit("hard_" + spec.slug(), hard, spec, "hard_fit_");
  }

  ModelSpec count_spec;
  count_spec.dummy_location = DummyLocation::variance;
  count_spec.regressor_kind = RegressorKind::count;
  count_spec.include_index = true;
  count_spec.nu = cfg.nu;
  const auto count_fit = run_fit("fit_" + count_spec.slug(), d, count_spec, "fit_");
  bundle.stage("model_choice", [&] {
    if (!variance_dummy_index || !count_fit) throw EstimationError("dummy or count fit unavailable");
    bundle.write("model_choice", "model_choice.csv", ic_comparison_csv(variance_dummy_index->ic, count_fit->ic));
    bundle.write("model_choice", "model_choice.txt", ic_comparison_text(variance_dummy_index->ic, count_fit->ic));
  });

  bundle.stage("welch", [&] {
    const auto tables = welch_tables(cfg, d, volatility_proxy(cfg, d));
    bundle.write("welch", "welch_multiplicity.csv", multiplicity_csv(tables.multiplicity));
    bundle.write("welch", "welch_multiplicity.txt", multiplicity_text(tables.multiplicity));
    bundle.write("welch", "welch_delayed.csv", delayed_effect_csv(tables.delayed));
    bundle.write("welch", "welch_delayed.txt", delayed_effect_text(tables.delayed));
  });

  Json inputs = Json::array();
  for (const auto& path : d.inputs) inputs.push_back(Json{{"path", path}, {"sha256", sha256_file(path)}});
  Json manifest{{"inputs", inputs},
                {"settings",
                 Json{{"returns", cfg.returns_method},
                      {"start", cfg.start},
                      {"end", cfg.end},
                      {"nu", cfg.nu},
                      {"window", cfg.window},
                      {"policy", cfg.policy},
                      {"proxy", cfg.proxy},
                      {"hard_only", cfg.hard_only},
                      {"starts", cfg.starts}}},
                {"stages", bundle.stages()},
                {"artifacts", bundle.artifacts()}};
  write_text(dir / "manifest.json", dump(manifest));

  out << "report: " << bundle.artifacts().size() << " artifacts in " << dir.string() << '\n';
  if (bundle.failures() > 0) {
    for (const auto& s : bundle.stages()) {
      if (s["status"] == "failed") err << "stage " << s["name"].get<std::string>() << " failed: "
                                       << s["error"].get<std::string>() << '\n';
    }
    return kPartialReport;
  }
  return kSuccess;
}

}  // namespace forkvol::cli
