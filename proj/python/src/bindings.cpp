#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "forkvol/errors.hpp"
#include "forkvol/estimation.hpp"
#include "forkvol/grouptests.hpp"
#include "forkvol/ingestion.hpp"
#include "forkvol/serialize.hpp"
#include "forkvol/timeseries.hpp"

namespace py = pybind11;
using namespace forkvol;

namespace {

std::vector<Date> parse_dates(const std::vector<std::string>& iso) {
  std::vector<Date> out;
  out.reserve(iso.size());
  for (const auto& s : iso) out.push_back(Date::parse(s));
  return out;
}

std::vector<std::string> iso_dates(const std::vector<Date>& dates) {
  std::vector<std::string> out;
  out.reserve(dates.size());
  for (Date d : dates) out.push_back(d.iso());
  return out;
}

std::vector<Date> default_dates(std::size_t n) {
  std::vector<Date> out;
  for (std::size_t t = 0; t < n; ++t) out.push_back(Date::from_ymd(2015, 1, 1).plus_days(static_cast<int>(t)));
  return out;
}

// Assembles ModelData from plain Python sequences. Dates default to consecutive
// days so that callers can pass bare arrays.
ModelData make_data(const std::vector<double>& returns, const std::optional<std::vector<double>>& index,
                    const std::optional<std::vector<double>>& events, const std::optional<std::vector<std::string>>& dates,
                    const ModelSpec& spec) {
  ModelData d;
  d.dates = dates ? parse_dates(*dates) : default_dates(returns.size());
  d.returns = returns;
  if (spec.include_index) {
    if (!index) throw UsageError("the spec includes the index but no index returns were given");
    d.index_returns = *index;
  }
  if (spec.dummy_location != DummyLocation::none) {
    if (!events) throw UsageError("the spec has an event term but no event regressor was given");
    d.event_regressor = *events;
  }
  if (d.dates.size() != d.size() || (spec.include_index && d.index_returns.size() != d.size()) ||
      (!d.event_regressor.empty() && d.event_regressor.size() != d.size())) {
    throw InputError("returns, dates, index and event regressor must have equal lengths");
  }
  return d;
}

py::dict stats_dict(const DescriptiveStats& s) {
  py::dict d;
  d["n"] = s.n;
  d["mean"] = s.mean;
  d["std_dev"] = s.std_dev;
  d["min"] = s.min;
  d["max"] = s.max;
  d["skewness"] = s.skewness;
  d["excess_kurtosis"] = s.excess_kurtosis;
  d["jarque_bera"] = s.jarque_bera;
  d["jb_p_value"] = s.jb_p_value;
  return d;
}

py::dict welch_dict(const WelchResult& w) {
  py::dict d;
  d["mean_1"] = w.mean_1;
  d["mean_2"] = w.mean_2;
  d["difference"] = w.difference;
  d["std_error_1"] = w.std_error_1;
  d["std_error_2"] = w.std_error_2;
  d["t_value"] = w.t_value;
  d["df"] = w.df;
  d["p_value"] = w.p_value;
  return d;
}

py::dict ic_dict(const InformationCriteria& ic) {
  py::dict d;
  d["akaike"] = ic.akaike;
  d["bayes"] = ic.bayes;
  d["shibata"] = ic.shibata;
  d["hannan_quinn"] = ic.hannan_quinn;
  return d;
}

}  // namespace

PYBIND11_MODULE(_forkvol, m) {
  m.doc() = "EGARCH(1,1)-t volatility models with event regressors";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<EstimationError>(m, "EstimationError", PyExc_RuntimeError);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init([](bool include_index, const std::string& dummy_location, const std::string& regressor,
                       double nu, bool estimate_nu) {
             ModelSpec s;
             s.include_index = include_index;
             s.dummy_location = parse_dummy_location(dummy_location);
             s.regressor_kind = parse_regressor_kind(regressor);
             s.nu = nu;
             s.estimate_nu = estimate_nu;
             s.validate();
             return s;
           }),
           py::arg("include_index") = false, py::arg("dummy_location") = "none", py::arg("regressor") = "dummy",
           py::arg("nu") = 5.0, py::arg("estimate_nu") = false)
      .def_readonly("include_index", &ModelSpec::include_index)
      .def_property_readonly("dummy_location",
                             [](const ModelSpec& s) { return std::string(to_string(s.dummy_location)); })
      .def_property_readonly("regressor", [](const ModelSpec& s) { return std::string(to_string(s.regressor_kind)); })
      .def_readonly("nu", &ModelSpec::nu)
      .def_readonly("estimate_nu", &ModelSpec::estimate_nu)
      .def("slug", &ModelSpec::slug)
      .def("parameter_names", [](const ModelSpec& s) { return ParameterLayout(s).names(); })
      .def("__repr__", [](const ModelSpec& s) { return "ModelSpec(" + s.slug() + ")"; });

  py::class_<ParameterSet>(m, "ParameterSet")
      .def(py::init([](const ModelSpec& spec, const py::kwargs& values) {
             ParameterSet p = ParameterSet::for_spec(spec);
             for (const auto& [key, value] : values) {
               const auto name = key.cast<std::string>();
               const double v = value.cast<double>();
               if (name == "mu") p.mu = v;
               else if (name == "omega") p.omega = v;
               else if (name == "alpha") p.alpha = v;
               else if (name == "gamma") p.gamma = v;
               else if (name == "beta") p.beta = v;
               else if (name == "nu") p.nu = v;
               else if (name == "delta_fork_mean" && p.delta_fork_mean) p.delta_fork_mean = v;
               else if (name == "delta_crix" && p.delta_crix) p.delta_crix = v;
               else if (name == "delta_fork_variance" && p.delta_fork_variance) p.delta_fork_variance = v;
               else throw UsageError("parameter '" + name + "' is not part of spec " + spec.slug());
             }
             p.validate(spec);
             return p;
           }),
           py::arg("spec"))
      .def_readonly("mu", &ParameterSet::mu)
      .def_readonly("omega", &ParameterSet::omega)
      .def_readonly("alpha", &ParameterSet::alpha)
      .def_readonly("gamma", &ParameterSet::gamma)
      .def_readonly("beta", &ParameterSet::beta)
      .def_readonly("nu", &ParameterSet::nu)
      .def_readonly("delta_fork_mean", &ParameterSet::delta_fork_mean)
      .def_readonly("delta_crix", &ParameterSet::delta_crix)
      .def_readonly("delta_fork_variance", &ParameterSet::delta_fork_variance);

  m.def("expected_abs_z", &expected_abs_z, py::arg("nu"));
  m.def("std_t_log_density", &std_t_log_density, py::arg("z"), py::arg("nu"));

  m.def(
      "to_returns",
      [](const std::vector<double>& prices, const std::string& method) {
        return to_returns(default_dates(prices.size()), prices, parse_return_method(method)).values;
      },
      py::arg("prices"), py::arg("method") = "log");
  m.def("describe", [](const std::vector<double>& values) { return stats_dict(describe(values)); }, py::arg("values"));
  m.def(
      "jarque_bera",
      [](double skewness, double excess_kurtosis, std::size_t n) {
        const auto jb = jarque_bera(skewness, excess_kurtosis, n);
        return py::make_tuple(jb.statistic, jb.p_value);
      },
      py::arg("skewness"), py::arg("excess_kurtosis"), py::arg("n"));
  m.def(
      "welch_test",
      [](const std::vector<double>& a, const std::vector<double>& b) { return welch_dict(welch_test(a, b)); },
      py::arg("sample_1"), py::arg("sample_2"));
  m.def(
      "information_criteria",
      [](double ll, std::size_t k, std::size_t n) { return ic_dict(information_criteria(ll, k, n)); },
      py::arg("log_likelihood"), py::arg("k"), py::arg("n"));
  m.def("two_sided_p_value", &two_sided_p_value, py::arg("t"), py::arg("df"));

  m.def(
      "event_regressors",
      [](const std::vector<std::string>& event_dates, const std::vector<std::string>& dates,
         const std::string& policy) {
        EventCalendar cal;
        for (const auto& d : event_dates) cal.push_back({Date::parse(d), "", "", ForkKind::unknown});
        const auto r = build_regressors(cal, parse_dates(dates), parse_date_policy(policy));
        py::dict out;
        out["dummy"] = r.dummy;
        out["count"] = r.count;
        out["dropped"] = r.dropped;
        out["off_range"] = r.off_range;
        return out;
      },
      py::arg("event_dates"), py::arg("dates"), py::arg("policy") = "next_day");

  m.def(
      "filter",
      [](const std::vector<double>& returns, const ParameterSet& params, const ModelSpec& spec,
         const std::optional<std::vector<double>>& events, const std::optional<std::vector<double>>& index,
         const std::optional<std::vector<std::string>>& dates) {
        const auto f = filter(make_data(returns, index, events, dates, spec), params, spec);
        py::dict out;
        out["sigma"] = f.path.sigma;
        out["z"] = f.path.z;
        out["log_lik_terms"] = f.log_lik_terms;
        out["log_likelihood"] = f.log_likelihood;
        out["initial_log_variance"] = f.initial_log_variance;
        return out;
      },
      py::arg("returns"), py::arg("params"), py::arg("spec"), py::arg("events") = py::none(),
      py::arg("index") = py::none(), py::arg("dates") = py::none());

  m.def(
      "simulate",
      [](const ParameterSet& params, const ModelSpec& spec, std::size_t horizon, std::uint64_t seed,
         const std::optional<std::vector<double>>& events, const std::optional<std::vector<double>>& index) {
        EventRegressors regs = no_events(default_dates(horizon));
        if (events) {
          if (events->size() != horizon) throw InputError("events must have one value per day");
          for (std::size_t t = 0; t < horizon; ++t) {
            regs.count[t] = static_cast<int>((*events)[t]);
            regs.dummy[t] = regs.count[t] >= 1 ? 1 : 0;
          }
        }
        const std::vector<double> idx = index.value_or(std::vector<double>{});
        const auto sim = simulate(params, spec, regs, idx, horizon, seed);
        py::dict out;
        out["dates"] = iso_dates(sim.returns.dates);
        out["returns"] = sim.returns.values;
        out["sigma"] = sim.path.sigma;
        out["z"] = sim.path.z;
        out["seed_consistent"] = sim.seed_consistent;
        return out;
      },
      py::arg("params"), py::arg("spec"), py::arg("horizon"), py::arg("seed") = 1, py::arg("events") = py::none(),
      py::arg("index") = py::none());

  m.def(
      "fit",
      [](const std::vector<double>& returns, const ModelSpec& spec, const std::optional<std::vector<double>>& events,
         const std::optional<std::vector<double>>& index, const std::optional<std::vector<std::string>>& dates,
         int starts) {
        FitOptions opt;
        opt.starts = starts;
        const auto data = make_data(returns, index, events, dates, spec);
        FitResult r;
        {
          py::gil_scoped_release release;
          r = fit(data, spec, opt);
        }
        // The JSON form is the canonical record; hand it over as Python objects.
        return py::module_::import("json").attr("loads")(to_json(r).dump());
      },
      py::arg("returns"), py::arg("spec"), py::arg("events") = py::none(), py::arg("index") = py::none(),
      py::arg("dates") = py::none(), py::arg("starts") = 5);
}
