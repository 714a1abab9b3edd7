#pragma once

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "forkvol/estimation.hpp"
#include "forkvol/events.hpp"
#include "forkvol/grouptests.hpp"
#include "forkvol/timeseries.hpp"

namespace forkvol {

using Json = nlohmann::ordered_json;

using NamedStats = std::vector<std::pair<std::string, DescriptiveStats>>;

Json to_json(const DescriptiveStats& s);
DescriptiveStats descriptive_from_json(const Json& j);
Json to_json(const NamedStats& columns);
/// One row per statistic, one column per series.
std::string descriptive_text(const NamedStats& columns);
std::string descriptive_csv(const NamedStats& columns);

Json to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const Json& j);

/// Full-precision JSON of a fit. The sigma path is not included; write it
/// with volatility_csv.
Json to_json(const FitResult& fit);
FitResult fit_from_json(const Json& j);
/// Coefficient table with standard errors in percent.
std::string fit_text(const FitResult& fit, const std::string& title = {});
std::string fit_csv(const FitResult& fit);
std::string volatility_csv(const VolatilityPath& path);

Json to_json(const HypothesisOutcome& h);
Json to_json(const WelchResult& w);
WelchResult welch_from_json(const Json& j);

std::string multiplicity_csv(const std::vector<GroupComparison>& rows);
std::string multiplicity_text(const std::vector<GroupComparison>& rows);
std::string delayed_effect_csv(const DelayedEffectTable& table);
std::string delayed_effect_text(const DelayedEffectTable& table);

/// D(t)-versus-C(t) information criteria, lower is better.
std::string ic_comparison_csv(const InformationCriteria& dummy, const InformationCriteria& count);
std::string ic_comparison_text(const InformationCriteria& dummy, const InformationCriteria& count);

std::string regressors_csv(const EventRegressors& r);
std::string clusters_csv(const std::vector<ClusterLabel>& clusters);

}  // namespace forkvol
