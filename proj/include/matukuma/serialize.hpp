#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "matukuma/classify.hpp"
#include "matukuma/pohozaev.hpp"
#include "matukuma/scan.hpp"

namespace matukuma::io {

using json = nlohmann::json;

/// Serialized text with every number printed to 17 significant digits and
/// non-finite values written as null.
std::string dump(const json& j, int indent = 2);

/// Parses text, throwing ConfigError("config_parse") on malformed input.
json parse(const std::string& text);

// Readers throw ConfigError with code config_missing, config_type or
// config_value. Weight and bump readers may also throw ValidationError when
// the data describe an invalid bump.

json to_json(const ProblemSpec& spec);
ProblemSpec problem_from_json(const json& j);

json to_json(const WeightFunction& w);
/// Constructed weights need n, l and p* from the enclosing problem.
WeightFunction weight_from_json(const json& j, int n, double l, double p_star);

json to_json(const BumpFunction& k);
BumpFunction bump_from_json(const json& j);

json to_json(const Tolerances& t);
/// Missing keys keep the values of `base`.
Tolerances tolerances_from_json(const json& j, const Tolerances& base = {});

json to_json(const Classification& c);
/// Termination, horizon, crossing radius and r_{alpha,k} of a trajectory.
json events_json(const Trajectory& traj);
json to_json(const HypothesisReport& r);
json to_json(const PohozaevReport& r);
json to_json(const std::vector<ProbePoint>& probe);
json to_json(const GrowthReport& r);
json to_json(const StructureReport& r);
json to_json(const Theorem5Report& r);
json to_json(const SmallAlphaReport& r);
json to_json(const OracleResult& r);
json to_json(const ScalingFit& f);
json to_json(const AprioriBound& b);

}  // namespace matukuma::io
