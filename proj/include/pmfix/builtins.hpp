#ifndef PMFIX_BUILTINS_HPP
#define PMFIX_BUILTINS_HPP

#include "pmfix/control.hpp"
#include "pmfix/fixed_point.hpp"
#include "pmfix/ifs.hpp"
#include "pmfix/integral.hpp"
#include "pmfix/metric.hpp"

#include <json.hpp>

#include <string>

namespace pmfix::builtins {

/// Metric from a JSON spec {"name": ..., optional params}; `k` feeds the
/// bounded metrics when the spec carries no explicit bound.
PartialMetric make_metric(const nlohmann::json& spec, double k = 0.0);

ControlPair make_control(const nlohmann::json& spec);

/// Quartet from the builtin name ("example22", "identity") or an inline
/// {"f": piecewise, "g": ..., "S": ..., "T": ...} description.
MapQuartet make_quartet(const nlohmann::json& spec, double k);

PiecewiseMap1D parse_piecewise(const nlohmann::json& spec);

/// IFS from {"system": name} or the inline maps/family/metric form.
IfsSystem make_ifs(const nlohmann::json& payload);

IntegralProblem make_problem(const nlohmann::json& payload);

std::string list_text();

}  // namespace pmfix::builtins

#endif
