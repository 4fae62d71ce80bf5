#pragma once

#include <nlohmann/json.hpp>

#include "recomb/distribution.hpp"
#include "recomb/recombination.hpp"

namespace recomb {

nlohmann::json to_json(const SpaceShape& shape);
nlohmann::json to_json(const Distribution& p);
/// {"kind", "n", "atoms": [{"mask", "p"}]}; atoms are omitted for implicit uniform crossover above 16 sites.
nlohmann::json to_json(const RecombinationMeasure& nu);

SpaceShape shape_from_json(const nlohmann::json& j);
Distribution distribution_from_json(const nlohmann::json& j);
/// Accepts kind "uniform", "onepoint", "singlesite" (atoms optional) or "custom" (atoms required).
RecombinationMeasure measure_from_json(const nlohmann::json& j);

}  // namespace recomb
