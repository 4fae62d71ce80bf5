#include "recomb/serialize.hpp"

#include "recomb/error.hpp"

namespace recomb {

using nlohmann::json;

json to_json(const SpaceShape& shape) { return json{{"n", shape.sites()}, {"q", shape.alphabet_max()}}; }

json to_json(const Distribution& p) { return json{{"shape", to_json(p.shape())}, {"probs", p.probs()}}; }

json to_json(const RecombinationMeasure& nu) {
  json j{{"kind", nu.kind_name()}, {"n", nu.sites()}};
  if (!nu.implicit() || nu.sites() <= RecombinationMeasure::kMaxEnumerableUniform) {
    json atoms = json::array();
    for (const Atom& a : nu.atoms()) atoms.push_back(json{{"mask", a.mask.bits}, {"p", a.p}});
    j["atoms"] = std::move(atoms);
  }
  return j;
}

SpaceShape shape_from_json(const json& j) {
  try {
    if (j.contains("q")) {
      auto q = j.at("q").get<std::vector<int>>();
      if (j.contains("n"))
        require(j.at("n").get<int>() == static_cast<int>(q.size()), "core-model", "shape n disagrees with q");
      return SpaceShape(std::move(q));
    }
    return SpaceShape::binary(j.at("n").get<int>());
  } catch (const json::exception& e) {
    fail(Error::Kind::invalid_argument, "core-model", std::string("malformed shape: ") + e.what());
  }
}

Distribution distribution_from_json(const json& j) {
  try {
    return Distribution(shape_from_json(j.at("shape")), j.at("probs").get<std::vector<double>>());
  } catch (const json::exception& e) {
    fail(Error::Kind::invalid_argument, "core-model", std::string("malformed distribution: ") + e.what());
  }
}

RecombinationMeasure measure_from_json(const json& j) {
  try {
    const std::string kind = j.value("kind", std::string("custom"));
    const int n = j.at("n").get<int>();
    if (kind == "uniform") return RecombinationMeasure::uniform_crossover(n);
    if (kind == "onepoint") return RecombinationMeasure::one_point(n);
    if (kind == "singlesite") return RecombinationMeasure::single_site(n);
    require(kind == "custom", "core-model", "unknown measure kind '" + kind + "'");
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) atoms.push_back({SubsetMask(a.at("mask").get<std::uint64_t>()), a.at("p").get<double>()});
    return RecombinationMeasure::custom(n, std::move(atoms));
  } catch (const json::exception& e) {
    fail(Error::Kind::invalid_argument, "core-model", std::string("malformed measure: ") + e.what());
  }
}

}  // namespace recomb
