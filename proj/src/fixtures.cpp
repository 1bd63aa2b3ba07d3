#include "regindex/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "regindex/reference_field.hpp"

namespace regindex {
namespace fixtures {

namespace {

// Pitchfork point of the mirrored rho = -4 family: the symmetric
// equilibrium's bordered determinant vanishes here.
constexpr double kNearFoldWeight = 0.9278503562046324;

ExcessDemandModel broken_walras_model() {
  ExcessDemandModel model;
  model.dimension = 3;
  model.label = "broken-walras";
  model.eval = [](const Vector& p) {
    Vector f = Vector::Zero(p.size());
    f(0) = 1.0;
    return f;
  };
  return model;
}

ExcessDemandModel broken_homogeneity_model() {
  // f(p) = v - (v.p) p: exactly Walrasian on the sphere, but f(2p) != f(p).
  ExcessDemandModel model;
  model.dimension = 3;
  model.label = "broken-homogeneity";
  const Vector v = (Vector(3) << 1.0, 2.0, 3.0).finished();
  model.eval = [v](const Vector& p) { return Vector(v - v.dot(p) * p); };
  return model;
}

ExcessDemandModel bounded_boundary_model() {
  // Homogeneous tangential projection of a constant vector; satisfies
  // (i) but stays bounded near the boundary, violating (iii).
  ExcessDemandModel model;
  model.dimension = 3;
  model.label = "bounded-boundary";
  const Vector v = (Vector(3) << 1.0, 2.0, 3.0).finished();
  model.eval = [v](const Vector& p) {
    const Vector u = p / p.norm();
    return Vector(v - v.dot(u) * u);
  };
  return model;
}

}  // namespace

ExchangeEconomySpec mirrored_ces_spec(double a, double rho) {
  ExchangeEconomySpec spec;
  AgentSpec first;
  first.weights = (Vector(2) << a, 1.0 - a).finished();
  first.rho = rho;
  first.endowment = (Vector(2) << 1.0, 0.0).finished();
  AgentSpec second;
  second.weights = (Vector(2) << 1.0 - a, a).finished();
  second.rho = rho;
  second.endowment = (Vector(2) << 0.0, 1.0).finished();
  spec.agents = {first, second};
  return spec;
}

ExchangeEconomySpec cobb_douglas_spec() {
  ExchangeEconomySpec spec = mirrored_ces_spec(0.5, 0.0);
  return spec;
}

ExchangeEconomySpec ces_three_equilibria_spec() {
  return mirrored_ces_spec(0.95, -4.0);
}

ExchangeEconomySpec ces_near_fold_spec() {
  return mirrored_ces_spec(kNearFoldWeight, -4.0);
}

std::vector<std::string> builtin_names() {
  return {"cobb-douglas-2",    "ces-3eq",        "ces-near-fold",
          "reference-field",   "broken-walras",  "broken-homogeneity",
          "bounded-boundary"};
}

bool is_builtin(const std::string& name) {
  const auto names = builtin_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

ExcessDemandModel builtin_model(const std::string& name) {
  if (name == "cobb-douglas-2") {
    ExcessDemandModel model = build_ces_economy(cobb_douglas_spec());
    model.label = name;
    return model;
  }
  if (name == "ces-3eq") {
    ExcessDemandModel model = build_ces_economy(ces_three_equilibria_spec());
    model.label = name;
    return model;
  }
  if (name == "ces-near-fold") {
    ExcessDemandModel model = build_ces_economy(ces_near_fold_spec());
    model.label = name;
    return model;
  }
  if (name == "reference-field") {
    return reference_field_model(project_to_sphere(
        (Vector(2) << 0.6, 0.8).finished()));
  }
  if (name == "broken-walras") return broken_walras_model();
  if (name == "broken-homogeneity") return broken_homogeneity_model();
  if (name == "bounded-boundary") return bounded_boundary_model();
  throw InvalidSpec("unknown built-in model: " + name);
}

ExchangeEconomySpec economy_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidSpec("economy spec must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "goods" && key != "agents") {
      throw InvalidSpec("unknown key in economy spec: " + key);
    }
  }
  if (!j.contains("goods") || !j.contains("agents")) {
    throw InvalidSpec("economy spec needs 'goods' and 'agents'");
  }
  const int goods = j.at("goods").get<int>();
  ExchangeEconomySpec spec;
  for (const auto& agent_json : j.at("agents")) {
    for (const auto& [key, value] : agent_json.items()) {
      (void)value;
      if (key != "weights" && key != "rho" && key != "endowment") {
        throw InvalidSpec("unknown key in agent spec: " + key);
      }
    }
    AgentSpec agent;
    const auto& weights = agent_json.at("weights");
    const auto& endowment = agent_json.at("endowment");
    if (static_cast<int>(weights.size()) != goods ||
        static_cast<int>(endowment.size()) != goods) {
      throw InvalidSpec("agent vectors must have length 'goods'");
    }
    agent.weights = Vector(goods);
    agent.endowment = Vector(goods);
    for (int i = 0; i < goods; ++i) {
      agent.weights(i) = weights.at(i).get<double>();
      agent.endowment(i) = endowment.at(i).get<double>();
    }
    agent.rho = agent_json.at("rho").get<double>();
    spec.agents.push_back(std::move(agent));
  }
  return spec;
}

}  // namespace fixtures
}  // namespace regindex
