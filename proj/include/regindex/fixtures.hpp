#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "regindex/economy.hpp"

namespace regindex {
namespace fixtures {

/// Built-in models addressable by name:
///   cobb-douglas-2     2-good Cobb-Douglas economy, unique equilibrium
///                      at (1/sqrt(2), 1/sqrt(2)), index +1
///   ces-3eq            2-good CES economy (rho = -4) with 3 equilibria,
///                      indices (+1, -1, +1)
///   ces-near-fold      same family tuned to the pitchfork point where
///                      g vanishes at the symmetric equilibrium
///   reference-field    the benchmark field anchored at a fixed q
///   broken-walras      constant field violating Walras' law
///   broken-homogeneity tangential field that is not degree-0 homogeneous
///   bounded-boundary   tangential projection of a constant vector;
///                      stays bounded near the boundary
std::vector<std::string> builtin_names();

bool is_builtin(const std::string& name);

ExcessDemandModel builtin_model(const std::string& name);

/// The economy specs behind the CES fixtures, for tests that need them.
ExchangeEconomySpec cobb_douglas_spec();
ExchangeEconomySpec ces_three_equilibria_spec();
ExchangeEconomySpec ces_near_fold_spec();

/// Mirror-weight CES family used by the fixtures above: two agents,
/// endowments (1,0) and (0,1), weights (a, 1-a) and (1-a, a).
ExchangeEconomySpec mirrored_ces_spec(double a, double rho);

/// Parse an economy spec from its JSON form:
/// { "goods": n, "agents": [ { "weights": [...], "rho": r,
///   "endowment": [...] } ] }
/// Unknown keys are rejected.
ExchangeEconomySpec economy_spec_from_json(const nlohmann::json& j);

}  // namespace fixtures
}  // namespace regindex
