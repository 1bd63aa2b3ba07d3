#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "regindex/calculus.hpp"

namespace regindex {

struct SolverConfig {
  double newton_tol = 1e-11;
  int max_iter = 60;
  int multistart_count = 0;  // 0 => 200 * n
  double dedupe_radius = 1e-4;
  std::uint64_t seed = 1;
};

/// Projected Newton on the sphere: p <- normalize(p + B c) with
/// B^T Df(p) B c = -B^T f(p). Returns a record iff the residual drops
/// below newton_tol within max_iter while staying strictly positive;
/// absent otherwise (divergence is not an error).
/// Throws NonRegularEquilibrium if the converged zero fails condition (v).
std::optional<EquilibriumRecord> newton_on_sphere(const ExcessDemandModel& model,
                                                  const PricePoint& p0,
                                                  const SolverConfig& cfg);

/// Multistart enumeration of E*: quasi-uniform points on the positive
/// sphere restricted to S_eps plus seeded random draws, deduplicated by
/// spherical distance and sorted lexicographically by price.
std::vector<EquilibriumRecord> find_equilibria(const ExcessDemandModel& model,
                                               double eps,
                                               const SolverConfig& cfg);

/// Independent low-dimensional oracle. n = 2: angular sweep bracketing
/// sign changes of the tangential component of f, bisected to full
/// precision. n = 3: coarse angular mesh plus local refinement of ||f||
/// minima. Throws ScanInfeasible for n > 3.
std::vector<PricePoint> grid_scan_oracle(const ExcessDemandModel& model,
                                         double eps, double resolution);

/// Quasi-uniform multistart seeds (Kronecker sequence mapped to the
/// positive sphere). Exposed for tests.
std::vector<PricePoint> quasi_uniform_starts(int n, double eps, int count);

}  // namespace regindex
