#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <optional>
#include <string>
#include <vector>

#include "regindex/geometry.hpp"

namespace regindex {

/// An evaluable excess-demand map p -> f(p) on the strictly positive
/// orthant, homogeneous of degree zero, with an optional analytic
/// Jacobian. Immutable after construction; eval/jacobian are pure.
struct ExcessDemandModel {
  int dimension = 0;
  std::string label;
  std::function<Vector(const Vector&)> eval;
  std::function<Matrix(const Vector&)> jacobian;  // may be empty
  // Set for fields that extend continuously to the closed sphere
  // (e.g. the reference field); the boundary-blowup check is then
  // vacuous rather than failing.
  bool defined_on_closure = false;

  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian); }
};

struct AgentSpec {
  Vector weights;    // strictly positive CES share parameters
  double rho = 0.0;  // elasticity parameter, rho < 1; |rho| < 1e-6 => Cobb-Douglas
  Vector endowment;  // nonnegative, not all zero
};

struct ExchangeEconomySpec {
  std::vector<AgentSpec> agents;

  int goods() const {
    return agents.empty() ? 0 : static_cast<int>(agents.front().weights.size());
  }
};

/// Build the aggregate excess-demand model of a CES exchange economy:
/// f(p) = sum_i (x_i(p) - e_i) with x_ij = w_i a_ij^s p_j^-s / sum_k a_ik^s p_k^(1-s),
/// s = 1/(1-rho), wealth w_i = p.e_i. Walras' law and degree-0
/// homogeneity hold analytically; an analytic Jacobian is attached.
/// Throws InvalidSpec on rho >= 1, nonpositive weights, or a good with
/// zero aggregate endowment.
ExcessDemandModel build_ces_economy(const ExchangeEconomySpec& spec);

struct RayCheck {
  int ray = 0;                       // index of the face approached
  std::vector<double> norms;         // ||f|| along the boundary ladder
  bool increasing = false;           // tail monotonically increasing
  double growth_ratio = 0.0;         // last / first norm
  double direction_min_component = 0.0;  // min_i z_i over the tail, z = f/||f||
  double direction_dot_limit = 0.0;      // max |z . p_limit| over the tail
  bool pass = false;
};

struct BlowupReport {
  std::vector<RayCheck> rays;
  bool vacuous = false;  // model defined on the closed sphere: nothing to check
  bool pass = false;
};

/// Per-hypothesis summary for Theorem conditions (i)-(iii). All checks
/// are sampled certificates, not exhaustive proofs; in particular the
/// boundary-blowup check covers only the supplied rays.
struct VerificationReport {
  double walras_max_residual = 0.0;
  double homogeneity_max_residual = 0.0;
  double lower_bound_estimate = 0.0;   // estimated s of condition (ii)
  double lower_bound_interior = 0.0;   // same estimate away from the boundary
  BlowupReport blowup;
  bool walras_ok = false;
  bool homogeneity_ok = false;
  bool lower_bound_ok = false;
  bool blowup_ok = false;

  bool passed() const {
    return walras_ok && homogeneity_ok && lower_bound_ok && blowup_ok;
  }
};

inline constexpr double kWalrasTol = 1e-8;

/// Draw a point of S with every coordinate >= min_coord
/// (normalized absolute Gaussian, rejection on the floor).
Vector random_interior_point(int n, double min_coord, std::mt19937_64& rng);

/// max over sampled p in S_0.01 of |p.f(p)|; deterministic given seed.
double check_walras(const ExcessDemandModel& model, int sample_count,
                    std::uint64_t seed);

/// max over sampled p and a in {0.5, 2, 10} of ||f(ap) - f(p)||_inf.
double check_homogeneity(const ExcessDemandModel& model, int sample_count,
                         std::uint64_t seed);

/// Estimated s of condition (ii): -min over sampled p (including
/// near-boundary points down to min coordinate 1e-6) and i of f_i(p).
double check_lower_bound(const ExcessDemandModel& model, int sample_count,
                         std::uint64_t seed);

/// A boundary-approach sequence p^k in S with p^k -> p not in S.
struct BoundaryRay {
  int face = 0;                 // coordinate driven to zero
  std::vector<Vector> points;   // ladder of sphere points, last nearest boundary
  Vector limit;                 // the boundary limit point
};

/// Geodesic rays from the barycentric point toward each face p_i = 0,
/// sampled geometrically with p_i in {1e-1, ..., 1e-8}.
std::vector<BoundaryRay> default_boundary_rays(int n);

/// Checks condition (iii) along the given rays, plus the limit-direction
/// property of the normalized tail: components >= -1e-6 and
/// |z . p_limit| <= 1e-4.
BlowupReport check_boundary_blowup(const ExcessDemandModel& model,
                                   const std::vector<BoundaryRay>& rays,
                                   double growth_ratio_threshold = 10.0);

/// Runs all of conditions (i)-(iii) with default sampling.
VerificationReport verify_hypotheses(const ExcessDemandModel& model,
                                     std::uint64_t seed);

}  // namespace regindex
