#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "regindex/calculus.hpp"
#include "regindex/reference_field.hpp"

namespace regindex {

/// Step 6 certificate: the homotopy does not vanish on [0,1] x dS_eps,
/// sampled on a finite grid, and every known equilibrium lies strictly
/// inside S_eps.
struct EpsilonCertificate {
  double epsilon = 0.0;
  double min_norm = 0.0;
  double threshold = 0.0;
  bool pass = false;
  double witness_t = 0.0;  // grid point realizing min_norm
  Vector witness_p;
};

/// The convex homotopy H(t, p) = (1-t) f(p) + t f^q(p) together with
/// the truncation parameters and its boundary certificate.
struct HomotopyProblem {
  ExcessDemandModel model;
  PricePoint q;
  double epsilon = 0.0;
  double epsilon_prime = 0.0;
  EpsilonCertificate certificate;
};

struct PathNode {
  double t = 0.0;
  Vector p;
  Vector tangent;       // unit (n+1)-vector in (t, p) coordinates
  double residual = 0.0;  // ||H(t, p)||
};

enum class PathKind { loop, arc };

struct ArcEndpoint {
  double t = 0.0;  // 0 or 1
  Vector p;
  int boundary_sign = 0;
};

struct PathComponent {
  std::vector<PathNode> nodes;
  PathKind kind = PathKind::arc;
  std::vector<ArcEndpoint> endpoints;  // two entries for arcs, none for loops
};

struct StepControl {
  double initial_step = 1e-2;
  double min_step = 1e-6;
  double max_step = 5e-2;
  int max_newton = 8;
  double corrector_tol = 1e-10;
  double rank_tol = 1e-8;  // relative smallest-singular-value floor
};

Vector homotopy_eval(const HomotopyProblem& problem, double t, const Vector& p);

/// Evaluates ||H|| over a (t, p) grid on [0,1] x dS_eps. Passes iff the
/// minimum exceeds a safety threshold (3x the estimated evaluation
/// noise) and every supplied equilibrium satisfies min_i p_i > eps.
/// This is a sampled certificate, not an exhaustive one.
EpsilonCertificate certify_epsilon(const ExcessDemandModel& model,
                                   const PricePoint& q, double eps,
                                   int grid_density,
                                   const std::vector<EquilibriumRecord>&
                                       equilibria = {});

/// n x (n+1) derivative of the curve map: the n-1 tangential equations
/// B(p)^T [dH/dt | dH/dp] stacked with the sphere constraint row (0 | p^T).
Matrix curve_jacobian(const HomotopyProblem& problem, double t, const Vector& p);

/// Step 9 boundary orientation sign at an endpoint (t in {0,1}, p):
/// computed from sign(det(p, w'_1, ..., w'_{n-1})) with w'_i the tangent
/// images under the t-slice derivative, flipped at t = 0 where the curve
/// tangent is inward. Reproduces the closed forms
///   boundary_sign(1, q)  = (-1)^(n-1),
///   boundary_sign(0, p*) = (-1)^n index(p*).
int boundary_sign(const HomotopyProblem& problem, double t,
                  const PricePoint& p);

/// Generic implicit curve: m-1 equations in m unknowns, x(0) playing the
/// role of the bounded parameter t in [0, 1]. The homotopy zero-set is
/// one instance; tests exercise the tracer on synthetic systems too.
class ImplicitCurve {
 public:
  virtual ~ImplicitCurve() = default;
  virtual int unknowns() const = 0;
  virtual Vector residual(const Vector& x) const = 0;
  virtual Matrix jacobian(const Vector& x) const = 0;  // (m-1) x m
};

struct TracedNode {
  Vector x;
  Vector tangent;
};

struct TracedCurve {
  std::vector<TracedNode> nodes;
  bool closed = false;  // loop
};

/// Pseudo-arclength predictor-corrector along the nullspace direction of
/// the curve Jacobian. Stops on (a) x(0) reaching {0, 1} (endpoint snap),
/// (b) returning to the start with aligned tangent (loop), or
/// (c) max_steps (StepLimitExceeded). Throws RankDeficient when the
/// Jacobian loses row rank and CorrectorDiverged when step halving
/// bottoms out.
TracedCurve trace_curve(const ImplicitCurve& curve, const Vector& start,
                        const Vector& tangent_seed, int max_steps,
                        const StepControl& ctrl);

/// Traces the homotopy component through `start` and classifies it.
/// Every emitted node is checked against the Step 6 confinement
/// guarantee (min_i p_i > eps, unit norm); violations throw
/// PathConfinementViolation.
PathComponent trace_from(const HomotopyProblem& problem, const PathNode& start,
                         int max_steps, const StepControl& ctrl);

/// Start node helpers for the two kinds of boundary seeds.
PathNode endpoint_start(const HomotopyProblem& problem, double t,
                        const PricePoint& p, const StepControl& ctrl);

/// Traces from (1, q) and from every uncovered equilibrium, deduplicates
/// components, and verifies the boundary bookkeeping: exactly one t = 1
/// endpoint, every equilibrium covered exactly once (else CoverageGap),
/// and the boundary signs summing to zero.
std::vector<PathComponent> trace_all(const HomotopyProblem& problem,
                                     const std::vector<EquilibriumRecord>&
                                         equilibria,
                                     int max_steps, const StepControl& ctrl);

/// CSV export, columns exactly:
/// component_id,node_index,t,p_1,...,p_n,residual
void write_trace_csv(std::ostream& out,
                     const std::vector<PathComponent>& components);

}  // namespace regindex
