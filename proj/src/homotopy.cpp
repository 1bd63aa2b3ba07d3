#include "regindex/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace regindex {

namespace {

constexpr double kEndpointSnapTol = 1e-8;
constexpr double kMatchRadius = 1e-6;

// The homotopy zero-set as a generic implicit curve in x = (t, p).
class HomotopyCurve final : public ImplicitCurve {
 public:
  explicit HomotopyCurve(const HomotopyProblem& problem) : problem_(problem) {}

  int unknowns() const override { return problem_.model.dimension + 1; }

  Vector residual(const Vector& x) const override {
    const int n = problem_.model.dimension;
    const double t = x(0);
    const Vector p = x.tail(n);
    const Vector h = homotopy_eval(problem_, t, p);
    const Matrix basis = orthonormal_complement(p / p.norm());
    Vector r(n);
    r.head(n - 1) = basis.transpose() * h;
    r(n - 1) = 0.5 * (p.squaredNorm() - 1.0);
    return r;
  }

  Matrix jacobian(const Vector& x) const override {
    const int n = problem_.model.dimension;
    return curve_jacobian(problem_, x(0), x.tail(n));
  }

 private:
  const HomotopyProblem& problem_;
};

Vector curve_tangent(const ImplicitCurve& curve, const Vector& x,
                     const StepControl& ctrl) {
  const Matrix J = curve.jacobian(x);
  Eigen::JacobiSVD<Matrix> svd(J, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < ctrl.rank_tol * sv(0)) {
    throw RankDeficient("curve Jacobian lost full row rank");
  }
  Vector tau = svd.matrixV().col(curve.unknowns() - 1);
  return tau / tau.norm();
}

struct CorrectorResult {
  Vector x;
  int iterations = 0;
  bool ok = false;
};

// Newton on [residual; tau . (x - x_pred)] = 0.
CorrectorResult correct_on_hyperplane(const ImplicitCurve& curve,
                                      const Vector& x_pred, const Vector& tau,
                                      const StepControl& ctrl) {
  const int m = curve.unknowns();
  CorrectorResult result;
  Vector y = x_pred;
  double prev_norm = 1e300;
  int non_contracting = 0;
  for (int it = 0; it < ctrl.max_newton; ++it) {
    const Vector r = curve.residual(y);
    const double rnorm = r.lpNorm<Eigen::Infinity>();
    if (rnorm <= ctrl.corrector_tol) {
      result.x = y;
      result.iterations = it;
      result.ok = true;
      return result;
    }
    if (rnorm >= prev_norm && ++non_contracting >= 2) return result;
    prev_norm = rnorm;
    Matrix aug(m, m);
    aug.topRows(m - 1) = curve.jacobian(y);
    aug.row(m - 1) = tau.transpose();
    Vector rhs(m);
    rhs.head(m - 1) = r;
    rhs(m - 1) = tau.dot(y - x_pred);
    Eigen::FullPivLU<Matrix> lu(aug);
    if (!lu.isInvertible()) return result;
    y -= lu.solve(rhs);
  }
  return result;
}

// Newton in x(1..m-1) with x(0) held fixed.
CorrectorResult correct_on_slice(const ImplicitCurve& curve, const Vector& x0,
                                 const StepControl& ctrl) {
  const int m = curve.unknowns();
  CorrectorResult result;
  Vector y = x0;
  for (int it = 0; it < 2 * ctrl.max_newton; ++it) {
    const Vector r = curve.residual(y);
    if (r.lpNorm<Eigen::Infinity>() <= ctrl.corrector_tol) {
      result.x = y;
      result.iterations = it;
      result.ok = true;
      return result;
    }
    const Matrix J = curve.jacobian(y).rightCols(m - 1);
    Eigen::FullPivLU<Matrix> lu(J);
    if (!lu.isInvertible()) return result;
    y.tail(m - 1) -= lu.solve(r);
  }
  return result;
}

bool lexicographic_less(const Vector& a, const Vector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

}  // namespace

Vector homotopy_eval(const HomotopyProblem& problem, double t, const Vector& p) {
  return (1.0 - t) * problem.model.eval(p) + t * eval_fq(problem.q, p);
}

Matrix curve_jacobian(const HomotopyProblem& problem, double t,
                      const Vector& p) {
  const int n = problem.model.dimension;
  const Vector dt = eval_fq(problem.q, p) - problem.model.eval(p);
  const Matrix dp = (1.0 - t) * model_jacobian(problem.model, p) +
                    t * jac_fq(problem.q, p);
  const Matrix basis = orthonormal_complement(p / p.norm());
  Matrix J = Matrix::Zero(n, n + 1);
  J.block(0, 0, n - 1, 1) = basis.transpose() * dt;
  J.block(0, 1, n - 1, n) = basis.transpose() * dp;
  J(n - 1, 0) = 0.0;
  J.block(n - 1, 1, 1, n) = p.transpose();
  return J;
}

EpsilonCertificate certify_epsilon(const ExcessDemandModel& model,
                                   const PricePoint& q, double eps,
                                   int grid_density,
                                   const std::vector<EquilibriumRecord>&
                                       equilibria) {
  const int n = model.dimension;
  if (eps <= 0.0 || eps >= q.min_coord()) {
    throw CertificationFailed("certify_epsilon: need 0 < eps < min_i q_i");
  }
  if (grid_density < 10) {
    throw CertificationFailed("certify_epsilon: grid_density must be >= 10");
  }

  EpsilonCertificate cert;
  cert.epsilon = eps;
  cert.pass = true;

  // Containment: every known equilibrium strictly inside S_eps.
  for (const EquilibriumRecord& rec : equilibria) {
    if (rec.price.min_coord() <= eps) {
      cert.pass = false;
      cert.min_norm = 0.0;
      cert.witness_t = 0.0;
      cert.witness_p = rec.price.coords();
      return cert;
    }
  }

  // Face sample points of dS_eps.
  std::vector<Vector> face_points;
  const double radius = std::sqrt(1.0 - eps * eps);
  if (n == 2) {
    for (int face = 0; face < 2; ++face) {
      Vector p(2);
      p(face) = eps;
      p(1 - face) = radius;
      face_points.push_back(std::move(p));
    }
  } else {
    static const double primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                    31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
    int per_face = 1;
    for (int d = 0; d < n - 2; ++d) {
      per_face = std::min(per_face * grid_density, 4096);
    }
    for (int face = 0; face < n; ++face) {
      int accepted = 0;
      for (int k = 1; accepted < per_face && k <= 100 * per_face; ++k) {
        Vector u(n - 1);
        for (int i = 0; i < n - 1; ++i) {
          u(i) = std::fmod(k * std::sqrt(primes[i % 20]), 1.0) + 0.02;
        }
        u *= radius / u.norm();
        Vector p(n);
        int idx = 0;
        for (int i = 0; i < n; ++i) p(i) = (i == face) ? eps : u(idx++);
        if (p.segment(0, n).minCoeff() < eps) continue;
        face_points.push_back(std::move(p));
        ++accepted;
      }
    }
  }

  double min_norm = 1e300;
  double max_scale = 0.0;
  const int t_count = 64;
  for (const Vector& p : face_points) {
    const Vector f = model.eval(p);
    const Vector fq = eval_fq(q, p);
    max_scale = std::max(max_scale, f.norm() + fq.norm());
    for (int i = 0; i < t_count; ++i) {
      const double t = static_cast<double>(i) / (t_count - 1);
      const double norm = ((1.0 - t) * f + t * fq).norm();
      if (norm < min_norm) {
        min_norm = norm;
        cert.witness_t = t;
        cert.witness_p = p;
      }
    }
  }
  cert.min_norm = min_norm;
  // Safety margin: 3x the evaluation noise scale of the sampled fields.
  cert.threshold = 3.0 * 1e-12 * std::max(max_scale, 1.0);
  cert.pass = min_norm > cert.threshold;
  return cert;
}

int boundary_sign(const HomotopyProblem& problem, double t,
                  const PricePoint& p) {
  const int n = problem.model.dimension;
  if (std::abs(t) > kEndpointSnapTol && std::abs(t - 1.0) > kEndpointSnapTol) {
    throw DimensionMismatch("boundary_sign: t must be 0 or 1");
  }
  const Matrix slice_jac = (1.0 - t) * model_jacobian(problem.model, p.coords()) +
                           t * jac_fq(problem.q, p.coords());
  const Matrix corrected =
      slice_jac * (Matrix::Identity(n, n) - p.coords() * p.coords().transpose());
  const TangentFrame frame = tangent_basis(p);
  const int s = oriented_sign(p, Matrix(corrected * frame.vectors));
  if (s == 0) {
    throw NonRegularEquilibrium("degenerate tangent images at a path endpoint");
  }
  // The curve tangent is outward at t = 1 and inward at t = 0; the
  // inward case flips the induced boundary orientation.
  return t >= 0.5 ? s : -s;
}

TracedCurve trace_curve(const ImplicitCurve& curve, const Vector& start,
                        const Vector& tangent_seed, int max_steps,
                        const StepControl& ctrl) {
  TracedCurve traced;
  Vector x = start;
  Vector tau = curve_tangent(curve, x, ctrl);
  if (tau.dot(tangent_seed) < 0.0) tau = -tau;
  traced.nodes.push_back({x, tau});

  const Vector x_origin = x;
  const Vector tau_origin = tau;
  double h = ctrl.initial_step;
  int easy_streak = 0;
  double max_dist = 0.0;

  for (int step = 0; step < max_steps; ++step) {
    // Endpoint snap: clamp the predictor when it would cross t in {0, 1}.
    const double t_next = x(0) + h * tau(0);
    const bool crosses =
        std::abs(tau(0)) > 1e-14 && (t_next < 0.0 || t_next > 1.0);
    if (crosses) {
      const double boundary = t_next > 1.0 ? 1.0 : 0.0;
      const double h_hit = (boundary - x(0)) / tau(0);
      Vector x_pred = x + h_hit * tau;
      x_pred(0) = boundary;
      const CorrectorResult end = correct_on_slice(curve, x_pred, ctrl);
      if (end.ok) {
        Vector end_tau = tau;
        try {
          end_tau = curve_tangent(curve, end.x, ctrl);
          if (end_tau.dot(tau) < 0.0) end_tau = -end_tau;
        } catch (const RankDeficient&) {
          // Keep the incoming tangent; the endpoint itself is certified.
        }
        traced.nodes.push_back({end.x, end_tau});
        return traced;
      }
      h *= 0.5;
      if (h < ctrl.min_step) {
        throw CorrectorDiverged("endpoint snap corrector failed");
      }
      continue;
    }

    const Vector x_pred = x + h * tau;
    CorrectorResult corrected = correct_on_hyperplane(curve, x_pred, tau, ctrl);
    // A correction comparable to the step itself means the predictor left
    // the basin of its own branch (risk of hopping to a nearby one near a
    // fold); treat it as a failure and halve.
    if (corrected.ok && (corrected.x - x_pred).norm() > 0.5 * h) {
      corrected.ok = false;
    }
    if (!corrected.ok) {
      h *= 0.5;
      easy_streak = 0;
      if (h < ctrl.min_step) {
        throw CorrectorDiverged("corrector failed at the minimum step size");
      }
      continue;
    }
    Vector x_new = corrected.x;
    if (x_new(0) < 0.0 || x_new(0) > 1.0) {
      // Corrected point slipped past the boundary; snap on the slice.
      Vector snap = x_new;
      snap(0) = x_new(0) > 1.0 ? 1.0 : 0.0;
      const CorrectorResult end = correct_on_slice(curve, snap, ctrl);
      if (!end.ok) {
        h *= 0.5;
        if (h < ctrl.min_step) {
          throw CorrectorDiverged("boundary snap corrector failed");
        }
        continue;
      }
      traced.nodes.push_back({end.x, tau});
      return traced;
    }

    Vector tau_new = curve_tangent(curve, x_new, ctrl);
    if (tau_new.dot(tau) < 0.0) tau_new = -tau_new;
    x = x_new;
    tau = tau_new;
    traced.nodes.push_back({x, tau});

    // Loop closure: the path must leave a neighborhood of the start and
    // come back, aligned with the original tangent. The departure
    // requirement rules out spurious closures on short, nearly straight
    // arcs whose early nodes all sit within a few steps of the origin.
    const double dist = (x - x_origin).norm();
    max_dist = std::max(max_dist, dist);
    const double close_radius = 2.0 * h;
    if (traced.nodes.size() > 10 && dist < close_radius &&
        max_dist > 5.0 * close_radius && tau.dot(tau_origin) > 0.9) {
      traced.closed = true;
      traced.nodes.push_back({x_origin, tau_origin});
      return traced;
    }

    if (corrected.iterations <= 3) {
      if (++easy_streak >= 4) {
        h = std::min(2.0 * h, ctrl.max_step);
        easy_streak = 0;
      }
    } else {
      easy_streak = 0;
    }
  }
  throw StepLimitExceeded("trace exceeded max_steps");
}

PathNode endpoint_start(const HomotopyProblem& problem, double t,
                        const PricePoint& p, const StepControl& ctrl) {
  const int n = problem.model.dimension;
  HomotopyCurve curve(problem);
  Vector x(n + 1);
  x(0) = t;
  x.tail(n) = p.coords();
  Vector tau = curve_tangent(curve, x, ctrl);
  if (std::abs(tau(0)) < 1e-8) {
    throw RankDeficient("endpoint tangent has no t-component");
  }
  // Into the domain: decreasing t at t = 1, increasing at t = 0.
  const double wanted = t >= 0.5 ? -1.0 : 1.0;
  if (tau(0) * wanted < 0.0) tau = -tau;
  return PathNode{t, p.coords(), tau, homotopy_eval(problem, t, p.coords()).norm()};
}

PathComponent trace_from(const HomotopyProblem& problem, const PathNode& start,
                         int max_steps, const StepControl& ctrl) {
  const int n = problem.model.dimension;
  HomotopyCurve curve(problem);
  Vector x0(n + 1);
  x0(0) = start.t;
  x0.tail(n) = start.p;

  TracedCurve traced = trace_curve(curve, x0, start.tangent, max_steps, ctrl);
  const bool started_interior = start.t > kEndpointSnapTol &&
                                start.t < 1.0 - kEndpointSnapTol;
  if (!traced.closed && started_interior) {
    // The other half of the arc, traced the opposite way and spliced on.
    TracedCurve back =
        trace_curve(curve, x0, Vector(-start.tangent), max_steps, ctrl);
    std::reverse(back.nodes.begin(), back.nodes.end());
    back.nodes.pop_back();  // the shared start node
    back.nodes.insert(back.nodes.end(), traced.nodes.begin(),
                      traced.nodes.end());
    traced.nodes = std::move(back.nodes);
  }

  PathComponent component;
  component.kind = traced.closed ? PathKind::loop : PathKind::arc;
  for (const TracedNode& node : traced.nodes) {
    PathNode out;
    out.t = node.x(0);
    out.p = node.x.tail(n);
    out.tangent = node.tangent;
    out.residual = homotopy_eval(problem, out.t, out.p).norm();
    if (out.p.minCoeff() <= problem.epsilon) {
      throw PathConfinementViolation("path node escaped S_eps");
    }
    if (std::abs(out.p.norm() - 1.0) > 1e-10) {
      throw PathConfinementViolation("path node left the sphere");
    }
    component.nodes.push_back(std::move(out));
  }

  if (component.kind == PathKind::arc) {
    for (const PathNode* node : {&component.nodes.front(),
                                 &component.nodes.back()}) {
      const double snapped = node->t >= 0.5 ? 1.0 : 0.0;
      if (std::abs(node->t - snapped) > kEndpointSnapTol) {
        throw PathConfinementViolation("arc endpoint not on t in {0, 1}");
      }
      ArcEndpoint endpoint;
      endpoint.t = snapped;
      endpoint.p = node->p;
      endpoint.boundary_sign =
          boundary_sign(problem, snapped, project_to_sphere(node->p));
      component.endpoints.push_back(std::move(endpoint));
    }
  }
  return component;
}

std::vector<PathComponent> trace_all(const HomotopyProblem& problem,
                                     const std::vector<EquilibriumRecord>&
                                         equilibria,
                                     int max_steps, const StepControl& ctrl) {
  std::vector<PathComponent> components;
  std::vector<bool> covered(equilibria.size(), false);

  auto mark_covered = [&](const PathComponent& component) {
    for (const ArcEndpoint& endpoint : component.endpoints) {
      if (endpoint.t > 0.5) continue;
      for (std::size_t i = 0; i < equilibria.size(); ++i) {
        if (spherical_distance(endpoint.p, equilibria[i].price.coords()) <=
            kMatchRadius) {
          if (covered[i]) {
            throw CoverageGap("equilibrium matched by two arc endpoints");
          }
          covered[i] = true;
        }
      }
    }
  };

  components.push_back(trace_from(
      problem, endpoint_start(problem, 1.0, problem.q, ctrl), max_steps, ctrl));
  mark_covered(components.back());

  for (std::size_t i = 0; i < equilibria.size(); ++i) {
    if (covered[i]) continue;
    components.push_back(
        trace_from(problem,
                   endpoint_start(problem, 0.0, equilibria[i].price, ctrl),
                   max_steps, ctrl));
    mark_covered(components.back());
  }

  for (std::size_t i = 0; i < equilibria.size(); ++i) {
    if (!covered[i]) {
      throw CoverageGap("an equilibrium is not an endpoint of any traced arc");
    }
  }
  int t1_endpoints = 0;
  for (const PathComponent& component : components) {
    for (const ArcEndpoint& endpoint : component.endpoints) {
      if (endpoint.t > 0.5) ++t1_endpoints;
    }
  }
  if (t1_endpoints != 1) {
    throw CoverageGap("expected exactly one t = 1 endpoint across all arcs");
  }

  // Canonical order: arcs by (first endpoint t, lexicographic p), loops last.
  for (PathComponent& component : components) {
    std::sort(component.endpoints.begin(), component.endpoints.end(),
              [](const ArcEndpoint& a, const ArcEndpoint& b) {
                if (a.t != b.t) return a.t < b.t;
                return lexicographic_less(a.p, b.p);
              });
  }
  std::sort(components.begin(), components.end(),
            [](const PathComponent& a, const PathComponent& b) {
              const bool a_arc = a.kind == PathKind::arc;
              const bool b_arc = b.kind == PathKind::arc;
              if (a_arc != b_arc) return a_arc;
              if (!a_arc) return lexicographic_less(a.nodes.front().p,
                                                    b.nodes.front().p);
              if (a.endpoints.front().t != b.endpoints.front().t) {
                return a.endpoints.front().t < b.endpoints.front().t;
              }
              return lexicographic_less(a.endpoints.front().p,
                                        b.endpoints.front().p);
            });
  return components;
}

void write_trace_csv(std::ostream& out,
                     const std::vector<PathComponent>& components) {
  if (components.empty()) {
    out << "component_id,node_index,t,residual\n";
    return;
  }
  const int n = static_cast<int>(components.front().nodes.front().p.size());
  out << "component_id,node_index,t";
  for (int i = 1; i <= n; ++i) out << ",p_" << i;
  out << ",residual\n";
  char buf[64];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (std::size_t c = 0; c < components.size(); ++c) {
    const auto& nodes = components[c].nodes;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      out << c << ',' << k << ',';
      emit(nodes[k].t);
      for (int i = 0; i < n; ++i) {
        out << ',';
        emit(nodes[k].p(i));
      }
      out << ',';
      emit(nodes[k].residual);
      out << '\n';
    }
  }
}

}  // namespace regindex
