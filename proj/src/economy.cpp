#include "regindex/economy.hpp"

#include <algorithm>
#include <cmath>

namespace regindex {

namespace {

constexpr double kCobbDouglasRhoCutoff = 1e-6;

struct CesData {
  int n = 0;
  std::vector<double> sigma;        // per agent
  std::vector<Vector> shares_pow;   // b_ij = a_ij^sigma_i
  std::vector<Vector> endowment;
};

// Demand of agent i and its price derivative, aggregated into f and Df.
Vector ces_excess(const CesData& d, const Vector& p) {
  Vector f = Vector::Zero(d.n);
  for (std::size_t i = 0; i < d.shares_pow.size(); ++i) {
    const double sigma = d.sigma[i];
    const double wealth = p.dot(d.endowment[i]);
    double denom = 0.0;
    for (int k = 0; k < d.n; ++k) {
      denom += d.shares_pow[i](k) * std::pow(p(k), 1.0 - sigma);
    }
    for (int j = 0; j < d.n; ++j) {
      const double xij =
          wealth * d.shares_pow[i](j) * std::pow(p(j), -sigma) / denom;
      f(j) += xij - d.endowment[i](j);
    }
  }
  return f;
}

Matrix ces_jacobian(const CesData& d, const Vector& p) {
  Matrix J = Matrix::Zero(d.n, d.n);
  for (std::size_t i = 0; i < d.shares_pow.size(); ++i) {
    const double sigma = d.sigma[i];
    const Vector& b = d.shares_pow[i];
    const Vector& e = d.endowment[i];
    const double wealth = p.dot(e);
    double denom = 0.0;
    Vector ddenom(d.n);
    for (int k = 0; k < d.n; ++k) {
      denom += b(k) * std::pow(p(k), 1.0 - sigma);
      ddenom(k) = (1.0 - sigma) * b(k) * std::pow(p(k), -sigma);
    }
    for (int j = 0; j < d.n; ++j) {
      const double numj = b(j) * std::pow(p(j), -sigma);
      for (int l = 0; l < d.n; ++l) {
        double dx = e(l) * numj / denom
                    - wealth * numj * ddenom(l) / (denom * denom);
        if (l == j) {
          dx += -sigma * wealth * b(j) * std::pow(p(j), -sigma - 1.0) / denom;
        }
        J(j, l) += dx;
      }
    }
  }
  return J;
}

}  // namespace

ExcessDemandModel build_ces_economy(const ExchangeEconomySpec& spec) {
  if (spec.agents.empty()) {
    throw InvalidSpec("economy needs at least one agent");
  }
  const int n = spec.goods();
  if (n < 2) throw InvalidSpec("economy needs at least two goods");

  CesData data;
  data.n = n;
  Vector aggregate = Vector::Zero(n);
  for (const AgentSpec& a : spec.agents) {
    if (a.weights.size() != n || a.endowment.size() != n) {
      throw InvalidSpec("agent vectors must all have length = goods");
    }
    if (a.weights.minCoeff() <= 0.0) {
      throw InvalidSpec("agent weights must be strictly positive");
    }
    if (a.rho >= 1.0) throw InvalidSpec("agent rho must be < 1");
    if (a.endowment.minCoeff() < 0.0 || a.endowment.maxCoeff() <= 0.0) {
      throw InvalidSpec("agent endowment must be nonnegative and nonzero");
    }
    // rho -> 0 is Cobb-Douglas, i.e. sigma = 1 exactly.
    const double sigma =
        std::abs(a.rho) < kCobbDouglasRhoCutoff ? 1.0 : 1.0 / (1.0 - a.rho);
    data.sigma.push_back(sigma);
    Vector b(n);
    for (int j = 0; j < n; ++j) b(j) = std::pow(a.weights(j), sigma);
    data.shares_pow.push_back(std::move(b));
    data.endowment.push_back(a.endowment);
    aggregate += a.endowment;
  }
  if (aggregate.minCoeff() <= 0.0) {
    throw InvalidSpec("aggregate endowment must be strictly positive");
  }

  ExcessDemandModel model;
  model.dimension = n;
  model.label = "ces-economy";
  model.eval = [data](const Vector& p) {
    if (p.size() != data.n || p.minCoeff() <= 0.0) {
      throw EvaluationFailure("CES model requires strictly positive prices");
    }
    return ces_excess(data, p);
  };
  model.jacobian = [data](const Vector& p) {
    if (p.size() != data.n || p.minCoeff() <= 0.0) {
      throw EvaluationFailure("CES model requires strictly positive prices");
    }
    return ces_jacobian(data, p);
  };
  return model;
}

Vector random_interior_point(int n, double min_coord, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = std::abs(gauss(rng)) + 1e-12;
    x /= x.norm();
    if (x.minCoeff() >= min_coord) return x;
  }
  throw EvaluationFailure("random_interior_point: rejection sampling failed");
}

double check_walras(const ExcessDemandModel& model, int sample_count,
                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < sample_count; ++k) {
    const Vector p = random_interior_point(model.dimension, 0.01, rng);
    const Vector f = model.eval(p);
    const double residual = std::abs(p.dot(f)) / (1.0 + f.norm());
    worst = std::max(worst, residual);
  }
  return worst;
}

double check_homogeneity(const ExcessDemandModel& model, int sample_count,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double scales[] = {0.5, 2.0, 10.0};
  double worst = 0.0;
  for (int k = 0; k < sample_count; ++k) {
    const Vector p = random_interior_point(model.dimension, 0.01, rng);
    const Vector f = model.eval(p);
    for (double a : scales) {
      worst = std::max(worst, (model.eval(a * p) - f).lpNorm<Eigen::Infinity>());
    }
  }
  return worst;
}

double check_lower_bound(const ExcessDemandModel& model, int sample_count,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double lowest = 0.0;
  // Interior samples.
  for (int k = 0; k < sample_count; ++k) {
    const Vector p = random_interior_point(model.dimension, 0.01, rng);
    lowest = std::min(lowest, model.eval(p).minCoeff());
  }
  // Near-boundary ladder down to min coordinate 1e-6.
  const int n = model.dimension;
  for (int face = 0; face < n; ++face) {
    for (double d = 1e-1; d >= 0.9e-6; d *= 0.1) {
      Vector p(n);
      const double rest = std::sqrt((1.0 - d * d) / (n - 1));
      p.setConstant(rest);
      p(face) = d;
      lowest = std::min(lowest, model.eval(p).minCoeff());
    }
  }
  return -lowest;
}

std::vector<BoundaryRay> default_boundary_rays(int n) {
  std::vector<BoundaryRay> rays;
  for (int face = 0; face < n; ++face) {
    BoundaryRay ray;
    ray.face = face;
    for (double d = 1e-1; d >= 0.9e-8; d *= 0.1) {
      Vector p(n);
      p.setConstant(std::sqrt((1.0 - d * d) / (n - 1)));
      p(face) = d;
      ray.points.push_back(std::move(p));
    }
    ray.limit = Vector::Constant(n, std::sqrt(1.0 / (n - 1)));
    ray.limit(face) = 0.0;
    rays.push_back(std::move(ray));
  }
  return rays;
}

BlowupReport check_boundary_blowup(const ExcessDemandModel& model,
                                   const std::vector<BoundaryRay>& rays,
                                   double growth_ratio_threshold) {
  BlowupReport report;
  if (model.defined_on_closure || rays.empty()) {
    // Continuous up to the boundary: condition (iii) is not applicable
    // and the check passes vacuously.
    report.vacuous = true;
    report.pass = true;
    return report;
  }
  report.pass = true;
  for (const BoundaryRay& ray : rays) {
    RayCheck check;
    check.ray = ray.face;
    std::vector<Vector> values;
    for (const Vector& p : ray.points) {
      values.push_back(model.eval(p));
      check.norms.push_back(values.back().norm());
    }
    check.increasing = true;
    const std::size_t tail_start = check.norms.size() / 2;
    for (std::size_t k = tail_start + 1; k < check.norms.size(); ++k) {
      if (check.norms[k] <= check.norms[k - 1]) check.increasing = false;
    }
    check.growth_ratio = check.norms.back() / std::max(check.norms.front(), 1e-300);
    // Limit-direction property of the normalized tail.
    check.direction_min_component = 0.0;
    check.direction_dot_limit = 0.0;
    // The limit direction is a k -> infinity property; judge it on the
    // two deepest ladder points.
    const std::size_t dir_start =
        values.size() >= 2 ? values.size() - 2 : 0;
    for (std::size_t k = dir_start; k < values.size(); ++k) {
      const Vector z = values[k] / std::max(check.norms[k], 1e-300);
      check.direction_min_component =
          std::min(check.direction_min_component, z.minCoeff());
      check.direction_dot_limit =
          std::max(check.direction_dot_limit, std::abs(z.dot(ray.limit)));
    }
    check.pass = check.increasing &&
                 check.growth_ratio >= growth_ratio_threshold &&
                 check.direction_min_component >= -1e-6 &&
                 check.direction_dot_limit <= 1e-4;
    report.pass = report.pass && check.pass;
    report.rays.push_back(std::move(check));
  }
  return report;
}

VerificationReport verify_hypotheses(const ExcessDemandModel& model,
                                     std::uint64_t seed) {
  VerificationReport report;
  report.walras_max_residual = check_walras(model, 200, seed);
  report.walras_ok = report.walras_max_residual <= kWalrasTol;
  report.homogeneity_max_residual = check_homogeneity(model, 200, seed + 1);
  report.homogeneity_ok = report.homogeneity_max_residual <= kWalrasTol;
  report.lower_bound_interior = check_lower_bound(model, 200, seed + 2);
  report.lower_bound_estimate = report.lower_bound_interior;
  {
    // Unbounded-below detection: compare the bound seen at boundary
    // distance 1e-3 with the one at 1e-6.
    const int n = model.dimension;
    double s_mid = 0.0, s_near = 0.0;
    for (int face = 0; face < n; ++face) {
      for (double d : {1e-3, 1e-6}) {
        Vector p(n);
        p.setConstant(std::sqrt((1.0 - d * d) / (n - 1)));
        p(face) = d;
        const double s = -model.eval(p).minCoeff();
        if (d == 1e-3) s_mid = std::max(s_mid, s);
        else s_near = std::max(s_near, s);
      }
    }
    report.lower_bound_estimate = std::max(report.lower_bound_interior, s_near);
    report.lower_bound_ok =
        std::isfinite(report.lower_bound_estimate) &&
        s_near <= 5.0 * s_mid + 1.0;
  }
  report.blowup =
      check_boundary_blowup(model, model.defined_on_closure
                                       ? std::vector<BoundaryRay>{}
                                       : default_boundary_rays(model.dimension));
  report.blowup_ok = report.blowup.pass;
  return report;
}

}  // namespace regindex
