#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "regindex/calculus.hpp"
#include "regindex/economy.hpp"
#include "regindex/fixtures.hpp"
#include "regindex/reference_field.hpp"
#include "regindex/solver.hpp"

using namespace regindex;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ExcessDemandModel tangential_constant_model(const Vector& v) {
  ExcessDemandModel model;
  model.dimension = static_cast<int>(v.size());
  model.label = "tangential-constant";
  model.defined_on_closure = true;
  model.eval = [v](const Vector& p) {
    const Vector u = p / p.norm();
    return Vector(v - v.dot(u) * u);
  };
  return model;
}

}  // namespace

TEST_CASE("build_ces_economy rejects malformed specs") {
  CHECK_THROWS_AS(build_ces_economy(ExchangeEconomySpec{}), InvalidSpec);

  ExchangeEconomySpec spec = fixtures::cobb_douglas_spec();
  spec.agents[0].rho = 1.0;
  CHECK_THROWS_AS(build_ces_economy(spec), InvalidSpec);

  spec = fixtures::cobb_douglas_spec();
  spec.agents[0].weights(0) = 0.0;
  CHECK_THROWS_AS(build_ces_economy(spec), InvalidSpec);

  spec = fixtures::cobb_douglas_spec();
  spec.agents[0].endowment(0) = 0.0;  // good 1 vanishes in the aggregate
  CHECK_THROWS_AS(build_ces_economy(spec), InvalidSpec);

  spec = fixtures::cobb_douglas_spec();
  spec.agents[0].weights = Vector::Ones(3);
  CHECK_THROWS_AS(build_ces_economy(spec), InvalidSpec);
}

TEST_CASE("Cobb-Douglas fixture has its closed-form equilibrium") {
  const ExcessDemandModel model = fixtures::builtin_model("cobb-douglas-2");
  const Vector p_star = (Vector(2) << kInvSqrt2, kInvSqrt2).finished();
  CHECK(model.eval(p_star).norm() <= 1e-12);
}

TEST_CASE("Walras and homogeneity hold on every CES fixture") {
  for (const char* name : {"cobb-douglas-2", "ces-3eq", "ces-near-fold"}) {
    const ExcessDemandModel model = fixtures::builtin_model(name);
    std::mt19937_64 rng(101);
    for (int k = 0; k < 100; ++k) {
      const Vector p = random_interior_point(model.dimension, 0.001, rng);
      const Vector f = model.eval(p);
      CHECK(std::abs(p.dot(f)) <= 1e-10);
      CHECK((model.eval(2.0 * p) - f).lpNorm<Eigen::Infinity>() <= 1e-10);
    }
    CHECK(check_walras(model, 100, 5) <= 1e-10);
    CHECK(check_homogeneity(model, 100, 5) <= 1e-10);
  }
}

TEST_CASE("analytic CES Jacobian matches central differences") {
  for (const char* name : {"cobb-douglas-2", "ces-3eq"}) {
    const ExcessDemandModel model = fixtures::builtin_model(name);
    REQUIRE(model.has_analytic_jacobian());
    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
      const Vector p = random_interior_point(model.dimension, 0.05, rng);
      const Matrix diff = model.jacobian(p) - jacobian_fd(model, p);
      CHECK(diff.lpNorm<Eigen::Infinity>() <= 1e-5);
    }
  }
}

TEST_CASE("mirrored CES family at rho = -4 has exactly three equilibria") {
  const ExcessDemandModel model = fixtures::builtin_model("ces-3eq");
  const auto zeros = grid_scan_oracle(model, 1e-3, 1e-5);
  REQUIRE(zeros.size() == 3);
  // The middle one is the symmetric point.
  CHECK(spherical_distance(
            zeros[1].coords(),
            (Vector(2) << kInvSqrt2, kInvSqrt2).finished()) <= 1e-6);
}

TEST_CASE("check_walras flags a non-Walrasian field") {
  const ExcessDemandModel broken = fixtures::builtin_model("broken-walras");
  const double residual = check_walras(broken, 100, 3);
  CHECK(residual > 1e-3);  // residual ~ p_1 / (1 + 1)
  CHECK(check_walras(reference_field_model(
                         project_to_sphere((Vector(3) << 1, 1, 1).finished())),
                     100, 3) <= 1e-14);
}

TEST_CASE("check_homogeneity flags a non-homogeneous field") {
  const ExcessDemandModel broken = fixtures::builtin_model("broken-homogeneity");
  CHECK(check_homogeneity(broken, 100, 3) > 1.0);

  const PricePoint q = project_to_sphere((Vector(2) << 0.6, 0.8).finished());
  CHECK(check_homogeneity(reference_field_model(q), 100, 3) <= 1e-12);
}

TEST_CASE("check_lower_bound is finite for exchange economies") {
  // Excess demand of a pure exchange economy is bounded below by minus
  // the aggregate endowment, here (1, 1).
  const ExcessDemandModel model = fixtures::builtin_model("cobb-douglas-2");
  const double s = check_lower_bound(model, 200, 9);
  CHECK(s >= 0.0);
  CHECK(s <= 1.0 + 1e-9);

  const PricePoint q = project_to_sphere((Vector(2) << 0.6, 0.8).finished());
  CHECK(std::isfinite(check_lower_bound(reference_field_model(q), 200, 9)));
}

TEST_CASE("verify_hypotheses flags a field unbounded below") {
  ExcessDemandModel model;
  model.dimension = 2;
  model.label = "reciprocal";
  model.eval = [](const Vector& p) {
    return Vector((Vector(2) << -1.0 / p(0), -1.0 / p(1)).finished());
  };
  const VerificationReport report = verify_hypotheses(model, 1);
  CHECK_FALSE(report.lower_bound_ok);
}

TEST_CASE("boundary blowup holds along every default ray of the fixtures") {
  for (const char* name : {"cobb-douglas-2", "ces-3eq"}) {
    const ExcessDemandModel model = fixtures::builtin_model(name);
    const BlowupReport report =
        check_boundary_blowup(model, default_boundary_rays(model.dimension));
    CHECK(report.pass);
    CHECK_FALSE(report.vacuous);
    for (const RayCheck& ray : report.rays) {
      CHECK(ray.increasing);
      CHECK(ray.growth_ratio >= 10.0);
      CHECK(ray.direction_min_component >= -1e-6);
      CHECK(ray.direction_dot_limit <= 1e-4);
    }
  }
}

TEST_CASE("Cobb-Douglas excess demand exceeds 1e6 before p_1 = 1e-8") {
  const ExcessDemandModel model = fixtures::builtin_model("cobb-douglas-2");
  const BlowupReport report =
      check_boundary_blowup(model, default_boundary_rays(2));
  for (const RayCheck& ray : report.rays) {
    CHECK(ray.norms.back() > 1e6);
  }
}

TEST_CASE("blowup check is vacuous for fields on the closed sphere") {
  const PricePoint q = project_to_sphere((Vector(2) << 0.6, 0.8).finished());
  const ExcessDemandModel model = reference_field_model(q);
  REQUIRE(model.defined_on_closure);
  const BlowupReport report = check_boundary_blowup(model, {});
  CHECK(report.vacuous);
  CHECK(report.pass);
}

TEST_CASE("a bounded tangential field fails the blowup check") {
  const Vector v = (Vector(3) << 1.0, 2.0, 3.0).finished();
  ExcessDemandModel model = tangential_constant_model(v);
  model.defined_on_closure = false;  // force the rays to be evaluated
  const BlowupReport report =
      check_boundary_blowup(model, default_boundary_rays(3));
  CHECK_FALSE(report.pass);
}

TEST_CASE("verify_hypotheses verdicts across the fixture zoo") {
  for (const char* name : {"cobb-douglas-2", "ces-3eq", "reference-field"}) {
    CHECK(verify_hypotheses(fixtures::builtin_model(name), 1).passed());
  }
  CHECK_FALSE(
      verify_hypotheses(fixtures::builtin_model("broken-walras"), 1).walras_ok);
  CHECK_FALSE(verify_hypotheses(fixtures::builtin_model("broken-homogeneity"), 1)
                  .homogeneity_ok);
  CHECK_FALSE(verify_hypotheses(fixtures::builtin_model("bounded-boundary"), 1)
                  .blowup_ok);
}

TEST_CASE("check results are deterministic given the seed") {
  const ExcessDemandModel model = fixtures::builtin_model("ces-3eq");
  CHECK(check_walras(model, 50, 42) == check_walras(model, 50, 42));
  CHECK(check_lower_bound(model, 50, 42) == check_lower_bound(model, 50, 42));
}
