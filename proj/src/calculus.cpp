#include "regindex/calculus.hpp"

#include <cmath>

namespace regindex {

Matrix jacobian_fd(const ExcessDemandModel& model, const Vector& p, double h) {
  if (h <= 0.0) throw DimensionMismatch("jacobian_fd: h must be positive");
  const int n = model.dimension;
  if (p.size() != n) throw DimensionMismatch("jacobian_fd: dimension mismatch");
  Matrix J(n, n);
  Vector shifted = p;
  for (int j = 0; j < n; ++j) {
    shifted(j) = p(j) + h;
    if (shifted(j) - h <= 0.0 || p(j) - h <= 0.0) {
      throw EvaluationFailure("jacobian_fd: stencil leaves the positive orthant");
    }
    const Vector fp = model.eval(shifted);
    shifted(j) = p(j) - h;
    const Vector fm = model.eval(shifted);
    shifted(j) = p(j);
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

Matrix model_jacobian(const ExcessDemandModel& model, const Vector& p) {
  if (model.has_analytic_jacobian()) return model.jacobian(p);
  return jacobian_fd(model, p);
}

double regularity_threshold(const Matrix& jac, int n) {
  const double inf_norm = jac.cwiseAbs().rowwise().sum().maxCoeff();
  return 1e-8 * (1.0 + std::pow(inf_norm, n));
}

double g_value(const ExcessDemandModel& model, const PricePoint& p_star) {
  return bordered_determinant(model_jacobian(model, p_star.coords()),
                              p_star.coords());
}

int index_of(const ExcessDemandModel& model, const PricePoint& p_star) {
  const Matrix J = model_jacobian(model, p_star.coords());
  const double g = bordered_determinant(J, p_star.coords());
  if (std::abs(g) <= regularity_threshold(J, p_star.dim())) {
    throw NonRegularEquilibrium(
        "bordered determinant below regularity threshold at an equilibrium");
  }
  const double signed_g = (p_star.dim() % 2 == 0) ? g : -g;
  return signed_g > 0.0 ? 1 : -1;
}

int index_via_images(const ExcessDemandModel& model, const PricePoint& p_star) {
  const int n = p_star.dim();
  const Vector& p = p_star.coords();
  const Matrix J = model_jacobian(model, p);
  if (std::abs(bordered_determinant(J, p)) <= regularity_threshold(J, n)) {
    throw NonRegularEquilibrium(
        "bordered determinant below regularity threshold at an equilibrium");
  }
  // Radial correction: the tangent-image identity assumes Ap = 0 exactly.
  const Matrix corrected = J * (Matrix::Identity(n, n) - p * p.transpose());
  const TangentFrame frame = tangent_basis(p_star);
  const Matrix images = corrected * frame.vectors;
  const int s = oriented_sign(p_star, images);
  if (s == 0) {
    throw NonRegularEquilibrium("degenerate tangent images at an equilibrium");
  }
  // sign(g) = -s, and index = sign((-1)^n g).
  const int sign_g = -s;
  return (n % 2 == 0) ? sign_g : -sign_g;
}

EquilibriumRecord make_equilibrium_record(const ExcessDemandModel& model,
                                          const PricePoint& p_star) {
  EquilibriumRecord rec{p_star, model.eval(p_star.coords()).norm(),
                        g_value(model, p_star), 0};
  rec.index = index_of(model, p_star);
  return rec;
}

}  // namespace regindex
