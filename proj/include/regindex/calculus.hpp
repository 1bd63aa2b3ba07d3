#pragma once

#include "regindex/economy.hpp"
#include "regindex/geometry.hpp"

namespace regindex {

/// An equilibrium p* together with the data backing its index:
/// the residual ||f(p*)||, the bordered determinant g(p*), and
/// index = +1 iff (-1)^n g(p*) > 0.
struct EquilibriumRecord {
  PricePoint price;
  double residual = 0.0;
  double g_value = 0.0;
  int index = 0;
};

inline constexpr double kFdStep = 1e-5;

/// Central-difference Jacobian in ambient coordinates, no renormalization
/// (degree-0 homogeneity makes the radial derivative informative:
/// Df(p) p = 0 in exact arithmetic).
Matrix jacobian_fd(const ExcessDemandModel& model, const Vector& p,
                   double h = kFdStep);

/// Analytic Jacobian when the model carries one, else central differences.
Matrix model_jacobian(const ExcessDemandModel& model, const Vector& p);

/// Relative regularity threshold for condition (v):
/// |g| must exceed 1e-8 * (1 + ||Df||_inf^n).
double regularity_threshold(const Matrix& jac, int n);

/// g(p*) = det [[Df(p*), p*], [p*^T, 0]].
double g_value(const ExcessDemandModel& model, const PricePoint& p_star);

/// +1 if (-1)^n g(p*) > 0, -1 if < 0. Throws NonRegularEquilibrium when
/// |g| is below the regularity threshold (condition (v) fails; the
/// economy is not regular).
int index_of(const ExcessDemandModel& model, const PricePoint& p_star);

/// The tangent-image route to the same index: with A' = Df(p*)(I - p p^T)
/// and a positively oriented tangent frame (x_i), the sign of the
/// bordered determinant equals -sign(det(p, A'x_1, ..., A'x_{n-1})),
/// so index = -(-1)^n sign(det(p, A'x_1, ..., A'x_{n-1})).
int index_via_images(const ExcessDemandModel& model, const PricePoint& p_star);

/// Full record assembly for a converged zero.
EquilibriumRecord make_equilibrium_record(const ExcessDemandModel& model,
                                          const PricePoint& p_star);

}  // namespace regindex
