#pragma once

#include <random>
#include <vector>

#include "regindex/economy.hpp"
#include "regindex/geometry.hpp"

namespace regindex {

/// The benchmark vector field f^q(p) = (||p||/(p.q)) q - p/||p||.
/// Its unique zero on the sphere is q, with index +1.
Vector eval_fq(const PricePoint& q, const Vector& p);

/// Analytic Jacobian of f^q at p:
///   (1/(r s)) q p^T - (r/s^2) q q^T - (1/r) I + (1/r^3) p p^T,
/// with r = ||p||, s = p.q. At p = q this is q q^T - I, so
/// v^T Df^q(q) v = -||v||^2 on the tangent space.
Matrix jac_fq(const PricePoint& q, const Vector& p);

/// True iff (-1)^n * det [[Df^q(q), q], [q^T, 0]] > 0.
bool certify_eq1(const PricePoint& q);

/// Exhaustive low-dimensional scan for zeros of f^q on S_eps.
/// Only n in {2, 3} is supported; throws ScanInfeasible otherwise.
std::vector<PricePoint> unique_zero_scan(const PricePoint& q, double resolution,
                                         double eps = 0.01);

/// f^q wrapped as an ExcessDemandModel (analytic Jacobian attached,
/// defined on the closed sphere).
ExcessDemandModel reference_field_model(const PricePoint& q);

/// Uniform-ish draw of q on S_eps' via normalized absolute Gaussians,
/// rejected until min_i q_i >= eps_prime.
PricePoint draw_reference_point(int n, double eps_prime, std::mt19937_64& rng);

}  // namespace regindex
