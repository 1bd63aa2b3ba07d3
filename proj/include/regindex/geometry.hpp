#pragma once

#include <Eigen/Dense>

#include "regindex/errors.hpp"

namespace regindex {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Spherical (geodesic) distance between two unit vectors.
double spherical_distance(const Vector& a, const Vector& b);

/// A strictly positive unit-norm price vector, i.e. a point of the
/// positive unit sphere S.
class PricePoint {
 public:
  explicit PricePoint(Vector coords);

  const Vector& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  double min_coord() const { return coords_.minCoeff(); }

  static constexpr double kUnitTolerance = 1e-12;

 private:
  Vector coords_;
};

/// Positively oriented orthonormal basis of the tangent space
/// {v : v.p = 0} at a sphere point p. Columns of `vectors` are the
/// n-1 basis vectors; det(p, v_1, ..., v_{n-1}) > 0.
struct TangentFrame {
  PricePoint base;
  Matrix vectors;  // n x (n-1), orthonormal columns, all orthogonal to base
};

/// Normalize a strictly positive vector onto the sphere.
/// Throws NonPositiveInput if any coordinate is <= 0.
PricePoint project_to_sphere(const Vector& x);

/// Orthonormal basis of the orthogonal complement of a unit vector q,
/// as the columns of an n x (n-1) matrix. Works for any unit vector
/// (no positivity requirement) and is deterministic: a Householder
/// reflection mapping e_n to q, applied to e_1, ..., e_{n-1}.
/// The result is positively oriented: det(q, b_1, ..., b_{n-1}) > 0.
Matrix orthonormal_complement(const Vector& q);

TangentFrame tangent_basis(const PricePoint& p);

/// The (n+1) x (n+1) matrix [[A, p], [p^T, 0]].
Matrix bordered_matrix(const Matrix& A, const Vector& p);

/// det [[A, p], [p^T, 0]] via LU with partial pivoting.
double bordered_determinant(const Matrix& A, const Vector& p);

/// True iff the symmetric part of A, restricted to {v : v.q = 0},
/// has all eigenvalues < -tol.
bool negdef_on_complement(const Matrix& A, const Vector& q, double tol);

/// sign(det(p, v_1, ..., v_{n-1})) where the v_i are the columns of vs.
/// Returns 0 when |det| < 1e-10 (degenerate frame).
int oriented_sign(const PricePoint& p, const Matrix& vs);

/// Same sign computation for an arbitrary unit base vector.
int oriented_sign(const Vector& p, const Matrix& vs);

}  // namespace regindex
