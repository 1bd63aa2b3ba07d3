#include "regindex/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace regindex {

namespace {
constexpr double kDegenerateDetTol = 1e-10;
}

double spherical_distance(const Vector& a, const Vector& b) {
  const double c = std::clamp(a.dot(b), -1.0, 1.0);
  return std::acos(c);
}

PricePoint::PricePoint(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) {
    throw DimensionMismatch("PricePoint requires dimension >= 2");
  }
  if (coords_.minCoeff() <= 0.0) {
    throw NonPositiveInput("PricePoint coordinates must be strictly positive");
  }
  if (std::abs(coords_.norm() - 1.0) > kUnitTolerance) {
    throw NonPositiveInput("PricePoint must have unit norm");
  }
}

PricePoint project_to_sphere(const Vector& x) {
  if (x.size() == 0 || x.minCoeff() <= 0.0) {
    throw NonPositiveInput("project_to_sphere requires strictly positive input");
  }
  Vector y = x / x.norm();
  // A second pass removes the O(eps) residue so unit inputs stay fixed.
  y /= y.norm();
  return PricePoint(y);
}

Matrix orthonormal_complement(const Vector& q) {
  const int n = static_cast<int>(q.size());
  Vector u = Vector::Unit(n, n - 1) - q;
  Matrix basis(n, n - 1);
  const double uu = u.squaredNorm();
  if (uu < 1e-28) {
    // q == e_n: the complement is spanned by e_1, ..., e_{n-1}.
    basis = Matrix::Identity(n, n).leftCols(n - 1);
  } else {
    for (int i = 0; i < n - 1; ++i) {
      basis.col(i) = Vector::Unit(n, i) - (2.0 * u(i) / uu) * u;
    }
  }
  // Fix the orientation so that det(q, b_1, ..., b_{n-1}) > 0.
  Matrix full(n, n);
  full.col(0) = q;
  full.rightCols(n - 1) = basis;
  if (full.partialPivLu().determinant() < 0.0) {
    basis.col(n - 2) = -basis.col(n - 2);
  }
  return basis;
}

TangentFrame tangent_basis(const PricePoint& p) {
  return TangentFrame{p, orthonormal_complement(p.coords())};
}

Matrix bordered_matrix(const Matrix& A, const Vector& p) {
  const int n = static_cast<int>(p.size());
  if (A.rows() != n || A.cols() != n) {
    throw DimensionMismatch("bordered_matrix: A must be n x n");
  }
  Matrix B = Matrix::Zero(n + 1, n + 1);
  B.topLeftCorner(n, n) = A;
  B.topRightCorner(n, 1) = p;
  B.bottomLeftCorner(1, n) = p.transpose();
  return B;
}

double bordered_determinant(const Matrix& A, const Vector& p) {
  return bordered_matrix(A, p).partialPivLu().determinant();
}

bool negdef_on_complement(const Matrix& A, const Vector& q, double tol) {
  const int n = static_cast<int>(q.size());
  if (A.rows() != n || A.cols() != n) {
    throw DimensionMismatch("negdef_on_complement: A must be n x n");
  }
  const Matrix basis = orthonormal_complement(q);
  const Matrix sym = 0.5 * (A + A.transpose());
  const Matrix restricted = basis.transpose() * sym * basis;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(restricted);
  return eig.eigenvalues().maxCoeff() < -tol;
}

int oriented_sign(const Vector& p, const Matrix& vs) {
  const int n = static_cast<int>(p.size());
  if (vs.rows() != n || vs.cols() != n - 1) {
    throw DimensionMismatch("oriented_sign: expected n-1 tangent vectors");
  }
  Matrix full(n, n);
  full.col(0) = p;
  full.rightCols(n - 1) = vs;
  const double det = full.partialPivLu().determinant();
  if (std::abs(det) < kDegenerateDetTol) return 0;
  return det > 0.0 ? 1 : -1;
}

int oriented_sign(const PricePoint& p, const Matrix& vs) {
  return oriented_sign(p.coords(), vs);
}

}  // namespace regindex
