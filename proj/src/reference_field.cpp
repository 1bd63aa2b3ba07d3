#include "regindex/reference_field.hpp"

#include <cmath>

namespace regindex {

namespace {

Vector fq_raw(const Vector& q, const Vector& p) {
  const double r = p.norm();
  const double s = p.dot(q);
  return (r / s) * q - p / r;
}

// One tangential Newton polish step toward a zero of f^q.
Vector fq_polish(const Vector& q, Vector p, int iters) {
  for (int it = 0; it < iters; ++it) {
    const PricePoint qq(q);
    const Vector f = fq_raw(q, p);
    const Matrix J = jac_fq(qq, p);
    const Matrix B = orthonormal_complement(p / p.norm());
    const Matrix red = B.transpose() * J * B;
    const Vector rhs = -B.transpose() * f;
    Eigen::FullPivLU<Matrix> lu(red);
    if (!lu.isInvertible()) break;
    p += B * lu.solve(rhs);
    p /= p.norm();
    if (p.minCoeff() <= 0.0) break;
  }
  return p;
}

}  // namespace

Vector eval_fq(const PricePoint& q, const Vector& p) {
  if (p.size() != q.dim()) throw DimensionMismatch("eval_fq: dimension mismatch");
  if (p.minCoeff() < 0.0 || p.norm() == 0.0 || p.dot(q.coords()) <= 0.0) {
    throw EvaluationFailure("eval_fq: p must be nonnegative, nonzero");
  }
  return fq_raw(q.coords(), p);
}

Matrix jac_fq(const PricePoint& q, const Vector& p) {
  if (p.size() != q.dim()) throw DimensionMismatch("jac_fq: dimension mismatch");
  const int n = q.dim();
  const double r = p.norm();
  const double s = p.dot(q.coords());
  const Vector& qc = q.coords();
  Matrix J = (1.0 / (r * s)) * qc * p.transpose();
  J -= (r / (s * s)) * qc * qc.transpose();
  J -= (1.0 / r) * Matrix::Identity(n, n);
  J += (1.0 / (r * r * r)) * p * p.transpose();
  return J;
}

bool certify_eq1(const PricePoint& q) {
  const double g = bordered_determinant(jac_fq(q, q.coords()), q.coords());
  const double signed_g = (q.dim() % 2 == 0) ? g : -g;
  return signed_g > 0.0;
}

std::vector<PricePoint> unique_zero_scan(const PricePoint& q, double resolution,
                                         double eps) {
  const int n = q.dim();
  std::vector<Vector> raw;
  if (n == 2) {
    // Angular sweep; bracket sign changes of the tangential component.
    const double lo = std::asin(eps);
    const double hi = std::acos(eps);
    auto tangential = [&](double th) {
      const Vector p = (Vector(2) << std::cos(th), std::sin(th)).finished();
      const Vector t = (Vector(2) << -std::sin(th), std::cos(th)).finished();
      return fq_raw(q.coords(), p).dot(t);
    };
    double prev_th = lo;
    double prev_v = tangential(lo);
    for (double th = lo + resolution; th <= hi + resolution;
         th += resolution) {
      const double cur_th = std::min(th, hi);
      const double cur_v = tangential(cur_th);
      if (prev_v == 0.0 || prev_v * cur_v < 0.0) {
        double a = prev_th, b = cur_th;
        double fa = prev_v;
        for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
          const double m = 0.5 * (a + b);
          const double fm = tangential(m);
          if (fa * fm <= 0.0) b = m;
          else { a = m; fa = fm; }
        }
        const double th0 = 0.5 * (a + b);
        raw.push_back((Vector(2) << std::cos(th0), std::sin(th0)).finished());
      }
      if (cur_th >= hi) break;
      prev_th = cur_th;
      prev_v = cur_v;
    }
  } else if (n == 3) {
    // Coarse 2-D angular mesh; refine local minima of ||f^q||.
    const double step = std::max(resolution, 1e-3);
    const int m = static_cast<int>(std::ceil((M_PI / 2) / step));
    auto point = [](double th, double ph) {
      return (Vector(3) << std::sin(ph) * std::cos(th),
              std::sin(ph) * std::sin(th), std::cos(ph)).finished();
    };
    std::vector<std::vector<double>> norms(m + 1,
                                           std::vector<double>(m + 1, 1e300));
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) {
        const Vector p = point(i * step, j * step);
        if (p.minCoeff() < eps) continue;
        norms[i][j] = fq_raw(q.coords(), p).norm();
      }
    }
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) {
        if (norms[i][j] > 0.5) continue;
        bool local_min = true;
        for (int di = -1; di <= 1 && local_min; ++di) {
          for (int dj = -1; dj <= 1; ++dj) {
            const int ii = i + di, jj = j + dj;
            if (ii < 0 || jj < 0 || ii > m || jj > m || (di == 0 && dj == 0))
              continue;
            if (norms[ii][jj] < norms[i][j]) { local_min = false; break; }
          }
        }
        if (!local_min) continue;
        Vector p = fq_polish(q.coords(), point(i * step, j * step), 30);
        if (p.minCoeff() >= eps && fq_raw(q.coords(), p).norm() <= 1e-9) {
          raw.push_back(std::move(p));
        }
      }
    }
  } else {
    throw ScanInfeasible("unique_zero_scan supports only n in {2, 3}");
  }

  std::vector<PricePoint> zeros;
  for (const Vector& p : raw) {
    bool duplicate = false;
    for (const PricePoint& z : zeros) {
      if (spherical_distance(p, z.coords()) < 1e-4) { duplicate = true; break; }
    }
    if (!duplicate) zeros.push_back(project_to_sphere(p));
  }
  return zeros;
}

ExcessDemandModel reference_field_model(const PricePoint& q) {
  ExcessDemandModel model;
  model.dimension = q.dim();
  model.label = "reference-field";
  model.defined_on_closure = true;
  model.eval = [q](const Vector& p) { return eval_fq(q, p); };
  model.jacobian = [q](const Vector& p) { return jac_fq(q, p); };
  return model;
}

PricePoint draw_reference_point(int n, double eps_prime, std::mt19937_64& rng) {
  return PricePoint(random_interior_point(n, eps_prime, rng));
}

}  // namespace regindex
