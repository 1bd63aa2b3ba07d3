#include "regindex/solver.hpp"

#include <algorithm>
#include <cmath>

namespace regindex {

namespace {

bool lexicographic_less(const Vector& a, const Vector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

}  // namespace

std::optional<EquilibriumRecord> newton_on_sphere(const ExcessDemandModel& model,
                                                  const PricePoint& p0,
                                                  const SolverConfig& cfg) {
  Vector p = p0.coords();
  Vector best_p;
  double best_norm = 1e300;
  double prev_norm = 1e300;
  auto finish = [&]() -> std::optional<EquilibriumRecord> {
    if (best_norm <= cfg.newton_tol) {
      return make_equilibrium_record(model, PricePoint(best_p));
    }
    return std::nullopt;
  };
  for (int iter = 0; iter <= cfg.max_iter; ++iter) {
    Vector f;
    try {
      f = model.eval(p);
    } catch (const EvaluationFailure&) {
      return finish();
    }
    const double fnorm = f.norm();
    if (fnorm < best_norm) {
      best_norm = fnorm;
      best_p = p;
    }
    // Past the acceptance tolerance, keep polishing while the iteration
    // still contracts. A regular root bottoms out in one or two extra
    // steps; near a multiple root this walks the iterate into the
    // degenerate point instead of stopping on a nearby pseudo-zero.
    if (fnorm <= cfg.newton_tol && fnorm > 0.5 * prev_norm) return finish();
    prev_norm = fnorm;
    if (iter == cfg.max_iter) break;
    Matrix J;
    try {
      J = model_jacobian(model, p);
    } catch (const EvaluationFailure&) {
      return finish();
    }
    const Matrix B = orthonormal_complement(p);
    const Matrix reduced = B.transpose() * J * B;
    Eigen::FullPivLU<Matrix> lu(reduced);
    if (!lu.isInvertible()) return finish();  // basin pathology
    Vector delta = B * lu.solve(Vector(-B.transpose() * f));
    // Trust-region style cap keeps far-field steps on the sphere scale.
    const double step_norm = delta.norm();
    if (step_norm > 0.5) delta *= 0.5 / step_norm;
    const Vector next = p + delta;
    if (next.minCoeff() <= 0.0) return finish();  // exited positivity
    p = next / next.norm();
  }
  return finish();
}

std::vector<PricePoint> quasi_uniform_starts(int n, double eps, int count) {
  // Kronecker sequence with square-root-of-prime generators.
  static const double primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                  31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  std::vector<PricePoint> starts;
  starts.reserve(count);
  const double floor_coord = std::max(eps, 1e-3);
  for (int k = 1; starts.size() < static_cast<std::size_t>(count) &&
                  k <= 50 * count; ++k) {
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      const double alpha = std::sqrt(primes[i % 20]);
      x(i) = std::fmod(k * alpha, 1.0);
    }
    Vector p = x.array() + 0.05;
    p /= p.norm();
    if (p.minCoeff() < floor_coord) continue;
    starts.push_back(PricePoint(p));
  }
  return starts;
}

std::vector<EquilibriumRecord> find_equilibria(const ExcessDemandModel& model,
                                               double eps,
                                               const SolverConfig& cfg) {
  const int n = model.dimension;
  const int total = cfg.multistart_count > 0 ? cfg.multistart_count : 200 * n;
  std::vector<PricePoint> starts = quasi_uniform_starts(n, eps, total / 2);
  std::mt19937_64 rng(cfg.seed);
  while (starts.size() < static_cast<std::size_t>(total)) {
    starts.push_back(
        PricePoint(random_interior_point(n, std::max(eps, 1e-3), rng)));
  }

  std::vector<EquilibriumRecord> found;
  for (const PricePoint& p0 : starts) {
    auto rec = newton_on_sphere(model, p0, cfg);
    if (!rec) continue;
    bool duplicate = false;
    for (const EquilibriumRecord& existing : found) {
      if (spherical_distance(existing.price.coords(), rec->price.coords()) <=
          cfg.dedupe_radius) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) found.push_back(std::move(*rec));
  }
  std::sort(found.begin(), found.end(),
            [](const EquilibriumRecord& a, const EquilibriumRecord& b) {
              return lexicographic_less(a.price.coords(), b.price.coords());
            });
  return found;
}

std::vector<PricePoint> grid_scan_oracle(const ExcessDemandModel& model,
                                         double eps, double resolution) {
  const int n = model.dimension;
  std::vector<Vector> raw;
  if (n == 2) {
    const double lo = std::asin(eps);
    const double hi = std::acos(eps);
    auto tangential = [&](double th) {
      const Vector p = (Vector(2) << std::cos(th), std::sin(th)).finished();
      const Vector t = (Vector(2) << -std::sin(th), std::cos(th)).finished();
      return model.eval(p).dot(t);
    };
    double prev_th = lo;
    double prev_v = tangential(lo);
    for (double th = lo + resolution;; th += resolution) {
      const double cur_th = std::min(th, hi);
      const double cur_v = tangential(cur_th);
      if (prev_v == 0.0 || prev_v * cur_v < 0.0) {
        double a = prev_th, b = cur_th, fa = prev_v;
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
        norms[i][j] = model.eval(p).norm();
      }
    }
    SolverConfig polish;
    polish.newton_tol = 1e-10;
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) {
        if (norms[i][j] > 1e200) continue;
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
        try {
          auto rec = newton_on_sphere(model, PricePoint(point(i * step, j * step)),
                                      polish);
          if (rec && rec->price.min_coord() >= eps) {
            raw.push_back(rec->price.coords());
          }
        } catch (const NonRegularEquilibrium&) {
          raw.push_back(point(i * step, j * step));
        }
      }
    }
  } else {
    throw ScanInfeasible("grid_scan_oracle supports only n in {2, 3}");
  }

  std::vector<PricePoint> zeros;
  for (const Vector& p : raw) {
    bool duplicate = false;
    for (const PricePoint& z : zeros) {
      if (spherical_distance(p, z.coords()) < 1e-4) { duplicate = true; break; }
    }
    if (!duplicate) zeros.push_back(project_to_sphere(p));
  }
  std::sort(zeros.begin(), zeros.end(),
            [](const PricePoint& a, const PricePoint& b) {
              return lexicographic_less(a.coords(), b.coords());
            });
  return zeros;
}

}  // namespace regindex
