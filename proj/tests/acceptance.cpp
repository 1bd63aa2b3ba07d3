// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Each criterion is self-contained and pins its own
// tolerances.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "regindex/fixtures.hpp"
#include "regindex/verifier.hpp"

namespace fs = std::filesystem;
using namespace regindex;

namespace {

int g_failures = 0;

void report(int criterion, const char* label, bool pass,
            const std::string& detail = "") {
  std::printf("%s criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion,
              label, detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++g_failures;
}

Vector random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v / v.norm();
}

PricePoint random_positive_q(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = std::abs(gauss(rng)) + 0.05;
  return project_to_sphere(v);
}

Matrix random_negdef_on_complement(int n, const Vector& q,
                                   std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);
  const Matrix proj = Matrix::Identity(n, n) - q * q.transpose();
  const Matrix restricted = proj * 0.5 * (m + m.transpose()) * proj;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(restricted);
  Matrix a = m - (eig.eigenvalues().maxCoeff() + 1.0) * proj;
  Vector r1(n), r2(n);
  for (int i = 0; i < n; ++i) { r1(i) = gauss(rng); r2(i) = gauss(rng); }
  return a + q * r1.transpose() + r2 * q.transpose();
}

// --- criterion 1: unique-equilibrium index sum -------------------------
void criterion_1() {
  const ExcessDemandModel model = fixtures::builtin_model("cobb-douglas-2");
  SolverConfig cfg;
  const auto equilibria = find_equilibria(model, 1e-3, cfg);
  const Vector p_star =
      (Vector(2) << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)).finished();
  const bool pass =
      equilibria.size() == 1 && equilibria[0].index == 1 &&
      spherical_distance(equilibria[0].price.coords(), p_star) <= 1e-8;
  report(1, "index-sum theorem, unique equilibrium", pass);
}

// --- criterion 2: multi-equilibrium case vs the grid oracle ------------
void criterion_2() {
  const ExcessDemandModel model = fixtures::builtin_model("ces-3eq");
  SolverConfig cfg;
  const auto equilibria = find_equilibria(model, 1e-3, cfg);
  const auto oracle = grid_scan_oracle(model, 1e-3, 1e-5);
  bool pass = equilibria.size() == 3 && oracle.size() == 3 &&
              equilibria.size() % 2 == 1;
  if (pass) {
    int sum = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      pass = pass && spherical_distance(equilibria[i].price.coords(),
                                        oracle[i].coords()) <= 1e-6;
      sum += equilibria[i].index;
    }
    pass = pass && equilibria[0].index == 1 && equilibria[1].index == -1 &&
           equilibria[2].index == 1 && sum == 1;
  }
  report(2, "index-sum theorem, three equilibria", pass);
}

// --- criterion 3: reference-field certificates -------------------------
void criterion_3() {
  std::mt19937_64 rng(2024);
  bool pass = true;
  int count = 0;
  while (count < 100 && pass) {
    for (int n = 2; n <= 8 && count < 100; ++n, ++count) {
      const PricePoint q = random_positive_q(n, rng);
      pass = pass && eval_fq(q, q.coords()).norm() <= 1e-12;
      pass = pass && certify_eq1(q);
      pass = pass && index_of(reference_field_model(q), q) == 1;
      if (n <= 3) {
        const auto zeros = unique_zero_scan(q, n == 2 ? 1e-3 : 2e-2);
        pass = pass && zeros.size() == 1 &&
               spherical_distance(zeros[0].coords(), q.coords()) <= 1e-4;
      }
    }
  }
  report(3, "reference-field certificates, 100 random q", pass);
}

// --- criterion 4: randomized bordered-sign property --------------------
void criterion_4() {
  std::mt19937_64 rng(17);
  bool pass = true;
  int trials = 0;
  while (trials < 1000 && pass) {
    for (int n = 2; n <= 6 && trials < 1000 && pass; ++n, ++trials) {
      const Vector q = random_unit(n, rng);
      const Matrix a = random_negdef_on_complement(n, q, rng);
      const double g = bordered_determinant(a, q);
      pass = pass && ((n % 2 == 0) ? g : -g) > 0.0;
      for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const Matrix at = (1.0 - t) * a + t * a.transpose();
        pass = pass && bordered_determinant(at, q) * g > 0.0;
      }
    }
  }
  report(4, "bordered sign under negative definiteness, 1000 trials", pass);
}

// --- criterion 5: bordered determinant vs tangent-image determinant ----
void criterion_5() {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> gauss(0.0, 1.0);
  bool pass = true;
  int trials = 0;
  while (trials < 1000 && pass) {
    for (int n = 2; n <= 6 && trials < 1000 && pass; ++n) {
      const Vector p = random_positive_q(n, rng).coords();
      Matrix b(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = gauss(rng);
      const Matrix a = b * (Matrix::Identity(n, n) - p * p.transpose());
      const double g = bordered_determinant(a, p);
      if (std::abs(g) < 1e-8) continue;
      ++trials;
      const Matrix frame = tangent_basis(PricePoint(p)).vectors;
      const int rhs = -oriented_sign(PricePoint(p), Matrix(a * frame));
      pass = pass && (g > 0.0 ? 1 : -1) == rhs;
    }
  }
  report(5, "tangent-image sign identity, 1000 trials", pass);
}

// --- criterion 6: boundary-sign bookkeeping on both economies ----------
void criterion_6() {
  bool pass = true;
  for (const char* name : {"cobb-douglas-2", "ces-3eq"}) {
    const ExcessDemandModel model = fixtures::builtin_model(name);
    const TheoremReport rep = run_theorem_check(model, VerifierConfig{});
    pass = pass && rep.verdict == Verdict::verified;
    const int n = model.dimension;
    const int t1_expected = (n % 2 == 0) ? -1 : 1;  // (-1)^(n-1)
    const int parity = (n % 2 == 0) ? 1 : -1;       // (-1)^n
    int sign_sum = 0, endpoints = 0;
    for (const PathComponent& component : rep.components) {
      pass = pass && component.kind == PathKind::arc;
      for (const ArcEndpoint& endpoint : component.endpoints) {
        sign_sum += endpoint.boundary_sign;
        ++endpoints;
        if (endpoint.t == 1.0) {
          pass = pass && endpoint.boundary_sign == t1_expected;
        } else {
          bool matched = false;
          for (const EquilibriumRecord& rec : rep.equilibria) {
            if (spherical_distance(endpoint.p, rec.price.coords()) <= 1e-6) {
              matched = true;
              pass = pass && endpoint.boundary_sign == parity * rec.index;
            }
          }
          pass = pass && matched;
        }
      }
    }
    pass = pass && sign_sum == 0 && endpoints % 2 == 0;
  }
  report(6, "boundary-sign bookkeeping on both economy fixtures", pass);
}

// --- criterion 7: epsilon certification --------------------------------
void criterion_7() {
  bool pass = true;
  const PricePoint q = project_to_sphere((Vector(2) << 0.7, 0.72).finished());
  for (const char* name : {"cobb-douglas-2", "ces-3eq", "reference-field"}) {
    const ExcessDemandModel model = fixtures::builtin_model(name);
    SolverConfig cfg;
    const auto equilibria = find_equilibria(model, 1e-3, cfg);
    bool certified = false;
    for (double eps = 1e-2; eps >= 1e-8; eps /= 4.0) {
      if (certify_epsilon(model, q, eps, 10, equilibria).pass) {
        certified = true;
        break;
      }
    }
    pass = pass && certified;
  }
  // Oversized epsilon excludes the outer ces-3eq equilibria.
  const ExcessDemandModel ces = fixtures::builtin_model("ces-3eq");
  SolverConfig cfg;
  const auto equilibria = find_equilibria(ces, 1e-3, cfg);
  pass = pass && !certify_epsilon(ces, q, 0.2, 10, equilibria).pass;
  report(7, "epsilon certification with oversized-epsilon rejection", pass);
}

// --- criterion 8: numerical calculus ------------------------------------
void criterion_8() {
  bool pass = true;
  std::mt19937_64 rng(31);
  int points = 0;
  while (points < 100 && pass) {
    for (int n = 2; n <= 6 && points < 100; ++n, ++points) {
      const PricePoint q = random_positive_q(n, rng);
      const Vector p = random_interior_point(n, 0.05, rng);
      const Matrix diff =
          jacobian_fd(reference_field_model(q), p) - jac_fq(q, p);
      pass = pass && diff.lpNorm<Eigen::Infinity>() <= 1e-6;
    }
  }
  for (const char* name : {"cobb-douglas-2", "ces-3eq", "reference-field"}) {
    const ExcessDemandModel model = fixtures::builtin_model(name);
    for (int k = 0; k < 20; ++k) {
      const Vector p = random_interior_point(model.dimension, 0.05, rng);
      pass = pass && (jacobian_fd(model, p) * p).norm() <= 1e-5;
    }
    SolverConfig cfg;
    for (const EquilibriumRecord& rec : find_equilibria(model, 1e-3, cfg)) {
      pass = pass && index_via_images(model, rec.price) == rec.index;
    }
  }
  report(8, "finite differences, radial annihilation, index agreement", pass);
}

// --- criterion 9: negative controls -------------------------------------
void criterion_9() {
  bool pass = true;
  const TheoremReport walras = run_theorem_check(
      fixtures::builtin_model("broken-walras"), VerifierConfig{});
  pass = pass && walras.verdict == Verdict::hypothesis_failed &&
         walras.hypothesis.walras_max_residual > 0.0;
  const TheoremReport homog = run_theorem_check(
      fixtures::builtin_model("broken-homogeneity"), VerifierConfig{});
  pass = pass && homog.verdict == Verdict::hypothesis_failed &&
         homog.hypothesis.homogeneity_max_residual > 0.0;
  const TheoremReport bounded = run_theorem_check(
      fixtures::builtin_model("bounded-boundary"), VerifierConfig{});
  pass = pass && bounded.verdict == Verdict::hypothesis_failed &&
         !bounded.hypothesis.blowup_ok;
  const TheoremReport fold = run_theorem_check(
      fixtures::builtin_model("ces-near-fold"), VerifierConfig{});
  pass = pass && fold.verdict == Verdict::non_regular;
  report(9, "negative controls and non-regular diagnosis", pass);
}

// --- criterion 10: determinism of emitted files --------------------------
std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void criterion_10() {
  const fs::path dir_a = fs::temp_directory_path() / "regindex_accept_a";
  const fs::path dir_b = fs::temp_directory_path() / "regindex_accept_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  bool pass = true;
  for (const fs::path& dir : {dir_a, dir_b}) {
    const std::string cmd = std::string(REGINDEX_CLI_PATH) +
                            " trace --config ces-3eq --seed 11 --out " +
                            dir.string() + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    pass = pass && status != -1 && WEXITSTATUS(status) == 0;
  }
  for (const char* file :
       {"trace.csv", "trace_summary.json", "theorem_report.json"}) {
    const std::string a = slurp(dir_a / file);
    pass = pass && !a.empty() && a == slurp(dir_b / file);
  }
  report(10, "byte-identical outputs for identical config and seed", pass);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
