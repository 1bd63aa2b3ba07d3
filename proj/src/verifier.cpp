#include "regindex/verifier.hpp"

#include <cmath>
#include <sstream>

namespace regindex {

namespace {

nlohmann::ordered_json vector_json(const Vector& v) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

nlohmann::ordered_json hypothesis_json(const VerificationReport& h) {
  nlohmann::ordered_json j;
  j["walras_max_residual"] = h.walras_max_residual;
  j["walras_ok"] = h.walras_ok;
  j["homogeneity_max_residual"] = h.homogeneity_max_residual;
  j["homogeneity_ok"] = h.homogeneity_ok;
  j["lower_bound_estimate"] = h.lower_bound_estimate;
  j["lower_bound_ok"] = h.lower_bound_ok;
  j["boundary_blowup_ok"] = h.blowup_ok;
  j["boundary_blowup_vacuous"] = h.blowup.vacuous;
  j["note"] = "boundary checks are sampled, not exhaustive";
  nlohmann::ordered_json rays = nlohmann::ordered_json::array();
  for (const RayCheck& r : h.blowup.rays) {
    nlohmann::ordered_json rj;
    rj["face"] = r.ray;
    rj["final_norm"] = r.norms.empty() ? 0.0 : r.norms.back();
    rj["growth_ratio"] = r.growth_ratio;
    rj["direction_min_component"] = r.direction_min_component;
    rj["direction_dot_limit"] = r.direction_dot_limit;
    rj["pass"] = r.pass;
    rays.push_back(std::move(rj));
  }
  j["rays"] = std::move(rays);
  return j;
}

}  // namespace

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::verified: return "verified";
    case Verdict::hypothesis_failed: return "hypothesis_failed";
    case Verdict::non_regular: return "non_regular";
    case Verdict::trace_failed: return "trace_failed";
  }
  return "unknown";
}

TheoremReport run_theorem_check(const ExcessDemandModel& model,
                                const VerifierConfig& cfg) {
  TheoremReport report;
  report.config = cfg;
  report.seed = cfg.seed;
  report.model_label = model.label;

  report.hypothesis = verify_hypotheses(model, cfg.seed);
  if (!report.hypothesis.passed()) {
    report.verdict = Verdict::hypothesis_failed;
    std::ostringstream detail;
    detail << "failed:";
    if (!report.hypothesis.walras_ok) {
      detail << " walras(residual=" << report.hypothesis.walras_max_residual
             << ")";
    }
    if (!report.hypothesis.homogeneity_ok) {
      detail << " homogeneity(residual="
             << report.hypothesis.homogeneity_max_residual << ")";
    }
    if (!report.hypothesis.lower_bound_ok) {
      detail << " lower_bound(s=" << report.hypothesis.lower_bound_estimate
             << ")";
    }
    if (!report.hypothesis.blowup_ok) detail << " boundary_blowup";
    report.detail = detail.str();
    return report;
  }

  SolverConfig solver_cfg = cfg.solver;
  solver_cfg.seed = cfg.seed;
  try {
    report.equilibria = find_equilibria(model, 1e-3, solver_cfg);
  } catch (const NonRegularEquilibrium& e) {
    report.verdict = Verdict::non_regular;
    report.detail = e.what();
    return report;
  }
  if (report.equilibria.empty()) {
    report.verdict = Verdict::trace_failed;
    report.detail = "no equilibrium located by the multistart solver";
    return report;
  }
  report.index_sum = 0;
  for (const EquilibriumRecord& rec : report.equilibria) {
    report.index_sum += rec.index;
    int image_index = 0;
    try {
      image_index = index_via_images(model, rec.price);
    } catch (const NonRegularEquilibrium& e) {
      report.verdict = Verdict::non_regular;
      report.detail = e.what();
      return report;
    }
    if (image_index != rec.index) {
      report.verdict = Verdict::non_regular;
      report.detail = "index_of and index_via_images disagree";
      return report;
    }
  }

  const int n = model.dimension;
  report.epsilon_prime = 2.0 * cfg.epsilon_start;
  std::mt19937_64 rng(cfg.seed + 0x9e3779b97f4a7c15ull);
  bool traced = false;
  for (int redraw = 0; redraw <= cfg.max_reference_redraws && !traced;
       ++redraw) {
    const PricePoint q = draw_reference_point(n, report.epsilon_prime, rng);
    double eps = cfg.epsilon_start;
    EpsilonCertificate cert;
    bool certified = false;
    while (eps >= cfg.epsilon_floor) {
      cert = certify_epsilon(model, q, eps, cfg.grid_density, report.equilibria);
      if (cert.pass) {
        certified = true;
        break;
      }
      eps /= 4.0;
    }
    if (!certified) {
      report.verdict = Verdict::trace_failed;
      report.detail = "Step 6 certification failed down to the epsilon floor";
      return report;
    }
    HomotopyProblem problem{model, q, eps, report.epsilon_prime, cert};
    try {
      report.components =
          trace_all(problem, report.equilibria, cfg.max_trace_steps, cfg.step);
      report.certificate = cert;
      report.epsilon_used = eps;
      report.reference_q = q.coords();
      traced = true;
    } catch (const RankDeficient&) {
      continue;  // Sard: redraw q and retry
    } catch (const std::runtime_error& e) {
      report.verdict = Verdict::trace_failed;
      report.detail = e.what();
      return report;
    }
  }
  if (!traced) {
    report.verdict = Verdict::trace_failed;
    report.detail =
        "transversality failure: rank-deficient curve Jacobian after all "
        "reference redraws";
    return report;
  }

  report.sign_sum = 0;
  for (const PathComponent& component : report.components) {
    for (const ArcEndpoint& endpoint : component.endpoints) {
      report.sign_sum += endpoint.boundary_sign;
    }
  }

  if (!cross_validate_indices(model, report)) {
    report.verdict = Verdict::trace_failed;
    report.detail = "index cross-validation against boundary signs failed";
    return report;
  }

  const bool odd = report.equilibria.size() % 2 == 1;
  if (report.index_sum == 1 && report.sign_sum == 0 && odd) {
    report.verdict = Verdict::verified;
  } else {
    report.verdict = Verdict::trace_failed;
    std::ostringstream detail;
    detail << "conclusion check failed: index_sum=" << report.index_sum
           << " sign_sum=" << report.sign_sum
           << " count=" << report.equilibria.size();
    report.detail = detail.str();
  }
  return report;
}

bool cross_validate_indices(const ExcessDemandModel& model,
                            const TheoremReport& report) {
  const int n = model.dimension;
  const int parity = n % 2 == 0 ? 1 : -1;
  for (const EquilibriumRecord& rec : report.equilibria) {
    try {
      if (index_via_images(model, rec.price) != rec.index) return false;
      if (index_of(model, rec.price) != rec.index) return false;
    } catch (const NonRegularEquilibrium&) {
      return false;
    }
  }
  for (const PathComponent& component : report.components) {
    for (const ArcEndpoint& endpoint : component.endpoints) {
      if (endpoint.t > 0.5) continue;
      bool matched = false;
      for (const EquilibriumRecord& rec : report.equilibria) {
        if (spherical_distance(endpoint.p, rec.price.coords()) <= 1e-6) {
          matched = true;
          if (endpoint.boundary_sign != parity * rec.index) return false;
        }
      }
      if (!matched) return false;
    }
  }
  return true;
}

nlohmann::ordered_json trace_summary_json(const TheoremReport& report) {
  nlohmann::ordered_json j;
  j["component_count"] = report.components.size();
  nlohmann::ordered_json comps = nlohmann::ordered_json::array();
  int endpoint_count = 0;
  for (const PathComponent& component : report.components) {
    nlohmann::ordered_json cj;
    cj["kind"] = component.kind == PathKind::loop ? "loop" : "arc";
    cj["node_count"] = component.nodes.size();
    nlohmann::ordered_json eps = nlohmann::ordered_json::array();
    for (const ArcEndpoint& endpoint : component.endpoints) {
      nlohmann::ordered_json ej;
      ej["t"] = endpoint.t;
      ej["p"] = vector_json(endpoint.p);
      ej["boundary_sign"] = endpoint.boundary_sign;
      eps.push_back(std::move(ej));
      ++endpoint_count;
    }
    cj["endpoints"] = std::move(eps);
    comps.push_back(std::move(cj));
  }
  j["components"] = std::move(comps);
  j["arc_endpoint_count"] = endpoint_count;
  j["sign_sum"] = report.sign_sum;
  j["index_sum"] = report.index_sum;
  return j;
}

nlohmann::ordered_json report_json(const TheoremReport& report) {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(report.verdict);
  j["detail"] = report.detail;
  j["model"] = report.model_label;
  j["seed"] = report.seed;
  j["hypothesis"] = hypothesis_json(report.hypothesis);
  nlohmann::ordered_json eq = nlohmann::ordered_json::array();
  for (const EquilibriumRecord& rec : report.equilibria) {
    nlohmann::ordered_json rj;
    rj["p"] = vector_json(rec.price.coords());
    rj["residual"] = rec.residual;
    rj["g"] = rec.g_value;
    rj["index"] = rec.index;
    eq.push_back(std::move(rj));
  }
  j["equilibria"] = std::move(eq);
  j["equilibrium_count"] = report.equilibria.size();
  j["index_sum"] = report.index_sum;
  j["sign_sum"] = report.sign_sum;
  j["trace"] = trace_summary_json(report);
  nlohmann::ordered_json cert;
  cert["epsilon"] = report.certificate.epsilon;
  cert["min_norm"] = report.certificate.min_norm;
  cert["threshold"] = report.certificate.threshold;
  cert["pass"] = report.certificate.pass;
  cert["note"] = "sampled certification over a finite boundary grid";
  j["epsilon_certificate"] = std::move(cert);
  j["epsilon"] = report.epsilon_used;
  j["epsilon_prime"] = report.epsilon_prime;
  j["reference_q"] = report.reference_q.size() > 0
                         ? vector_json(report.reference_q)
                         : nlohmann::ordered_json::array();
  nlohmann::ordered_json tol;
  tol["newton_tol"] = report.config.solver.newton_tol;
  tol["dedupe_radius"] = report.config.solver.dedupe_radius;
  tol["fd_step"] = kFdStep;
  tol["corrector_tol"] = report.config.step.corrector_tol;
  tol["walras_tol"] = kWalrasTol;
  tol["regularity_rule"] = "|g| > 1e-8 * (1 + |Df|_inf^n)";
  j["tolerances"] = std::move(tol);
  return j;
}

std::string report_text(const TheoremReport& report) {
  std::ostringstream out;
  out << "model: " << report.model_label << "\n";
  out << "verdict: " << to_string(report.verdict) << "\n";
  if (!report.detail.empty()) out << "detail: " << report.detail << "\n";
  out << "hypotheses: walras=" << (report.hypothesis.walras_ok ? "ok" : "FAIL")
      << " homogeneity=" << (report.hypothesis.homogeneity_ok ? "ok" : "FAIL")
      << " lower_bound=" << (report.hypothesis.lower_bound_ok ? "ok" : "FAIL")
      << " blowup=" << (report.hypothesis.blowup_ok ? "ok" : "FAIL") << "\n";
  out << "equilibria: " << report.equilibria.size() << "\n";
  for (const EquilibriumRecord& rec : report.equilibria) {
    out << "  p = [";
    for (int i = 0; i < rec.price.dim(); ++i) {
      if (i) out << ", ";
      out << rec.price.coords()(i);
    }
    out << "]  g = " << rec.g_value << "  index = " << (rec.index > 0 ? "+1" : "-1")
        << "\n";
  }
  out << "index_sum = " << report.index_sum
      << "  sign_sum = " << report.sign_sum << "\n";
  out << "components: " << report.components.size() << "\n";
  return out.str();
}

}  // namespace regindex
