#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "regindex/homotopy.hpp"
#include "regindex/solver.hpp"

namespace regindex {

enum class Verdict { verified, hypothesis_failed, non_regular, trace_failed };

std::string to_string(Verdict verdict);

struct VerifierConfig {
  SolverConfig solver;
  double epsilon_start = 1e-2;
  double epsilon_floor = 1e-8;
  int max_epsilon_shrinks = 6;
  int grid_density = 10;
  int max_reference_redraws = 5;
  int max_trace_steps = 20000;
  StepControl step;
  std::uint64_t seed = 1;
};

/// End-to-end verdict of the index theorem pipeline on one model:
/// hypothesis checks -> equilibria -> indices -> homotopy trace ->
/// sign/index-sum certification.
struct TheoremReport {
  VerificationReport hypothesis;
  std::vector<EquilibriumRecord> equilibria;
  std::vector<PathComponent> components;
  EpsilonCertificate certificate;
  int index_sum = 0;
  int sign_sum = 0;
  Verdict verdict = Verdict::trace_failed;
  std::string detail;
  // Provenance.
  std::string model_label;
  std::uint64_t seed = 0;
  double epsilon_used = 0.0;
  double epsilon_prime = 0.0;
  Vector reference_q;
  VerifierConfig config;
};

TheoremReport run_theorem_check(const ExcessDemandModel& model,
                                const VerifierConfig& cfg);

/// True iff index_of agrees with index_via_images at every equilibrium
/// and every t = 0 arc endpoint's boundary sign equals
/// (-1)^n * index of the matched equilibrium.
bool cross_validate_indices(const ExcessDemandModel& model,
                            const TheoremReport& report);

/// Stable-key-order JSON rendering of the full report.
nlohmann::ordered_json report_json(const TheoremReport& report);

/// Trace summary JSON: components, kinds, endpoints, signs, index sum.
nlohmann::ordered_json trace_summary_json(const TheoremReport& report);

/// Human-readable rendering.
std::string report_text(const TheoremReport& report);

}  // namespace regindex
