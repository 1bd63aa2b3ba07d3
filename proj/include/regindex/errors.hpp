#pragma once

#include <stdexcept>
#include <string>

namespace regindex {

struct NonPositiveInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidSpec : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EvaluationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// |g(p*)| fell below the regularity threshold: the bordered determinant
// does not certify the equilibrium as regular and no index can be assigned.
struct NonRegularEquilibrium : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScanInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CertificationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Curve Jacobian lost full row rank along the path; the caller should
// redraw the reference point and retry.
struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepLimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CorrectorDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TransversalityFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CoverageGap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PathConfinementViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace regindex
