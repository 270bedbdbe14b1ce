#include "spcp/model.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "spcp/prox.hpp"

namespace spcp {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::NegativeDelta: return "NegativeDelta";
    case ErrorCode::NonPositiveXi: return "NonPositiveXi";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonPositiveDelta: return "NonPositiveDelta";
    case ErrorCode::CertificateViolation: return "CertificateViolation";
    case ErrorCode::InvalidRho: return "InvalidRho";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InconsistentFrameSize: return "InconsistentFrameSize";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

double default_xi(Index rows, Index cols) {
  return 1.0 / std::sqrt(static_cast<double>(std::max(rows, cols)));
}

SpcpProblem make_problem(Matrix D, double delta) {
  double xi = default_xi(D.rows(), D.cols());
  return SpcpProblem{std::move(D), delta, xi};
}

SpcpProblem make_problem(Matrix D, double delta, double xi) {
  return SpcpProblem{std::move(D), delta, xi};
}

std::optional<ValidationIssue> validate_problem(const SpcpProblem& p) {
  if (p.D.size() == 0) {
    return ValidationIssue{ErrorCode::DimensionMismatch, "D is empty"};
  }
  if (!p.D.allFinite()) {
    return ValidationIssue{ErrorCode::NonFiniteEntry, "D contains NaN or Inf"};
  }
  if (!(p.delta >= 0.0)) {
    return ValidationIssue{ErrorCode::NegativeDelta, "delta must be >= 0"};
  }
  if (!(p.xi > 0.0)) {
    return ValidationIssue{ErrorCode::NonPositiveXi, "xi must be > 0"};
  }
  return std::nullopt;
}

void require_valid(const SpcpProblem& p) {
  if (auto issue = validate_problem(p)) {
    throw SpcpError(issue->code, issue->detail);
  }
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::SmoothApg: return "apg";
    case Algorithm::PartialApg: return "papg";
    case Algorithm::AlmS: return "alms";
    case Algorithm::Nsa: return "nsa";
  }
  return "unknown";
}

std::optional<Algorithm> algorithm_from_name(const std::string& name) {
  if (name == "apg") return Algorithm::SmoothApg;
  if (name == "papg") return Algorithm::PartialApg;
  if (name == "alms") return Algorithm::AlmS;
  if (name == "nsa") return Algorithm::Nsa;
  return std::nullopt;
}

SolverConfig default_config(const SpcpProblem& p, Algorithm algorithm, double tol) {
  if (!(tol > 0.0)) throw SpcpError(ErrorCode::InvalidConfig, "tol must be > 0");
  SolverConfig cfg;
  cfg.algorithm = algorithm;
  double spectral = 1.0;
  if (p.D.size() > 0) {
    Eigen::BDCSVD<Matrix> values_only(p.D);
    spectral = values_only.singularValues()(0);
  }
  if (spectral <= 0.0) spectral = 1.0;
  cfg.tol = tol;
  cfg.mu = std::max(cfg.tol * spectral / 2.0, 1e-300);
  cfg.nu = cfg.mu;
  cfg.rho_growth = RhoGrowth::Geometric;
  cfg.rho_factor = 2.0;
  cfg.rho_max = std::numeric_limits<double>::infinity();
  cfg.max_iters = 1000;
  if (algorithm == Algorithm::AlmS) {
    cfg.rho0 = 1.0 / cfg.mu;  // fixed penalty, smallest admissible
  } else {
    cfg.rho0 = 0.6 / spectral;
  }
  return cfg;
}

void require_valid(const SolverConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw SpcpError(ErrorCode::InvalidConfig, "tol must be > 0");
  if (cfg.max_iters < 1) throw SpcpError(ErrorCode::InvalidConfig, "max_iters must be >= 1");
  if (!(cfg.mu > 0.0)) throw SpcpError(ErrorCode::InvalidConfig, "mu must be > 0");
  if (!(cfg.nu > 0.0)) throw SpcpError(ErrorCode::InvalidConfig, "nu must be > 0");
  if (!(cfg.rho0 > 0.0)) throw SpcpError(ErrorCode::InvalidConfig, "rho0 must be > 0");
  if (!(cfg.feas_slack >= 0.0)) {
    throw SpcpError(ErrorCode::InvalidConfig, "feas_slack must be >= 0");
  }
  if (cfg.rho_growth == RhoGrowth::Geometric && !(cfg.rho_factor >= 1.0)) {
    throw SpcpError(ErrorCode::InvalidConfig, "geometric rho factor must be >= 1");
  }
}

double nuclear_norm(const Matrix& A) { return svd_full(A).sigma.sum(); }

double l1_norm(const Matrix& A) { return A.cwiseAbs().sum(); }

double spcp_objective(const Matrix& X, const Matrix& S, double xi) {
  return nuclear_norm(X) + xi * l1_norm(S);
}

}  // namespace spcp
