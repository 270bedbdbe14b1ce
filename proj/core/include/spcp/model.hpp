#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spcp {

/// Dense double-precision matrix; the working currency of the whole library.
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class ErrorCode {
  NonFiniteEntry,
  NegativeDelta,
  NonPositiveXi,
  ConvergenceFailure,
  ShapeMismatch,
  NonPositiveDelta,
  CertificateViolation,
  InvalidRho,
  InvalidConfig,
  BadMagic,
  TruncatedFile,
  NonNumericCell,
  DimensionMismatch,
  InconsistentFrameSize,
  IoFailure,
};

const char* error_code_name(ErrorCode code);

class SpcpError : public std::runtime_error {
 public:
  SpcpError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// min ||X||_* + xi ||S||_1  subject to  ||X + S - D||_F <= delta.
struct SpcpProblem {
  Matrix D;
  double delta = 0.0;
  double xi = 0.0;
};

/// 1/sqrt(max{m,n}), the standard sparsity weight.
double default_xi(Index rows, Index cols);

/// Problem with the default xi filled in.
SpcpProblem make_problem(Matrix D, double delta);
SpcpProblem make_problem(Matrix D, double delta, double xi);

struct ValidationIssue {
  ErrorCode code;
  std::string detail;
};

/// Empty optional iff all SpcpProblem invariants hold.
std::optional<ValidationIssue> validate_problem(const SpcpProblem& p);

/// Throwing variant used at solver entry points.
void require_valid(const SpcpProblem& p);

enum class Algorithm { SmoothApg, PartialApg, AlmS, Nsa };
enum class RhoGrowth { SqrtK, Arithmetic, Geometric };
enum class SvdMode { Full, PartialWithPrediction };

const char* algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(const std::string& name);

struct SolverConfig {
  Algorithm algorithm = Algorithm::Nsa;
  double mu = 1e-3;   // nuclear-norm smoothing
  double nu = 1e-3;   // l1 smoothing
  double rho0 = 1.0;  // initial penalty (fixed penalty for AlmS)
  RhoGrowth rho_growth = RhoGrowth::Geometric;
  double rho_factor = 2.0;  // Geometric growth ratio, >= 1
  double rho_max = std::numeric_limits<double>::infinity();
  double tol = 1e-6;
  int max_iters = 1000;
  double feas_slack = 1e-12;
  SvdMode svd_mode = SvdMode::Full;
  std::uint64_t seed = 0;  // start vectors for partial SVD
  // Per-iteration true objective needs an extra factorization for the APG
  // solvers; 0 disables it (NaN recorded), n computes it every n-th iteration.
  int stats_objective_every = 1;
};

/// Filled-in defaults scaled to the problem: mu = nu = tol*||D||_2/2,
/// rho0 = 0.6/||D||_2 for the penalty methods (rho0 = 1/mu for AlmS), and
/// geometric penalty growth with ratio 2.
SolverConfig default_config(const SpcpProblem& p, Algorithm algorithm, double tol = 1e-6);

void require_valid(const SolverConfig& cfg);

struct IterStats {
  int iter = 0;
  double objective = 0.0;           // ||X||_* + xi ||S||_1
  double smoothed_objective = 0.0;  // smoothed counterpart; NaN where unused
  double infeasibility = 0.0;       // ||X + S - D||_F
  double rel_change = 0.0;          // stacked relative step length
  long svd_count_cumulative = 0;
  double theta = 0.0;
  double rho = 0.0;
  bool skipped = false;  // AlmS only
};

struct SpcpSolution {
  Matrix X;
  Matrix S;
  Matrix Y;  // multiplier of the X = Z coupling; zero for the APG solvers
  double theta = 0.0;
  int iters = 0;
  long svd_count = 0;
  double objective = 0.0;
  double infeasibility = 0.0;
  bool converged = false;
};

struct SolveResult {
  SpcpSolution solution;
  std::vector<IterStats> history;
};

struct GroundTruth {
  Matrix X0;
  Matrix S0;
  Matrix Zeta0;
  std::vector<Index> support;  // column-major linear indices of S0's nonzeros
  int rank0 = 0;
  double varrho = 0.0;
};

double nuclear_norm(const Matrix& A);
double l1_norm(const Matrix& A);
/// ||X||_* + xi ||S||_1.
double spcp_objective(const Matrix& X, const Matrix& S, double xi);

}  // namespace spcp
