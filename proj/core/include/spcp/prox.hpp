#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "spcp/model.hpp"

namespace spcp {

/// Thin SVD factors A = U diag(sigma) V^T with sigma nonincreasing.
/// A partial triple keeps only the leading factors; orthonormality invariants
/// apply either way, the reconstruction invariant only to full triples.
struct SvdTriple {
  Matrix U;
  Eigen::VectorXd sigma;
  Matrix V;
};

/// Full thin SVD (k = min(m, n)).
SvdTriple svd_full(const Matrix& A);

/// Rank guess carried across the singular value thresholding steps of a
/// single solver run. The growth/shrink constants are free parameters of the
/// heuristic and can be tuned here.
struct RankPredictor {
  int predicted_rank = 1;
  int last_effective_rank = 0;

  static RankPredictor initial(Index m, Index n);  // ceil(0.1 * min(m, n))

  /// Feed the effective rank observed after a thresholding step.
  void update(int effective_rank, Index m, Index n);
};

/// Leading singular triples of A: at least pred.predicted_rank of them, and
/// all with sigma > threshold (the predictor grows and the subspace iteration
/// retries internally until the tail is below threshold or the full size is
/// reached). Deterministic for a fixed seed.
SvdTriple svd_partial(const Matrix& A, RankPredictor& pred, double threshold,
                      std::uint64_t seed = 0);

/// Singular value thresholding, prox of tau ||.||_*:
/// U diag(max(sigma - tau, 0)) V^T.
Matrix svt(const Matrix& A, double tau);

/// Entrywise shrinkage, prox of tau ||.||_1: sign(A) .* max(|A| - tau, 0).
Matrix soft_threshold(const Matrix& A, double tau);

/// Gradient of the smoothed nuclear norm f_mu: U diag(min(sigma/mu, 1)) V^T.
Matrix grad_f_mu(const Matrix& X, double mu);

/// f_mu(X) = sum_i h_mu(sigma_i) with h_mu the Huber function
/// h_mu(s) = s^2/(2 mu) for s <= mu, s - mu/2 otherwise.
double f_mu_value(const Matrix& X, double mu);

/// Value of h_mu summed over the given singular values.
double f_mu_from_sigma(const Eigen::VectorXd& sigma, double mu);

struct SmoothedNuclearEval {
  double value = 0.0;         // f_mu(X)
  double nuclear_norm = 0.0;  // ||X||_*
  Matrix grad;                // grad f_mu(X)
};

/// value + nuclear norm + gradient from a single factorization.
SmoothedNuclearEval eval_f_mu(const Matrix& X, double mu);

/// Gradient of the smoothed l1 norm g_nu: entrywise clamp(S/nu, -1, 1).
Matrix grad_g_nu(const Matrix& S, double nu);

/// g_nu(S) = sum_ij h_nu(S_ij), entrywise Huber.
double g_nu_value(const Matrix& S, double nu);

/// Minimizer of f_mu(X) + <Q, X - Xtilde> + (rho/2) ||X - Xtilde||_F^2:
/// with U diag(sigma) V^T the SVD of Xtilde - Q/rho, returns
/// U diag(sigma - sigma / max{rho sigma, 1 + rho mu}) V^T.
Matrix prox_smoothed_nuclear(const Matrix& Xtilde, const Matrix& Q, double rho, double mu);

/// Per-run factorization engine: applies the configured SVD mode, owns the
/// rank predictor and counts the factorizations a solver performs.
class SvdEngine {
 public:
  SvdEngine(SvdMode mode, Index m, Index n, std::uint64_t seed);

  struct SvtResult {
    Matrix X;
    Eigen::VectorXd sigma;  // thresholded singular values of X (the kept ones)
  };
  /// svt(A, tau) plus the surviving singular values. A zero input short
  /// circuits without a factorization.
  SvtResult svt(const Matrix& A, double tau);

  /// eval_f_mu via a counted full SVD.
  SmoothedNuclearEval eval_f_mu(const Matrix& X, double mu);

  struct ProxNuclearResult {
    Matrix X;
    Eigen::VectorXd sigma;  // singular values of X
    Matrix grad;            // grad f_mu at X
    double f_mu = 0.0;      // f_mu(X)
    double nuclear = 0.0;   // ||X||_*
  };
  /// prox_smoothed_nuclear plus everything the ALM solvers need about the
  /// result, from the same factorization.
  ProxNuclearResult prox_smoothed_nuclear(const Matrix& Xtilde, const Matrix& Q, double rho,
                                          double mu);

  long count() const { return count_; }

 private:
  SvdMode mode_;
  RankPredictor predictor_;
  std::uint64_t seed_;
  long count_ = 0;
};

}  // namespace spcp
