#include "spcp/prox.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "spcp/rng.hpp"

namespace spcp {

namespace {

Matrix reconstruct_thresholded(const SvdTriple& f, const Eigen::VectorXd& new_sigma, Index keep) {
  if (keep == 0) {
    return Matrix::Zero(f.U.rows(), f.V.rows());
  }
  return f.U.leftCols(keep) * new_sigma.head(keep).asDiagonal() * f.V.leftCols(keep).transpose();
}

double huber(double s, double mu) {
  s = std::abs(s);
  return s <= mu ? s * s / (2.0 * mu) : s - mu / 2.0;
}

}  // namespace

SvdTriple svd_full(const Matrix& A) {
  if (!A.allFinite()) {
    throw SpcpError(ErrorCode::NonFiniteEntry, "cannot decompose a matrix with NaN/Inf");
  }
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw SpcpError(ErrorCode::ConvergenceFailure, "SVD did not converge");
  }
  return SvdTriple{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

RankPredictor RankPredictor::initial(Index m, Index n) {
  Index minmn = std::min(m, n);
  int start = static_cast<int>(std::ceil(0.1 * static_cast<double>(minmn)));
  RankPredictor p;
  p.predicted_rank = std::clamp(start, 1, static_cast<int>(minmn));
  return p;
}

void RankPredictor::update(int effective_rank, Index m, Index n) {
  Index minmn = std::min(m, n);
  int step = static_cast<int>(std::ceil(0.05 * static_cast<double>(minmn)));
  int next;
  if (effective_rank < predicted_rank) {
    next = effective_rank + 1;
  } else {
    next = effective_rank + step;
  }
  last_effective_rank = effective_rank;
  predicted_rank = std::clamp(next, 1, static_cast<int>(minmn));
}

namespace {

// Top-k triples by block subspace iteration with Rayleigh-Ritz extraction.
// Deterministic: the start block is drawn from a seeded generator.
SvdTriple subspace_topk(const Matrix& A, Index k, std::uint64_t seed) {
  const Index m = A.rows();
  const Index n = A.cols();
  const Index minmn = std::min(m, n);
  k = std::min(k, minmn);

  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Matrix V(n, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < n; ++i) V(i, j) = rng.normal();
  }
  {
    Eigen::HouseholderQR<Matrix> qr(V);
    V = qr.householderQ() * Matrix::Identity(n, k);
  }

  Eigen::VectorXd prev = Eigen::VectorXd::Zero(k);
  Matrix U(m, k);
  const int max_sweeps = 600;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Matrix Y = A * V;
    Eigen::HouseholderQR<Matrix> qru(Y);
    U = qru.householderQ() * Matrix::Identity(m, k);
    Matrix Z = A.transpose() * U;
    Eigen::HouseholderQR<Matrix> qrv(Z);
    V = qrv.householderQ() * Matrix::Identity(n, k);
    Eigen::VectorXd est = qrv.matrixQR().topRows(k).diagonal().cwiseAbs();
    double scale = std::max(est.maxCoeff(), 1e-300);
    if ((est - prev).cwiseAbs().maxCoeff() <= 1e-13 * scale && sweep >= 2) break;
    prev = est;
  }

  // Rayleigh-Ritz on the converged subspace pins factors and values.
  Matrix B = U.transpose() * A * V;
  Eigen::JacobiSVD<Matrix> small(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdTriple out;
  out.U = U * small.matrixU();
  out.V = V * small.matrixV();
  out.sigma = small.singularValues();
  return out;
}

}  // namespace

SvdTriple svd_partial(const Matrix& A, RankPredictor& pred, double threshold,
                      std::uint64_t seed) {
  const Index minmn = std::min(A.rows(), A.cols());
  Index k = std::clamp<Index>(pred.predicted_rank, 1, minmn);
  const Index oversample = 5;

  for (int attempt = 0;; ++attempt) {
    Index k_eff = std::min<Index>(k + oversample, minmn);
    // Beyond half size a full decomposition is cheaper and always sufficient.
    if (k_eff * 2 >= minmn) {
      SvdTriple full = svd_full(A);
      return full;
    }
    SvdTriple t = subspace_topk(A, k_eff, seed + static_cast<std::uint64_t>(attempt));
    // Smallest computed value below threshold certifies that everything
    // above threshold has been captured.
    if (t.sigma(t.sigma.size() - 1) <= threshold) {
      return t;
    }
    k = std::min<Index>(2 * k_eff, minmn);
  }
}

Matrix svt(const Matrix& A, double tau) {
  if (tau < 0.0) throw SpcpError(ErrorCode::InvalidConfig, "svt threshold must be >= 0");
  SvdTriple f = svd_full(A);
  Eigen::VectorXd shrunk = (f.sigma.array() - tau).max(0.0);
  Index keep = 0;
  while (keep < shrunk.size() && shrunk(keep) > 0.0) ++keep;
  return reconstruct_thresholded(f, shrunk, keep);
}

Matrix soft_threshold(const Matrix& A, double tau) {
  if (tau < 0.0) {
    throw SpcpError(ErrorCode::InvalidConfig, "shrinkage threshold must be >= 0");
  }
  return (A.array().sign() * (A.array().abs() - tau).max(0.0)).matrix();
}

Matrix grad_f_mu(const Matrix& X, double mu) {
  if (!(mu > 0.0)) throw SpcpError(ErrorCode::InvalidConfig, "mu must be > 0");
  SvdTriple f = svd_full(X);
  Eigen::VectorXd clipped = (f.sigma.array() / mu).min(1.0);
  return f.U * clipped.asDiagonal() * f.V.transpose();
}

double f_mu_from_sigma(const Eigen::VectorXd& sigma, double mu) {
  double v = 0.0;
  for (Index i = 0; i < sigma.size(); ++i) v += huber(sigma(i), mu);
  return v;
}

double f_mu_value(const Matrix& X, double mu) {
  if (!(mu > 0.0)) throw SpcpError(ErrorCode::InvalidConfig, "mu must be > 0");
  return f_mu_from_sigma(svd_full(X).sigma, mu);
}

SmoothedNuclearEval eval_f_mu(const Matrix& X, double mu) {
  if (!(mu > 0.0)) throw SpcpError(ErrorCode::InvalidConfig, "mu must be > 0");
  SvdTriple f = svd_full(X);
  SmoothedNuclearEval out;
  out.value = f_mu_from_sigma(f.sigma, mu);
  out.nuclear_norm = f.sigma.sum();
  Eigen::VectorXd clipped = (f.sigma.array() / mu).min(1.0);
  out.grad = f.U * clipped.asDiagonal() * f.V.transpose();
  return out;
}

Matrix grad_g_nu(const Matrix& S, double nu) {
  if (!(nu > 0.0)) throw SpcpError(ErrorCode::InvalidConfig, "nu must be > 0");
  return (S.array() / nu).cwiseMax(-1.0).cwiseMin(1.0).matrix();
}

double g_nu_value(const Matrix& S, double nu) {
  if (!(nu > 0.0)) throw SpcpError(ErrorCode::InvalidConfig, "nu must be > 0");
  double v = 0.0;
  const double* p = S.data();
  for (Index i = 0; i < S.size(); ++i) v += huber(p[i], nu);
  return v;
}

namespace {

Eigen::VectorXd smoothed_nuclear_prox_sigma(const Eigen::VectorXd& sigma, double rho, double mu) {
  Eigen::VectorXd out(sigma.size());
  for (Index i = 0; i < sigma.size(); ++i) {
    double s = sigma(i);
    out(i) = s - s / std::max(rho * s, 1.0 + rho * mu);
  }
  return out;
}

}  // namespace

Matrix prox_smoothed_nuclear(const Matrix& Xtilde, const Matrix& Q, double rho, double mu) {
  if (!(rho > 0.0) || !(mu > 0.0)) {
    throw SpcpError(ErrorCode::InvalidConfig, "rho and mu must be > 0");
  }
  if (Xtilde.rows() != Q.rows() || Xtilde.cols() != Q.cols()) {
    throw SpcpError(ErrorCode::ShapeMismatch, "Xtilde and Q shapes differ");
  }
  SvdTriple f = svd_full(Xtilde - Q / rho);
  Eigen::VectorXd x = smoothed_nuclear_prox_sigma(f.sigma, rho, mu);
  return f.U * x.asDiagonal() * f.V.transpose();
}

SvdEngine::SvdEngine(SvdMode mode, Index m, Index n, std::uint64_t seed)
    : mode_(mode), predictor_(RankPredictor::initial(m, n)), seed_(seed) {}

SvdEngine::SvtResult SvdEngine::svt(const Matrix& A, double tau) {
  if (A.isZero(0.0)) {
    // Nothing to factorize.
    return SvtResult{Matrix::Zero(A.rows(), A.cols()), Eigen::VectorXd()};
  }
  SvdTriple f;
  if (mode_ == SvdMode::PartialWithPrediction) {
    f = svd_partial(A, predictor_, tau, seed_ + static_cast<std::uint64_t>(count_) * 1315423911ULL);
  } else {
    f = svd_full(A);
  }
  ++count_;
  Eigen::VectorXd shrunk = (f.sigma.array() - tau).max(0.0);
  Index keep = 0;
  while (keep < shrunk.size() && shrunk(keep) > 0.0) ++keep;
  if (mode_ == SvdMode::PartialWithPrediction) {
    predictor_.update(static_cast<int>(keep), A.rows(), A.cols());
  }
  SvtResult out;
  out.X = reconstruct_thresholded(f, shrunk, keep);
  out.sigma = shrunk.head(keep);
  return out;
}

SmoothedNuclearEval SvdEngine::eval_f_mu(const Matrix& X, double mu) {
  ++count_;
  return spcp::eval_f_mu(X, mu);
}

SvdEngine::ProxNuclearResult SvdEngine::prox_smoothed_nuclear(const Matrix& Xtilde,
                                                              const Matrix& Q, double rho,
                                                              double mu) {
  if (!(rho > 0.0) || !(mu > 0.0)) {
    throw SpcpError(ErrorCode::InvalidConfig, "rho and mu must be > 0");
  }
  ++count_;
  SvdTriple f = svd_full(Xtilde - Q / rho);
  Eigen::VectorXd x = smoothed_nuclear_prox_sigma(f.sigma, rho, mu);
  ProxNuclearResult out;
  out.X = f.U * x.asDiagonal() * f.V.transpose();
  out.sigma = x;
  Eigen::VectorXd clipped = (x.array() / mu).min(1.0);
  out.grad = f.U * clipped.asDiagonal() * f.V.transpose();
  out.f_mu = f_mu_from_sigma(x, mu);
  out.nuclear = x.sum();
  return out;
}

}  // namespace spcp
