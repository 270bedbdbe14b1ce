#pragma once

// Independent oracles used by the unit and acceptance suites. Everything here
// follows a different computational route than the library code it checks:
// plain bisection, projected subgradient descent, finite differences and
// direct formula evaluation.

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "spcp/model.hpp"
#include "spcp/rng.hpp"
#include "spcp/subproblem.hpp"

namespace oracles {

using spcp::Index;
using spcp::Matrix;

inline Matrix random_matrix(spcp::Rng& rng, Index m, Index n, double scale = 1.0) {
  Matrix A(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) A(i, j) = scale * rng.normal();
  }
  return A;
}

// phi evaluated directly from its definition; deliberately not the library's
// sorted-breakpoint machinery.
inline double phi_direct(double theta, const Matrix& A, double rho, double xi) {
  if (theta == 0.0) return A.norm();
  double sum = 0.0;
  for (Index i = 0; i < A.size(); ++i) {
    double v = std::min(xi / theta, rho / (rho + theta) * std::abs(A(i)));
    sum += v * v;
  }
  return std::sqrt(sum);
}

// Safeguarded bisection on phi(theta) = delta, bracketed by the global bound
// theta* <= xi sqrt(mn) / delta.
inline double bisect_theta(const Matrix& A, double rho, double xi, double delta,
                           int iters = 200) {
  if (A.norm() <= delta) return 0.0;
  double lo = 0.0;
  double hi = xi * std::sqrt(static_cast<double>(A.size())) / delta;
  for (int it = 0; it < iters; ++it) {
    double mid = 0.5 * (lo + hi);
    if (phi_direct(mid, A, rho, xi) > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * hi) break;
  }
  return 0.5 * (lo + hi);
}

// Projection onto {(X, S) : ||X + S - D||_F <= delta}; the correction splits
// evenly between the two blocks.
inline void project_chi(Matrix& X, Matrix& S, const Matrix& D, double delta) {
  Matrix T = X + S - D;
  double norm = T.norm();
  if (norm <= delta) return;
  double c = (norm - delta) / norm;
  X -= 0.5 * c * T;
  S -= 0.5 * c * T;
}

// Objective of the partially smooth subproblem.
inline double pns_objective(const Matrix& X, const Matrix& S, const spcp::PnsInput& in) {
  return in.xi * S.cwiseAbs().sum() + (in.Q.array() * (X - in.Xtilde).array()).sum() +
         0.5 * in.rho * (X - in.Xtilde).squaredNorm();
}

// Projected subgradient descent on the partially smooth subproblem; the step
// length diminishes by stagewise halving, which converges geometrically on
// this sharp/strongly-convex composite. Returns the best objective seen.
inline double pns_subgradient_oracle(const spcp::PnsInput& in, int iters, Matrix* X_out = nullptr,
                                     Matrix* S_out = nullptr) {
  Matrix X = in.Xtilde;
  Matrix S = in.D - X;
  project_chi(X, S, in.D, in.delta);
  double best = pns_objective(X, S, in);
  Matrix bestX = X, bestS = S;
  const int stages = 40;
  const int per_stage = std::max(iters / stages, 1);
  double alpha = 0.5 / in.rho;
  for (int stage = 0; stage < stages; ++stage, alpha *= 0.5) {
    // restart each stage from the incumbent
    X = bestX;
    S = bestS;
    for (int k = 0; k < per_stage; ++k) {
      Matrix gX = in.Q + in.rho * (X - in.Xtilde);
      Matrix gS = in.xi * S.array().sign().matrix();
      X -= alpha * gX;
      S -= alpha * gS;
      project_chi(X, S, in.D, in.delta);
      double val = pns_objective(X, S, in);
      if (val < best) {
        best = val;
        bestX = X;
        bestS = S;
      }
    }
  }
  if (X_out) *X_out = bestX;
  if (S_out) *S_out = bestS;
  return best;
}

// Central finite differences of a scalar field over matrices.
inline Matrix finite_difference_gradient(const std::function<double(const Matrix&)>& f,
                                         const Matrix& X, double h) {
  Matrix g(X.rows(), X.cols());
  Matrix Xp = X;
  for (Index i = 0; i < X.size(); ++i) {
    double orig = Xp(i);
    Xp(i) = orig + h;
    double fp = f(Xp);
    Xp(i) = orig - h;
    double fm = f(Xp);
    Xp(i) = orig;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

struct KktReport {
  double worst = 0.0;  // largest scaled residual across all conditions
};

// KKT residuals of the fully smoothed subproblem, all five conditions scaled
// to be comparable. For delta = 0 the ball collapses to the affine constraint
// X + S = D; stationarity is checked on the eliminated form.
inline KktReport ps_kkt(const spcp::PsInput& in, const spcp::SubproblemResult& r) {
  KktReport rep;
  double scale = 1.0 + in.L + r.theta;
  Matrix resid = r.X + r.S - in.D;
  double norm_resid = resid.norm();
  double denom = scale * (1.0 + std::max(in.Xtilde.norm(), in.Stilde.norm()));
  if (in.delta == 0.0) {
    rep.worst = std::max(rep.worst, norm_resid / (1.0 + in.D.norm()));
    // with S = D - X: L(X - qx) - L((D - X) - qs) = 0
    Matrix qx = in.Xtilde - in.Qx / in.L;
    Matrix qs = in.Stilde - in.Qs / in.L;
    Matrix st = in.L * (r.X - qx) - in.L * (in.D - r.X - qs);
    rep.worst = std::max(rep.worst, st.norm() / denom);
    return rep;
  }
  // primal feasibility
  rep.worst = std::max(rep.worst, (norm_resid - in.delta) / (1.0 + in.delta));
  // dual feasibility
  rep.worst = std::max(rep.worst, -r.theta);
  // complementarity
  rep.worst =
      std::max(rep.worst, std::abs(r.theta * (norm_resid - in.delta)) / (1.0 + r.theta * in.delta));
  // stationarity in X and S
  Matrix sx = in.L * (r.X - in.Xtilde) + r.theta * resid + in.Qx;
  Matrix ss = in.L * (r.S - in.Stilde) + r.theta * resid + in.Qs;
  rep.worst = std::max(rep.worst, sx.norm() / denom);
  rep.worst = std::max(rep.worst, ss.norm() / denom);
  return rep;
}

// KKT residuals of the partially smooth subproblem, including the subgradient
// inclusion G in d||S*||_1. For delta = 0 checks the stationarity system of
// the equality-constrained form instead.
inline KktReport pns_kkt(const spcp::PnsInput& in, const spcp::SubproblemResult& r) {
  KktReport rep;
  Matrix resid = r.X + r.S - in.D;
  double norm_resid = resid.norm();
  if (in.delta == 0.0) {
    rep.worst = std::max(rep.worst, norm_resid / (1.0 + in.D.norm()));
    // With S = D - X eliminated, d/dX ||D - X||_1 = -d||S||_1, so
    // stationarity reads (Q + rho (X - Xtilde))/xi in d||S*||_1.
    Matrix G = (in.Q + in.rho * (r.X - in.Xtilde)) / in.xi;
    for (Index i = 0; i < G.size(); ++i) {
      double g = G(i);
      double s = r.S(i);
      double viol = s != 0.0 ? std::abs(g - (s > 0 ? 1.0 : -1.0)) : std::max(0.0, std::abs(g) - 1.0);
      rep.worst = std::max(rep.worst, viol / (1.0 + std::abs(g)));
    }
    return rep;
  }
  // i. stationarity in X
  Matrix sx = in.Q + in.rho * (r.X - in.Xtilde) + r.theta * resid;
  rep.worst = std::max(rep.worst, sx.norm() / ((1.0 + in.rho + r.theta) * (1.0 + in.Xtilde.norm())));
  // ii. stationarity in S with G in d||S||_1
  if (r.theta > 0.0) {
    Matrix G = -(r.theta / in.xi) * resid;
    for (Index i = 0; i < G.size(); ++i) {
      double g = G(i);
      double s = r.S(i);
      double viol = s != 0.0 ? std::abs(g - (s > 0 ? 1.0 : -1.0)) : std::max(0.0, std::abs(g) - 1.0);
      rep.worst = std::max(rep.worst, viol / (1.0 + std::abs(g)));
    }
  } else {
    // theta = 0 requires S* = 0.
    rep.worst = std::max(rep.worst, r.S.cwiseAbs().maxCoeff());
  }
  // iii-v. feasibility, dual sign, complementarity
  rep.worst = std::max(rep.worst, (norm_resid - in.delta) / (1.0 + in.delta));
  rep.worst = std::max(rep.worst, -r.theta);
  rep.worst =
      std::max(rep.worst, std::abs(r.theta * (norm_resid - in.delta)) / (1.0 + r.theta * in.delta));
  return rep;
}

}  // namespace oracles
