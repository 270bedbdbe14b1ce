#include "spcp/solvers.hpp"

#include <cmath>
#include <limits>

#include "spcp/prox.hpp"
#include "spcp/subproblem.hpp"

namespace spcp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_entry(const SpcpProblem& p, const SolverConfig& cfg) {
  require_valid(p);
  require_valid(cfg);
}

SpcpSolution finish(Matrix X, Matrix S, Matrix Y, double theta, int iters, long svd_count,
                    double objective, bool converged, const SpcpProblem& p) {
  SpcpSolution sol;
  sol.infeasibility = (X + S - p.D).norm();
  sol.X = std::move(X);
  sol.S = std::move(S);
  sol.Y = std::move(Y);
  sol.theta = theta;
  sol.iters = iters;
  sol.svd_count = svd_count;
  sol.objective = objective;
  sol.converged = converged;
  return sol;
}

}  // namespace

double relative_change(const Matrix& Xprev, const Matrix& Sprev, const Matrix& Xcur,
                       const Matrix& Scur) {
  if (Xprev.rows() != Xcur.rows() || Xprev.cols() != Xcur.cols() ||
      Sprev.rows() != Scur.rows() || Sprev.cols() != Scur.cols()) {
    throw SpcpError(ErrorCode::ShapeMismatch, "iterate shapes differ");
  }
  double num = std::sqrt((Xcur - Xprev).squaredNorm() + (Scur - Sprev).squaredNorm());
  double den = std::sqrt(Xprev.squaredNorm() + Sprev.squaredNorm()) + 1.0;
  return num / den;
}

bool stopping_met(const Matrix& Xprev, const Matrix& Sprev, const Matrix& Xcur,
                  const Matrix& Scur, double tol) {
  if (!(tol > 0.0)) throw SpcpError(ErrorCode::InvalidConfig, "tol must be > 0");
  return relative_change(Xprev, Sprev, Xcur, Scur) <= tol;
}

double rho_schedule(int k, const SolverConfig& cfg) {
  if (k < 0) throw SpcpError(ErrorCode::InvalidConfig, "iteration index must be >= 0");
  switch (cfg.rho_growth) {
    case RhoGrowth::SqrtK:
      return cfg.rho0 * std::sqrt(static_cast<double>(k) + 1.0);
    case RhoGrowth::Arithmetic:
      return cfg.rho0 * (static_cast<double>(k) + 1.0);
    case RhoGrowth::Geometric:
      return std::min(cfg.rho0 * std::pow(cfg.rho_factor, k), cfg.rho_max);
  }
  throw SpcpError(ErrorCode::InvalidConfig, "unknown rho growth mode");
}

SolveResult solve_smooth_apg(const SpcpProblem& p, const SolverConfig& cfg) {
  check_entry(p, cfg);
  const Index m = p.D.rows();
  const Index n = p.D.cols();
  const double L = 1.0 / cfg.mu + 1.0 / cfg.nu;

  // Gradients need the full spectrum, so the engine runs in Full mode.
  SvdEngine eng(SvdMode::Full, m, n, cfg.seed);

  const Matrix X0 = Matrix::Zero(m, n);
  const Matrix S0 = p.D;  // (X0, S0) in chi for every delta >= 0
  Matrix X = X0;
  Matrix S = S0;
  Matrix Gx = Matrix::Zero(m, n);
  Matrix Gs = Matrix::Zero(m, n);

  SolveResult res;
  res.history.reserve(static_cast<std::size_t>(std::min(cfg.max_iters, 4096)));
  bool converged = false;
  double last_theta = 0.0;
  int k = 0;
  for (; k < cfg.max_iters; ++k) {
    SmoothedNuclearEval fx = eng.eval_f_mu(X, cfg.mu);
    if (!res.history.empty()) {
      // The factorization of X_k prices the pair recorded last iteration.
      res.history.back().objective = fx.nuclear_norm + p.xi * l1_norm(S);
      res.history.back().smoothed_objective = fx.value + p.xi * g_nu_value(S, cfg.nu);
    }
    Matrix gs = p.xi * grad_g_nu(S, cfg.nu);

    SubproblemResult yk = solve_ps({X, S, fx.grad, gs, L, p.D, p.delta});
    double w = 0.5 * (static_cast<double>(k) + 1.0);
    Gx += w * fx.grad;
    Gs += w * gs;
    SubproblemResult zk = solve_ps({X0, S0, Gx, Gs, L, p.D, p.delta});

    double a = (static_cast<double>(k) + 1.0) / (static_cast<double>(k) + 3.0);
    double b = 2.0 / (static_cast<double>(k) + 3.0);
    Matrix Xn = a * yk.X + b * zk.X;
    Matrix Sn = a * yk.S + b * zk.S;

    double rel = relative_change(X, S, Xn, Sn);
    X = std::move(Xn);
    S = std::move(Sn);
    last_theta = yk.theta;

    IterStats st;
    st.iter = k;
    st.objective = kNaN;  // backfilled by the next factorization
    st.smoothed_objective = kNaN;
    st.infeasibility = (X + S - p.D).norm();
    st.rel_change = rel;
    st.svd_count_cumulative = eng.count();
    st.theta = yk.theta;
    st.rho = 0.0;
    res.history.push_back(st);

    if (rel <= cfg.tol) {
      converged = true;
      ++k;
      break;
    }
  }

  SvdTriple fX = svd_full(X);  // instrumentation, not counted
  double objective = fX.sigma.sum() + p.xi * l1_norm(S);
  if (!res.history.empty()) {
    res.history.back().objective = objective;
    res.history.back().smoothed_objective =
        f_mu_from_sigma(fX.sigma, cfg.mu) + p.xi * g_nu_value(S, cfg.nu);
  }
  res.solution = finish(std::move(X), std::move(S), Matrix::Zero(m, n), last_theta, k,
                        eng.count(), objective, converged, p);
  return res;
}

SolveResult solve_partial_apg(const SpcpProblem& p, const SolverConfig& cfg) {
  check_entry(p, cfg);
  const Index m = p.D.rows();
  const Index n = p.D.cols();
  const double rho = 1.0 / cfg.mu;  // Lipschitz constant of grad f_mu

  SvdEngine eng(SvdMode::Full, m, n, cfg.seed);

  const Matrix X0 = Matrix::Zero(m, n);
  const Matrix S0 = p.D;
  Matrix X = X0;
  Matrix S = S0;
  Matrix Zx = X0;
  Matrix G = Matrix::Zero(m, n);
  double wsum = 0.0;

  SolveResult res;
  bool converged = false;
  double last_theta = 0.0;
  int k = 0;
  for (; k < cfg.max_iters; ++k) {
    double ck = static_cast<double>(k) / (static_cast<double>(k) + 2.0);
    double dk = 2.0 / (static_cast<double>(k) + 2.0);
    Matrix Yx = ck * X + dk * Zx;
    SmoothedNuclearEval fy = eng.eval_f_mu(Yx, cfg.mu);

    double w = 0.5 * (static_cast<double>(k) + 1.0);
    G += w * fy.grad;
    wsum += w;
    SubproblemResult zs = solve_pns({X0, G, rho, wsum * p.xi, p.D, p.delta});
    Zx = zs.X;

    Matrix Xn = ck * X + dk * zs.X;
    Matrix Sn = ck * S + dk * zs.S;
    double rel = relative_change(X, S, Xn, Sn);
    X = std::move(Xn);
    S = std::move(Sn);
    last_theta = zs.theta;

    IterStats st;
    st.iter = k;
    st.objective = kNaN;
    st.smoothed_objective = kNaN;
    if (cfg.stats_objective_every > 0 && k % cfg.stats_objective_every == 0) {
      SvdTriple fX = svd_full(X);  // instrumentation, not counted
      st.objective = fX.sigma.sum() + p.xi * l1_norm(S);
      st.smoothed_objective = f_mu_from_sigma(fX.sigma, cfg.mu) + p.xi * l1_norm(S);
    }
    st.infeasibility = (X + S - p.D).norm();
    st.rel_change = rel;
    st.svd_count_cumulative = eng.count();
    st.theta = zs.theta;
    st.rho = rho;
    res.history.push_back(st);

    if (rel <= cfg.tol) {
      converged = true;
      ++k;
      break;
    }
  }

  SvdTriple fX = svd_full(X);  // instrumentation
  double objective = fX.sigma.sum() + p.xi * l1_norm(S);
  if (!res.history.empty()) {
    res.history.back().objective = objective;
    res.history.back().smoothed_objective =
        f_mu_from_sigma(fX.sigma, cfg.mu) + p.xi * l1_norm(S);
  }
  res.solution = finish(std::move(X), std::move(S), Matrix::Zero(m, n), last_theta, k,
                        eng.count(), objective, converged, p);
  return res;
}

SolveResult solve_alm_s(const SpcpProblem& p, const SolverConfig& cfg) {
  check_entry(p, cfg);
  if (cfg.rho0 < 1.0 / cfg.mu) {
    throw SpcpError(ErrorCode::InvalidRho, "penalty must be at least 1/mu");
  }
  const Index m = p.D.rows();
  const Index n = p.D.cols();
  const double rho = cfg.rho0;  // fixed penalty

  SvdEngine eng(SvdMode::Full, m, n, cfg.seed);

  Matrix Z = Matrix::Zero(m, n);
  Matrix S = p.D;
  Matrix Y = Matrix::Zero(m, n);

  SolveResult res;
  bool converged = false;
  double last_theta = 0.0;
  int k = 0;
  for (; k < cfg.max_iters; ++k) {
    SvdEngine::ProxNuclearResult px = eng.prox_smoothed_nuclear(Z, Y, rho, cfg.mu);
    Matrix Xn = std::move(px.X);
    Matrix grad = std::move(px.grad);
    double f_val = px.f_mu;
    double l1S = l1_norm(S);

    double model = f_val + p.xi * l1S + (Y.array() * (Xn - Z).array()).sum() +
                   0.5 * rho * (Xn - Z).squaredNorm();
    bool feasible = (Xn + S - p.D).norm() <= p.delta * (1.0 + cfg.feas_slack);
    bool skip = !feasible || (f_val + p.xi * l1S > model);
    if (skip) {
      Xn = Z;
      SmoothedNuclearEval ev = eng.eval_f_mu(Xn, cfg.mu);
      grad = std::move(ev.grad);
    }

    SubproblemResult zs = solve_pns({Xn, grad, rho, p.xi, p.D, p.delta});
    Y = -grad + rho * (Xn - zs.X);
    last_theta = zs.theta;

    double rel = relative_change(Z, S, zs.X, zs.S);
    Z = std::move(zs.X);
    S = std::move(zs.S);

    IterStats st;
    st.iter = k;
    st.objective = kNaN;
    st.smoothed_objective = kNaN;
    if (cfg.stats_objective_every > 0 && k % cfg.stats_objective_every == 0) {
      SvdTriple fZ = svd_full(Z);  // instrumentation, not counted
      st.objective = fZ.sigma.sum() + p.xi * l1_norm(S);
      st.smoothed_objective = f_mu_from_sigma(fZ.sigma, cfg.mu) + p.xi * l1_norm(S);
    }
    st.infeasibility = (Z + S - p.D).norm();
    st.rel_change = rel;
    st.svd_count_cumulative = eng.count();
    st.theta = zs.theta;
    st.rho = rho;
    st.skipped = skip;
    res.history.push_back(st);

    if (rel <= cfg.tol) {
      converged = true;
      ++k;
      break;
    }
  }

  SvdTriple fZ = svd_full(Z);  // instrumentation
  double objective = fZ.sigma.sum() + p.xi * l1_norm(S);
  if (!res.history.empty()) {
    res.history.back().objective = objective;
    res.history.back().smoothed_objective =
        f_mu_from_sigma(fZ.sigma, cfg.mu) + p.xi * l1_norm(S);
  }
  res.solution =
      finish(std::move(Z), std::move(S), std::move(Y), last_theta, k, eng.count(),
             objective, converged, p);
  return res;
}

SolveResult solve_nsa(const SpcpProblem& p, const SolverConfig& cfg,
                      const NsaObserver& observer) {
  check_entry(p, cfg);
  const Index m = p.D.rows();
  const Index n = p.D.cols();

  SvdEngine eng(cfg.svd_mode, m, n, cfg.seed);

  Matrix Z = Matrix::Zero(m, n);
  Matrix Y = Matrix::Zero(m, n);
  Matrix Xprev = Z;
  Matrix Sprev = Z;
  Matrix X = Z;
  Matrix S = Z;
  Eigen::VectorXd sigmaX;

  SolveResult res;
  bool converged = false;
  int k = 0;
  for (; k < cfg.max_iters; ++k) {
    double rho = rho_schedule(k, cfg);
    SvdEngine::SvtResult sv = eng.svt(Z - Y / rho, 1.0 / rho);
    X = std::move(sv.X);
    sigmaX = std::move(sv.sigma);
    Matrix Yhat = Y + rho * (X - Z);

    SubproblemResult zs = solve_pns({X, -Y, rho, p.xi, p.D, p.delta});
    S = zs.S;
    Matrix Ynext = Y + rho * (X - zs.X);
    if (observer) {
      observer(NsaIterate{k, X, zs.X, S, Y, Ynext, Yhat, zs.theta, rho});
    }
    Z = std::move(zs.X);
    Y = std::move(Ynext);

    double rel = relative_change(Xprev, Sprev, X, S);
    IterStats st;
    st.iter = k;
    st.objective = sigmaX.sum() + p.xi * l1_norm(S);
    st.smoothed_objective = kNaN;
    st.infeasibility = (X + S - p.D).norm();
    st.rel_change = rel;
    st.svd_count_cumulative = eng.count();
    st.theta = zs.theta;
    st.rho = rho;
    res.history.push_back(st);

    Xprev = X;
    Sprev = S;
    // A zero pair with data outside the ball means the shrinkage thresholds
    // are still above every entry; the step-length rule is not armed yet.
    bool engaged = !(X.isZero(0.0) && S.isZero(0.0)) || p.D.norm() <= p.delta;
    if (engaged && rel <= cfg.tol) {
      converged = true;
      ++k;
      break;
    }
  }

  // The thresholding step fixes the low-rank part; the returned sparse part is
  // the l1-cheapest matrix that keeps the pair inside the ball.
  BallShrinkResult fin = shrink_to_ball(p.D - X, p.xi, p.delta);
  S = std::move(fin.S);
  double objective = sigmaX.sum() + p.xi * l1_norm(S);
  res.solution = finish(std::move(X), std::move(S), std::move(Y), fin.theta, k, eng.count(),
                        objective, converged, p);
  return res;
}

SolveResult solve(const SpcpProblem& p, const SolverConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::SmoothApg: return solve_smooth_apg(p, cfg);
    case Algorithm::PartialApg: return solve_partial_apg(p, cfg);
    case Algorithm::AlmS: return solve_alm_s(p, cfg);
    case Algorithm::Nsa: return solve_nsa(p, cfg);
  }
  throw SpcpError(ErrorCode::InvalidConfig, "unknown algorithm");
}

}  // namespace spcp
