#pragma once

#include "spcp/model.hpp"
#include "spcp/observers.hpp"

namespace spcp {

/// Relative step length of Eq.-style stopping rule:
/// ||(Xc, Sc) - (Xp, Sp)||_F / (||(Xp, Sp)||_F + 1) <= tol, with the stacked
/// Frobenius norm sqrt(||dX||^2 + ||dS||^2). The test is inclusive.
bool stopping_met(const Matrix& Xprev, const Matrix& Sprev, const Matrix& Xcur,
                  const Matrix& Scur, double tol);

double relative_change(const Matrix& Xprev, const Matrix& Sprev, const Matrix& Xcur,
                       const Matrix& Scur);

/// Penalty at iteration k. SqrtK: rho0 sqrt(k+1); Arithmetic: rho0 (k+1);
/// Geometric: rho0 * factor^k capped at rho_max. Nondecreasing in k in every
/// mode.
double rho_schedule(int k, const SolverConfig& cfg);

/// Nesterov-style accelerated gradient on the fully smoothed objective
/// f_mu(X) + xi g_nu(S) over the feasibility ball.
SolveResult solve_smooth_apg(const SpcpProblem& p, const SolverConfig& cfg);

/// Accelerated gradient with only the nuclear term smoothed; the S block is
/// handled exactly through the closed-form subproblem.
SolveResult solve_partial_apg(const SpcpProblem& p, const SolverConfig& cfg);

/// Alternating linearization with skipping steps on the partially smoothed
/// objective, fixed penalty rho0 >= 1/mu.
SolveResult solve_alm_s(const SpcpProblem& p, const SolverConfig& cfg);

/// Non-smooth augmented Lagrangian method with partial variable splitting;
/// works directly with ||X||_* + xi ||S||_1. The optional observer sees every
/// iterate; it never influences the computation.
SolveResult solve_nsa(const SpcpProblem& p, const SolverConfig& cfg,
                      const NsaObserver& observer = {});

/// Dispatch on cfg.algorithm.
SolveResult solve(const SpcpProblem& p, const SolverConfig& cfg);

}  // namespace spcp
