#pragma once

#include "spcp/model.hpp"

namespace spcp {

/// Data of the fully smoothed subproblem
///   min (L/2)(||X - Xtilde||_F^2 + ||S - Stilde||_F^2) + <Qx, X> + <Qs, S>
///   s.t. ||X + S - D||_F <= delta.
struct PsInput {
  Matrix Xtilde;
  Matrix Stilde;
  Matrix Qx;
  Matrix Qs;
  double L = 1.0;
  Matrix D;
  double delta = 0.0;
};

/// Data of the partially smooth subproblem
///   min xi ||S||_1 + <Q, X - Xtilde> + (rho/2) ||X - Xtilde||_F^2
///   s.t. ||X + S - D||_F <= delta.
struct PnsInput {
  Matrix Xtilde;
  Matrix Q;
  double rho = 1.0;
  double xi = 1.0;
  Matrix D;
  double delta = 0.0;
};

struct SubproblemResult {
  Matrix X;
  Matrix S;
  double theta = 0.0;  // multiplier of the ball constraint
};

/// Closed-form solution of the smoothed subproblem.
SubproblemResult solve_ps(const PsInput& in);

/// phi(theta) = || min{(xi/theta) E, (rho/(rho+theta)) A} ||_F for theta > 0,
/// phi(0) = ||A||_F. A must be entrywise nonnegative.
double phi(double theta, const Matrix& A, double rho, double xi);

enum class ThetaMethod {
  BisectionNewton,  // safeguarded scalar iteration on the bracketing interval
  Quartic,          // closed-form quartic roots on the same interval
};

/// The unique theta >= 0 with phi(theta) = delta (0 when ||A||_F <= delta),
/// located by sorting the entries of A and solving on the bracketing
/// breakpoint interval. Requires delta > 0.
double solve_theta_star(const Matrix& A, double rho, double xi, double delta,
                        ThetaMethod method = ThetaMethod::BisectionNewton);

/// Closed-form solution of the partially smooth subproblem.
SubproblemResult solve_pns(const PnsInput& in);

/// W* = -Q + rho (Xtilde - X*). Verifies the identities
/// W* = theta* (X* + S* - D) and ||W*||_F = theta* delta; throws
/// CertificateViolation if they fail beyond tolerance, which signals a solver
/// bug rather than bad data.
Matrix chi_subgradient_certificate(const SubproblemResult& res, const PnsInput& in);

struct BallShrinkResult {
  Matrix S;
  double theta = 0.0;
};

/// min xi ||S||_1 s.t. ||S - R||_F <= delta: the rho -> infinity limit of the
/// partially smooth subproblem. For delta = 0 returns S = R.
BallShrinkResult shrink_to_ball(const Matrix& R, double xi, double delta);

}  // namespace spcp
