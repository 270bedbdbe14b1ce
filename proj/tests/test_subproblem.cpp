#include <doctest.h>

#include <cmath>

#include "spcp/prox.hpp"
#include "spcp/rng.hpp"
#include "spcp/subproblem.hpp"
#include "support/oracles.hpp"

using namespace spcp;
using oracles::random_matrix;

namespace {

PsInput random_ps(Rng& rng, Index m, Index n, double delta) {
  PsInput in;
  in.Xtilde = random_matrix(rng, m, n);
  in.Stilde = random_matrix(rng, m, n);
  in.Qx = random_matrix(rng, m, n);
  in.Qs = random_matrix(rng, m, n);
  in.L = rng.uniform(0.5, 4.0);
  in.D = random_matrix(rng, m, n);
  in.delta = delta;
  return in;
}

PnsInput random_pns(Rng& rng, Index m, Index n, double delta) {
  PnsInput in;
  in.Xtilde = random_matrix(rng, m, n);
  in.Q = random_matrix(rng, m, n);
  in.rho = rng.uniform(0.5, 4.0);
  in.xi = rng.uniform(0.1, 1.0);
  in.D = random_matrix(rng, m, n);
  in.delta = delta;
  return in;
}

}  // namespace

TEST_CASE("solve_ps interior case returns the unconstrained minimizer") {
  Rng rng(101);
  PsInput in = random_ps(rng, 3, 3, 0.0);
  Matrix qx = in.Xtilde - in.Qx / in.L;
  Matrix qs = in.Stilde - in.Qs / in.L;
  in.D = qx + qs;        // unconstrained minimizer exactly feasible
  in.delta = 0.5;
  SubproblemResult r = solve_ps(in);
  CHECK(r.theta == 0.0);
  CHECK((r.X - qx).norm() <= 1e-12);
  CHECK((r.S - qs).norm() <= 1e-12);
}

TEST_CASE("solve_ps delta zero with vanishing linear terms") {
  Rng rng(103);
  PsInput in = random_ps(rng, 3, 4, 0.0);
  in.Qx.setZero();
  in.Qs.setZero();
  SubproblemResult r = solve_ps(in);
  Matrix expectedX = 0.5 * (in.D - in.Stilde + in.Xtilde);
  CHECK((r.X - expectedX).norm() <= 1e-12);
  CHECK((r.S - (in.D - r.X)).norm() <= 1e-12);
  CHECK((r.X + r.S - in.D).norm() <= 1e-12);
}

TEST_CASE("solve_ps agrees with the split-projection oracle and passes KKT") {
  // Completing the square, the subproblem projects (q_x, q_s) onto the ball;
  // the correction splits evenly across the two blocks.
  Rng rng(107);
  for (int trial = 0; trial < 50; ++trial) {
    PsInput in = random_ps(rng, 3, 3, 0.5);
    SubproblemResult r = solve_ps(in);
    Matrix qx = in.Xtilde - in.Qx / in.L;
    Matrix qs = in.Stilde - in.Qs / in.L;
    Matrix T = qx + qs - in.D;
    Matrix X_oracle = qx, S_oracle = qs;
    if (T.norm() > in.delta) {
      double c = (T.norm() - in.delta) / T.norm();
      X_oracle -= 0.5 * c * T;
      S_oracle -= 0.5 * c * T;
    }
    CHECK((r.X - X_oracle).norm() <= 1e-6 * (1.0 + X_oracle.norm()));
    CHECK((r.S - S_oracle).norm() <= 1e-6 * (1.0 + S_oracle.norm()));
    CHECK(oracles::ps_kkt(in, r).worst <= 1e-9);
  }
}

TEST_CASE("solve_ps theta formula at the boundary") {
  Rng rng(109);
  PsInput in = random_ps(rng, 4, 4, 0.25);
  SubproblemResult r = solve_ps(in);
  Matrix qx = in.Xtilde - in.Qx / in.L;
  Matrix qs = in.Stilde - in.Qs / in.L;
  double rn = (qx + qs - in.D).norm();
  if (rn > in.delta) {
    CHECK(r.theta == doctest::Approx(0.5 * in.L * (rn / in.delta - 1.0)));
    CHECK((r.X + r.S - in.D).norm() == doctest::Approx(in.delta).epsilon(1e-10));
  }
}

TEST_CASE("solve_ps rejects mismatched shapes") {
  Rng rng(113);
  PsInput in = random_ps(rng, 3, 3, 0.1);
  in.Qs = Matrix::Zero(2, 3);
  CHECK_THROWS_AS(solve_ps(in), SpcpError);
}

TEST_CASE("phi at zero and at large theta") {
  Rng rng(127);
  Matrix A = random_matrix(rng, 3, 4).cwiseAbs();
  double rho = 1.7, xi = 0.4;
  CHECK(phi(0.0, A, rho, xi) == doctest::Approx(A.norm()));
  double mn = static_cast<double>(A.size());
  double big = 1e6 * xi * std::sqrt(mn) / A.norm();
  CHECK(phi(big, A, rho, xi) <= 1e-5 * A.norm());
}

TEST_CASE("phi of a constant matrix has the closed scalar form") {
  double a = 0.8, rho = 2.0, xi = 0.3;
  Matrix A = Matrix::Constant(3, 5, a);
  double mn = static_cast<double>(A.size());
  for (double theta : {0.1, 0.5, 1.0, 5.0, 50.0}) {
    double expected = std::sqrt(mn) * std::min(xi / theta, rho * a / (rho + theta));
    CHECK(phi(theta, A, rho, xi) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("phi is strictly decreasing") {
  Rng rng(131);
  Matrix A = random_matrix(rng, 4, 4).cwiseAbs();
  double rho = 1.1, xi = 0.6;
  double prev = phi(1e-3, A, rho, xi);
  for (double theta = 2e-3; theta < 1e3; theta *= 1.7) {
    double cur = phi(theta, A, rho, xi);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("solve_theta_star small-norm case returns zero") {
  Rng rng(137);
  Matrix A = 0.01 * random_matrix(rng, 3, 3).cwiseAbs();
  CHECK(solve_theta_star(A, 1.0, 0.5, 10.0) == 0.0);
}

TEST_CASE("solve_theta_star all-entries-small case has the closed form") {
  // Every entry at or below xi/rho puts every breakpoint at infinity, where
  // theta* = rho (||A||_F / delta - 1).
  double rho = 2.0, xi = 1.0;  // xi/rho = 0.5
  Matrix A = Matrix::Constant(4, 4, 0.4);
  double delta = 0.5 * A.norm();
  double theta = solve_theta_star(A, rho, xi, delta);
  CHECK(theta == doctest::Approx(rho * (A.norm() / delta - 1.0)).epsilon(1e-12));
}

TEST_CASE("solve_theta_star requires positive delta") {
  Matrix A = Matrix::Constant(2, 2, 1.0);
  CHECK_THROWS_AS(solve_theta_star(A, 1.0, 1.0, 0.0), SpcpError);
}

TEST_CASE("solve_theta_star matches bisection and solves phi = delta") {
  Rng rng(139);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix A = random_matrix(rng, 3, 4).cwiseAbs();
    double rho = rng.uniform(0.2, 5.0);
    double xi = rng.uniform(0.05, 2.0);
    double delta = rng.uniform(0.05, 0.9) * A.norm();
    double theta = solve_theta_star(A, rho, xi, delta);
    double oracle = oracles::bisect_theta(A, rho, xi, delta);
    CHECK(theta == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(std::abs(phi(theta, A, rho, xi) - delta) <= 1e-9 * delta);
  }
}

TEST_CASE("solve_theta_star tolerates duplicated entries") {
  Matrix A(2, 3);
  A << 1.0, 1.0, 1.0, 2.0, 2.0, 0.0;
  double rho = 1.5, xi = 0.7;
  for (double frac : {0.15, 0.4, 0.8}) {
    double delta = frac * A.norm();
    double theta = solve_theta_star(A, rho, xi, delta);
    CHECK(std::abs(phi(theta, A, rho, xi) - delta) <= 1e-9 * delta);
  }
}

TEST_CASE("quartic route agrees with the scalar iteration") {
  Rng rng(149);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix A = random_matrix(rng, 3, 3).cwiseAbs();
    double rho = rng.uniform(0.3, 3.0);
    double xi = rng.uniform(0.1, 1.5);
    double delta = rng.uniform(0.1, 0.85) * A.norm();
    double a = solve_theta_star(A, rho, xi, delta, ThetaMethod::BisectionNewton);
    double b = solve_theta_star(A, rho, xi, delta, ThetaMethod::Quartic);
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("solve_pns interior case") {
  Rng rng(151);
  PnsInput in = random_pns(rng, 3, 3, 0.0);
  Matrix q = in.Xtilde - in.Q / in.rho;
  in.D = q + 0.001 * random_matrix(rng, 3, 3);
  in.delta = 1.0;  // ||D - q|| well inside
  SubproblemResult r = solve_pns(in);
  CHECK(r.theta == 0.0);
  CHECK(r.S.norm() == 0.0);
  CHECK((r.X - q).norm() <= 1e-12);
}

TEST_CASE("solve_pns delta zero at the fixed point") {
  Matrix D(2, 2);
  D << 1.0, -2.0, 0.5, 3.0;
  PnsInput in{D, Matrix::Zero(2, 2), 1.5, 0.4, D, 0.0};
  SubproblemResult r = solve_pns(in);
  CHECK(r.S.norm() == 0.0);
  CHECK((r.X - D).norm() == 0.0);
}

TEST_CASE("solve_pns delta zero splits D exactly") {
  Rng rng(157);
  for (int trial = 0; trial < 20; ++trial) {
    PnsInput in = random_pns(rng, 3, 4, 0.0);
    SubproblemResult r = solve_pns(in);
    CHECK((r.X + r.S - in.D).norm() <= 1e-12 * (1.0 + in.D.norm()));
    CHECK(oracles::pns_kkt(in, r).worst <= 1e-9);
  }
}

TEST_CASE("solve_pns passes KKT and beats the subgradient oracle") {
  Rng rng(163);
  for (int trial = 0; trial < 10; ++trial) {
    PnsInput in = random_pns(rng, 3, 3, 0.3);
    SubproblemResult r = solve_pns(in);
    CHECK(oracles::pns_kkt(in, r).worst <= 1e-9);
    double ours = oracles::pns_objective(r.X, r.S, in);
    double oracle = oracles::pns_subgradient_oracle(in, 50000);
    CHECK(ours <= oracle + 1e-5 * (1.0 + std::abs(oracle)));
  }
}

TEST_CASE("solve_pns result is never worse than random feasible points") {
  Rng rng(167);
  PnsInput in = random_pns(rng, 3, 3, 0.4);
  SubproblemResult r = solve_pns(in);
  double best = oracles::pns_objective(r.X, r.S, in);
  for (int trial = 0; trial < 1000; ++trial) {
    Matrix X = random_matrix(rng, 3, 3, 2.0);
    Matrix S = random_matrix(rng, 3, 3, 2.0);
    oracles::project_chi(X, S, in.D, in.delta);
    CHECK(best <= oracles::pns_objective(X, S, in) + 1e-9);
  }
}

TEST_CASE("solve_pns feasibility and complementarity invariants") {
  Rng rng(173);
  for (int trial = 0; trial < 100; ++trial) {
    double delta = trial % 3 == 0 ? 0.0 : rng.uniform(0.05, 2.0);
    PnsInput in = random_pns(rng, 4, 3, delta);
    SubproblemResult r = solve_pns(in);
    double infeas = (r.X + r.S - in.D).norm();
    CHECK(infeas <= in.delta * (1.0 + 1e-12) + (in.delta == 0.0 ? 1e-12 : 0.0));
    CHECK(r.theta >= 0.0);
    CHECK(std::abs(r.theta * (infeas - in.delta)) <= 1e-8 * (1.0 + r.theta * in.delta));
  }
}

TEST_CASE("certificate vanishes in the interior") {
  Rng rng(179);
  PnsInput in = random_pns(rng, 3, 3, 0.0);
  Matrix q = in.Xtilde - in.Q / in.rho;
  in.D = q;
  in.delta = 2.0;
  SubproblemResult r = solve_pns(in);
  Matrix W = chi_subgradient_certificate(r, in);
  CHECK(W.norm() <= 1e-10);
}

TEST_CASE("certificate norm equals theta delta on the boundary") {
  Rng rng(181);
  for (int trial = 0; trial < 20; ++trial) {
    PnsInput in = random_pns(rng, 3, 3, 0.25);
    SubproblemResult r = solve_pns(in);
    Matrix W = chi_subgradient_certificate(r, in);
    if (r.theta > 0.0) {
      CHECK(std::abs(W.norm() - r.theta * in.delta) <= 1e-8 * (1.0 + r.theta * in.delta));
    }
  }
}

TEST_CASE("certificate is a subgradient of the ball indicator") {
  Rng rng(191);
  PnsInput in = random_pns(rng, 3, 3, 0.3);
  SubproblemResult r = solve_pns(in);
  REQUIRE(r.theta > 0.0);
  Matrix W = chi_subgradient_certificate(r, in);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix X = random_matrix(rng, 3, 3, 2.0);
    Matrix S = random_matrix(rng, 3, 3, 2.0);
    oracles::project_chi(X, S, in.D, in.delta);
    double inner = (W.array() * (X - r.X + S - r.S).array()).sum();
    CHECK(inner <= 1e-8 * (1.0 + W.norm()));
  }
}

TEST_CASE("certificate rejects a corrupted solution") {
  Rng rng(193);
  PnsInput in = random_pns(rng, 3, 3, 0.3);
  SubproblemResult r = solve_pns(in);
  r.X.array() += 0.5;
  CHECK_THROWS_AS(chi_subgradient_certificate(r, in), SpcpError);
}

TEST_CASE("shrink_to_ball is exact on the boundary and minimal") {
  Rng rng(197);
  for (int trial = 0; trial < 25; ++trial) {
    Matrix R = random_matrix(rng, 4, 3);
    double xi = rng.uniform(0.1, 1.0);
    double delta = rng.uniform(0.1, 0.8) * R.norm();
    BallShrinkResult b = shrink_to_ball(R, xi, delta);
    CHECK((b.S - R).norm() == doctest::Approx(delta).epsilon(1e-9));
    // prox characterization: S = shrink(R, xi / theta)
    CHECK((b.S - soft_threshold(R, xi / b.theta)).norm() <= 1e-12);
  }
  // interior and degenerate cases
  Matrix R = Matrix::Constant(2, 2, 0.1);
  CHECK(shrink_to_ball(R, 1.0, 10.0).S.norm() == 0.0);
  CHECK((shrink_to_ball(R, 1.0, 0.0).S - R).norm() == 0.0);
}
