#include <doctest.h>

#include <cmath>
#include <limits>

#include "spcp/model.hpp"

using namespace spcp;

TEST_CASE("validate_problem accepts a plain feasible instance") {
  SpcpProblem p = make_problem(Matrix::Zero(2, 2), 0.0);
  CHECK(p.xi == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_FALSE(validate_problem(p).has_value());
}

TEST_CASE("validate_problem flags NaN entries") {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 1) = std::numeric_limits<double>::quiet_NaN();
  auto issue = validate_problem(make_problem(std::move(D), 0.1));
  REQUIRE(issue.has_value());
  CHECK(issue->code == ErrorCode::NonFiniteEntry);
}

TEST_CASE("validate_problem flags negative delta") {
  auto issue = validate_problem(make_problem(Matrix::Zero(2, 2), -0.1));
  REQUIRE(issue.has_value());
  CHECK(issue->code == ErrorCode::NegativeDelta);
}

TEST_CASE("validate_problem flags nonpositive xi") {
  auto issue = validate_problem(make_problem(Matrix::Zero(2, 2), 0.0, 0.0));
  REQUIRE(issue.has_value());
  CHECK(issue->code == ErrorCode::NonPositiveXi);
}

TEST_CASE("default_xi uses the larger dimension") {
  CHECK(default_xi(4, 9) == doctest::Approx(1.0 / 3.0));
  CHECK(default_xi(9, 4) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("require_valid throws the violated invariant") {
  CHECK_THROWS_AS(require_valid(make_problem(Matrix::Zero(2, 2), -1.0)), SpcpError);
  try {
    require_valid(make_problem(Matrix::Zero(2, 2), -1.0));
  } catch (const SpcpError& e) {
    CHECK(e.code() == ErrorCode::NegativeDelta);
  }
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.tol = 0.0;
  CHECK_THROWS_AS(require_valid(cfg), SpcpError);
  cfg.tol = 1e-6;
  cfg.max_iters = 0;
  CHECK_THROWS_AS(require_valid(cfg), SpcpError);
  cfg.max_iters = 10;
  cfg.mu = -1.0;
  CHECK_THROWS_AS(require_valid(cfg), SpcpError);
  cfg.mu = 1e-3;
  CHECK_NOTHROW(require_valid(cfg));
}

TEST_CASE("algorithm names round-trip") {
  for (Algorithm a :
       {Algorithm::SmoothApg, Algorithm::PartialApg, Algorithm::AlmS, Algorithm::Nsa}) {
    auto back = algorithm_from_name(algorithm_name(a));
    REQUIRE(back.has_value());
    CHECK(*back == a);
  }
  CHECK_FALSE(algorithm_from_name("does-not-exist").has_value());
}
