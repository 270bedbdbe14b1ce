#include "spcp/subproblem.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "spcp/prox.hpp"

namespace spcp {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw SpcpError(ErrorCode::ShapeMismatch, what);
  }
}

// Sorted magnitudes with prefix sums of squares: P[j] = sum of the j smallest
// squared entries, P[0] = 0.
struct SortedEntries {
  std::vector<double> a;  // ascending, size N
  std::vector<double> P;  // size N + 1
};

SortedEntries sort_entries(const Matrix& A) {
  SortedEntries s;
  s.a.assign(A.data(), A.data() + A.size());
  std::sort(s.a.begin(), s.a.end());
  s.P.resize(s.a.size() + 1);
  s.P[0] = 0.0;
  for (std::size_t j = 0; j < s.a.size(); ++j) s.P[j + 1] = s.P[j] + s.a[j] * s.a[j];
  return s;
}

// Root of C1 (rho/(rho+t))^2 + C2/t^2 = delta^2 on [tlo, thi] by bisection
// with Newton steps where they stay inside the bracket.
double solve_interval_scalar(double C1, double C2, double rho, double delta, double tlo,
                             double thi) {
  const double d2 = delta * delta;
  auto g = [&](double t) {
    double c = rho / (rho + t);
    return C1 * c * c + C2 / (t * t) - d2;
  };
  auto gprime = [&](double t) {
    double rt = rho + t;
    return -2.0 * C1 * rho * rho / (rt * rt * rt) - 2.0 * C2 / (t * t * t);
  };
  double t = 0.5 * (tlo + thi);
  for (int it = 0; it < 200; ++it) {
    double val = g(t);
    if (std::abs(val) <= 1e-13 * d2) break;
    if (val > 0.0) {
      tlo = t;
    } else {
      thi = t;
    }
    double tn = t - val / gprime(t);
    if (!(tn > tlo && tn < thi)) tn = 0.5 * (tlo + thi);
    if (thi - tlo <= 1e-16 * thi) break;
    t = tn;
  }
  return t;
}

// Real roots of t^4 + b t^3 + c t^2 + d t + e via the companion matrix.
std::vector<double> quartic_real_roots(double b, double c, double d, double e) {
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  companion(0, 3) = -e;
  companion(1, 3) = -d;
  companion(2, 3) = -c;
  companion(3, 3) = -b;
  companion(1, 0) = companion(2, 1) = companion(3, 2) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix4d> es(companion, false);
  std::vector<double> roots;
  for (int i = 0; i < 4; ++i) {
    auto r = es.eigenvalues()(i);
    if (std::abs(r.imag()) <= 1e-8 * (1.0 + std::abs(r.real()))) {
      roots.push_back(r.real());
    }
  }
  return roots;
}

}  // namespace

SubproblemResult solve_ps(const PsInput& in) {
  require_same_shape(in.Xtilde, in.Stilde, "Xtilde and Stilde shapes differ");
  require_same_shape(in.Xtilde, in.Qx, "Xtilde and Qx shapes differ");
  require_same_shape(in.Xtilde, in.Qs, "Xtilde and Qs shapes differ");
  require_same_shape(in.Xtilde, in.D, "Xtilde and D shapes differ");
  if (!(in.L > 0.0)) throw SpcpError(ErrorCode::InvalidConfig, "L must be > 0");
  if (in.delta < 0.0) throw SpcpError(ErrorCode::NegativeDelta, "delta must be >= 0");

  Matrix qx = in.Xtilde - in.Qx / in.L;
  Matrix qs = in.Stilde - in.Qs / in.L;

  SubproblemResult out;
  if (in.delta == 0.0) {
    out.X = 0.5 * (in.D - qs) + 0.5 * qx;
    out.S = in.D - out.X;
    out.theta = 0.0;
    return out;
  }

  double r = (qx + qs - in.D).norm();
  double theta = std::max(0.0, 0.5 * in.L * (r / in.delta - 1.0));
  double denom = in.L + 2.0 * theta;
  double c_cross = theta / denom;
  double c_self = (in.L + theta) / denom;
  out.X = c_cross * (in.D - qs) + c_self * qx;
  out.S = c_cross * (in.D - qx) + c_self * qs;
  out.theta = theta;
  return out;
}

double phi(double theta, const Matrix& A, double rho, double xi) {
  if (theta < 0.0) throw SpcpError(ErrorCode::InvalidConfig, "theta must be >= 0");
  if (!(rho > 0.0) || !(xi > 0.0)) {
    throw SpcpError(ErrorCode::InvalidConfig, "rho and xi must be > 0");
  }
  if (theta == 0.0) return A.norm();
  double cap = xi / theta;
  double scale = rho / (rho + theta);
  double sum = 0.0;
  const double* p = A.data();
  for (Index i = 0; i < A.size(); ++i) {
    double v = std::min(cap, scale * p[i]);
    sum += v * v;
  }
  return std::sqrt(sum);
}

double solve_theta_star(const Matrix& A, double rho, double xi, double delta,
                        ThetaMethod method) {
  if (!(delta > 0.0)) throw SpcpError(ErrorCode::NonPositiveDelta, "delta must be > 0");
  if (!(rho > 0.0) || !(xi > 0.0)) {
    throw SpcpError(ErrorCode::InvalidConfig, "rho and xi must be > 0");
  }
  const double normF = A.norm();
  if (normF <= delta) return 0.0;

  const Index N = A.size();
  SortedEntries s = sort_entries(A);
  auto inv_theta = [&](Index j) { return s.a[j - 1] / xi - 1.0 / rho; };

  // kbar = largest j with 1/theta_j <= 0; entries up to kbar sit on the
  // rho-branch of the min for every theta >= 0.
  Index lo = 1, hi = N + 1;
  while (lo < hi) {
    Index mid = lo + (hi - lo) / 2;
    if (inv_theta(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const Index kbar = lo - 1;

  if (kbar == N) {
    return rho * (normF / delta - 1.0);
  }

  // phi evaluated at breakpoint theta_j, nondecreasing in j.
  auto phi_at = [&](Index j) {
    double inv = inv_theta(j);
    double t = 1.0 / inv;
    double c = rho / (rho + t);
    double tail = static_cast<double>(N - j) * xi * inv * xi * inv;
    return std::sqrt(c * c * s.P[j] + tail);
  };

  // jstar = last breakpoint with phi <= delta (phi(theta_kbar) := 0).
  lo = kbar + 1;
  hi = N + 1;
  while (lo < hi) {
    Index mid = lo + (hi - lo) / 2;
    if (phi_at(mid) > delta) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const Index jstar = lo - 1;

  if (jstar == N) {
    // Every entry on the rho-branch at the root.
    return rho * (normF / delta - 1.0);
  }

  const double C1 = s.P[jstar];
  const double C2 = static_cast<double>(N - jstar) * xi * xi;
  const double cap = xi * std::sqrt(static_cast<double>(N)) / delta;
  const double tlo = 1.0 / inv_theta(jstar + 1);
  const double thi = (jstar == kbar) ? cap : std::min(1.0 / inv_theta(jstar), cap);

  if (method == ThetaMethod::Quartic) {
    // theta^4 + 2 rho theta^3 + ((delta^2 - C1) rho^2 - C2)/delta^2 theta^2
    //   - 2 C2 rho / delta^2 theta - C2 rho^2 / delta^2 = 0
    const double d2 = delta * delta;
    double b = 2.0 * rho;
    double c = ((d2 - C1) * rho * rho - C2) / d2;
    double d = -2.0 * C2 * rho / d2;
    double e = -C2 * rho * rho / d2;
    double best = -1.0;
    double best_err = std::numeric_limits<double>::infinity();
    for (double r : quartic_real_roots(b, c, d, e)) {
      if (r < tlo * (1.0 - 1e-9) || r > thi * (1.0 + 1e-9)) continue;
      double cc = rho / (rho + r);
      double err = std::abs(C1 * cc * cc + C2 / (r * r) - d2);
      if (err < best_err) {
        best_err = err;
        best = r;
      }
    }
    if (best > 0.0) {
      // One guarded iteration sharpens the algebraic root.
      return solve_interval_scalar(C1, C2, rho, delta, std::max(tlo, best * 0.5),
                                   std::min(thi, best * 2.0));
    }
    // Cancellation lost the root; the safeguarded scalar solve always works.
  }

  return solve_interval_scalar(C1, C2, rho, delta, tlo, thi);
}

SubproblemResult solve_pns(const PnsInput& in) {
  require_same_shape(in.Xtilde, in.Q, "Xtilde and Q shapes differ");
  require_same_shape(in.Xtilde, in.D, "Xtilde and D shapes differ");
  if (!(in.rho > 0.0) || !(in.xi > 0.0)) {
    throw SpcpError(ErrorCode::InvalidConfig, "rho and xi must be > 0");
  }
  if (in.delta < 0.0) throw SpcpError(ErrorCode::NegativeDelta, "delta must be >= 0");

  Matrix q = in.Xtilde - in.Q / in.rho;
  Matrix R = in.D - q;

  SubproblemResult out;
  if (in.delta == 0.0) {
    out.S = soft_threshold(R, in.xi / in.rho);
    out.X = in.D - out.S;
    out.theta = 0.0;
    return out;
  }

  if (R.norm() <= in.delta) {
    out.X = q;
    out.S = Matrix::Zero(q.rows(), q.cols());
    out.theta = 0.0;
    return out;
  }

  double theta = solve_theta_star(R.cwiseAbs(), in.rho, in.xi, in.delta);
  double threshold = in.xi * (in.rho + theta) / (in.rho * theta);
  out.S = soft_threshold(R, threshold);
  out.X = (theta / (in.rho + theta)) * (in.D - out.S) + (in.rho / (in.rho + theta)) * q;
  out.theta = theta;
  return out;
}

Matrix chi_subgradient_certificate(const SubproblemResult& res, const PnsInput& in) {
  Matrix W = -in.Q + in.rho * (in.Xtilde - res.X);
  Matrix residual_dir = res.X + res.S - in.D;
  double mismatch = (W - res.theta * residual_dir).norm();
  if (mismatch > 1e-8 * (1.0 + W.norm())) {
    throw SpcpError(ErrorCode::CertificateViolation,
                    "W* != theta*(X*+S*-D) beyond tolerance");
  }
  if (res.theta > 0.0) {
    double gap = std::abs(W.norm() - res.theta * in.delta);
    if (gap > 1e-8 * (1.0 + res.theta * in.delta)) {
      throw SpcpError(ErrorCode::CertificateViolation,
                      "||W*||_F != theta* delta beyond tolerance");
    }
  }
  return W;
}

BallShrinkResult shrink_to_ball(const Matrix& R, double xi, double delta) {
  if (!(xi > 0.0)) throw SpcpError(ErrorCode::NonPositiveXi, "xi must be > 0");
  if (delta < 0.0) throw SpcpError(ErrorCode::NegativeDelta, "delta must be >= 0");

  BallShrinkResult out;
  if (delta == 0.0) {
    out.S = R;
    out.theta = 0.0;  // multiplier undefined at delta = 0
    return out;
  }
  const double normF = R.norm();
  if (normF <= delta) {
    out.S = Matrix::Zero(R.rows(), R.cols());
    out.theta = 0.0;
    return out;
  }

  // rho -> infinity limit of the breakpoint construction: on each interval
  // the equation P[j] + (N - j) xi^2 / theta^2 = delta^2 is explicit.
  const Index N = R.size();
  SortedEntries s = sort_entries(R.cwiseAbs());
  auto phi_at = [&](Index j) {
    double inv = s.a[j - 1] / xi;
    return std::sqrt(s.P[j] + static_cast<double>(N - j) * xi * inv * xi * inv);
  };
  Index lo = 1, hi = N + 1;
  while (lo < hi) {
    Index mid = lo + (hi - lo) / 2;
    if (s.a[mid - 1] > 0.0 && phi_at(mid) > delta) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  Index jstar = lo - 1;  // phi(theta_N)^2 = ||R||^2 > delta^2 keeps jstar < N
  double C1 = s.P[jstar];
  double C2 = static_cast<double>(N - jstar) * xi * xi;
  double d2 = delta * delta;
  double theta = std::sqrt(C2 / std::max(d2 - C1, 1e-300));
  out.S = soft_threshold(R, xi / theta);
  out.theta = theta;
  return out;
}

}  // namespace spcp
