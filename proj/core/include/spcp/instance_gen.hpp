#pragma once

#include <cstdint>

#include "spcp/model.hpp"

namespace spcp {

/// Parameters of the seeded random instance family: D = X0 + S0 + Zeta0 with
/// rank(X0) = ceil(c_r n), |supp(S0)| = ceil(c_p m n) and Gaussian noise
/// calibrated to the requested signal-to-noise ratio.
struct GenParams {
  Index n = 0;
  double c_r = 0.05;
  double c_p = 0.05;
  double snr_db = 80.0;
  std::uint64_t seed = 0;
  Index m = 0;  // 0 means square (m = n)
};

/// Noise scale varrho such that
/// 10 log10((c_r n + c_p 100^2/3) / varrho^2) = snr_db.
double snr_to_varrho(Index n, double c_r, double c_p, double snr_db);

/// delta = sqrt(n + sqrt(8 n)) * varrho.
double default_delta(Index n, double varrho);

struct Instance {
  SpcpProblem problem;
  GroundTruth truth;
};

/// Draw an instance. X0 = U V^T with standard Gaussian factors, the support
/// of S0 is a uniform without-replacement sample of exactly p cells, S0
/// entries are U[-100, 100] on the support, Zeta0 entries are varrho N(0, 1).
/// problem.delta = default_delta, problem.xi = 1/sqrt(max{m, n}).
/// Deterministic for a fixed seed (documented generator: mt19937_64 with
/// Box-Muller normals and Fisher-Yates support sampling).
Instance generate_instance(const GenParams& g);

}  // namespace spcp
