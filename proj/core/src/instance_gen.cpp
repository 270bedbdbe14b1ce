#include "spcp/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spcp/rng.hpp"

namespace spcp {

double snr_to_varrho(Index n, double c_r, double c_p, double snr_db) {
  if (n < 1) throw SpcpError(ErrorCode::InvalidConfig, "n must be >= 1");
  double signal = c_r * static_cast<double>(n) + c_p * (100.0 * 100.0 / 3.0);
  return std::sqrt(signal / std::pow(10.0, snr_db / 10.0));
}

double default_delta(Index n, double varrho) {
  if (n < 1) throw SpcpError(ErrorCode::InvalidConfig, "n must be >= 1");
  if (varrho < 0.0) throw SpcpError(ErrorCode::InvalidConfig, "varrho must be >= 0");
  double dn = static_cast<double>(n);
  return std::sqrt(dn + std::sqrt(8.0 * dn)) * varrho;
}

Instance generate_instance(const GenParams& g) {
  const Index n = g.n;
  const Index m = g.m > 0 ? g.m : g.n;
  if (n < 1 || m < 1) throw SpcpError(ErrorCode::InvalidConfig, "dimensions must be >= 1");
  const Index minmn = std::min(m, n);
  const Index maxmn = std::max(m, n);
  const auto r = static_cast<Index>(std::ceil(g.c_r * static_cast<double>(minmn)));
  const auto p_count = static_cast<Index>(std::ceil(g.c_p * static_cast<double>(m * n)));
  if (r < 1 || r > minmn) {
    throw SpcpError(ErrorCode::InvalidConfig, "rank ratio outside (0, 1]");
  }
  if (p_count < 0 || p_count > m * n) {
    throw SpcpError(ErrorCode::InvalidConfig, "sparsity ratio outside [0, 1]");
  }

  Rng rng(g.seed);

  // Draw order is part of the reproducibility contract: low-rank factors
  // (column major), support shuffle, support values, then noise.
  Matrix U(m, r);
  for (Index j = 0; j < r; ++j) {
    for (Index i = 0; i < m; ++i) U(i, j) = rng.normal();
  }
  Matrix V(n, r);
  for (Index j = 0; j < r; ++j) {
    for (Index i = 0; i < n; ++i) V(i, j) = rng.normal();
  }
  Matrix X0 = U * V.transpose();

  // First p cells of a partial Fisher-Yates pass over all mn indices gives a
  // uniform sample without replacement of exactly p cells.
  std::vector<Index> idx(static_cast<std::size_t>(m * n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < p_count; ++i) {
    Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(m * n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  std::vector<Index> support(idx.begin(), idx.begin() + p_count);
  std::sort(support.begin(), support.end());

  Matrix S0 = Matrix::Zero(m, n);
  for (Index i = 0; i < p_count; ++i) {
    // Entries are drawn in shuffle order, not sorted order.
    S0(idx[static_cast<std::size_t>(i)]) = rng.uniform(-100.0, 100.0);
  }

  // The signal term of the SNR formula scales with rank = c_r * min(m, n).
  double varrho = snr_to_varrho(minmn, g.c_r, g.c_p, g.snr_db);
  Matrix Zeta0(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) Zeta0(i, j) = varrho * rng.normal();
  }

  Instance inst;
  inst.problem.D = X0 + S0 + Zeta0;
  inst.problem.delta = default_delta(maxmn, varrho);
  inst.problem.xi = default_xi(m, n);
  inst.truth.X0 = std::move(X0);
  inst.truth.S0 = std::move(S0);
  inst.truth.Zeta0 = std::move(Zeta0);
  inst.truth.support = std::move(support);
  inst.truth.rank0 = static_cast<int>(r);
  inst.truth.varrho = varrho;
  return inst;
}

}  // namespace spcp
