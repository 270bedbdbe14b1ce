#include "spcp/bench.hpp"

#include <Eigen/SVD>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "spcp/prox.hpp"
#include "spcp/solvers.hpp"

namespace spcp {

const std::array<std::string_view, kMetricCount> kMetricNames = {
    "rel_err_X",      "rel_err_S",           "rank_sol",
    "rel_nuclear_gap", "rel_l1_gap",          "max_sigma_err_nonzero",
    "max_sigma_zero", "max_S_err_support",   "max_S_off_support",
    "residual_ratio", "svd_count",           "cpu_seconds",
};

std::array<double, kMetricCount> metrics_as_array(const SolutionMetrics& m) {
  return {m.rel_err_X,
          m.rel_err_S,
          static_cast<double>(m.rank_sol),
          m.rel_nuclear_gap,
          m.rel_l1_gap,
          m.max_sigma_err_nonzero,
          m.max_sigma_zero,
          m.max_S_err_support,
          m.max_S_off_support,
          m.residual_ratio,
          static_cast<double>(m.svd_count),
          m.cpu_seconds};
}

namespace {

// Bidiagonal divide-and-conquer reads the near-zero singular values of a
// numerically low-rank matrix at its deflation floor, a few hundred
// eps * sigma_max, which sits right at the absolute 1e-12 rank cut for
// well-scaled data. When values land in that band the whole spectrum is
// re-measured by one-sided Jacobi, which resolves them to their true size.
Eigen::VectorXd measured_sigma(const Matrix& X) {
  Eigen::VectorXd sigma = svd_full(X).sigma;
  if (sigma.size() == 0 || sigma(0) == 0.0) return sigma;
  const double band = 1e3 * std::numeric_limits<double>::epsilon() * sigma(0);
  if (sigma(sigma.size() - 1) > band) return sigma;
  Eigen::JacobiSVD<Matrix> jac(X);  // values only
  return jac.singularValues();
}

}  // namespace

SolutionMetrics evaluate_solution(const GroundTruth& gt, const SpcpSolution& sol,
                                  const SpcpProblem& p) {
  if (sol.X.rows() != gt.X0.rows() || sol.X.cols() != gt.X0.cols() ||
      sol.S.rows() != gt.S0.rows() || sol.S.cols() != gt.S0.cols()) {
    throw SpcpError(ErrorCode::ShapeMismatch, "solution and ground truth shapes differ");
  }
  constexpr double kRankCut = 1e-12;

  SolutionMetrics out;
  double nX0 = gt.X0.norm();
  double nS0 = gt.S0.norm();
  out.rel_err_X = nX0 > 0.0 ? (sol.X - gt.X0).norm() / nX0 : (sol.X - gt.X0).norm();
  out.rel_err_S = nS0 > 0.0 ? (sol.S - gt.S0).norm() / nS0 : (sol.S - gt.S0).norm();

  Eigen::VectorXd sigma = measured_sigma(sol.X);
  Eigen::VectorXd sigma0 = measured_sigma(gt.X0);
  int rank = 0;
  while (rank < sigma.size() && sigma(rank) >= kRankCut) ++rank;
  out.rank_sol = rank;

  double nuc = sigma.sum();
  double nuc0 = sigma0.sum();
  out.rel_nuclear_gap = nuc0 > 0.0 ? std::abs(nuc - nuc0) / nuc0 : std::abs(nuc - nuc0);
  double l1 = l1_norm(sol.S);
  double l10 = l1_norm(gt.S0);
  out.rel_l1_gap = l10 > 0.0 ? std::abs(l1 - l10) / l10 : std::abs(l1 - l10);

  const int r0 = gt.rank0;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (i < r0) {
      double ref = i < sigma0.size() ? sigma0(i) : 0.0;
      out.max_sigma_err_nonzero = std::max(out.max_sigma_err_nonzero, std::abs(sigma(i) - ref));
    } else {
      out.max_sigma_zero = std::max(out.max_sigma_zero, sigma(i));
    }
  }

  std::vector<bool> on_support(static_cast<std::size_t>(gt.S0.size()), false);
  for (Index idx : gt.support) on_support[static_cast<std::size_t>(idx)] = true;
  const double* s = sol.S.data();
  const double* s0 = gt.S0.data();
  for (Index i = 0; i < sol.S.size(); ++i) {
    if (on_support[static_cast<std::size_t>(i)]) {
      out.max_S_err_support = std::max(out.max_S_err_support, std::abs(s[i] - s0[i]));
    } else {
      out.max_S_off_support = std::max(out.max_S_off_support, std::abs(s[i]));
    }
  }

  double nD = p.D.norm();
  double residual = (sol.X + sol.S - p.D).norm();
  out.residual_ratio = nD > 0.0 ? residual / nD : residual;
  out.svd_count = sol.svd_count;
  out.cpu_seconds = 0.0;  // wall clock of the solve, filled by run_suite
  return out;
}

namespace {

MetricAggregate aggregate_runs(const std::vector<SolutionMetrics>& runs) {
  MetricAggregate agg;
  for (std::size_t f = 0; f < kMetricCount; ++f) {
    agg.min[f] = std::numeric_limits<double>::infinity();
    agg.max[f] = -std::numeric_limits<double>::infinity();
    agg.avg[f] = 0.0;
  }
  for (const SolutionMetrics& m : runs) {
    auto vals = metrics_as_array(m);
    for (std::size_t f = 0; f < kMetricCount; ++f) {
      agg.min[f] = std::min(agg.min[f], vals[f]);
      agg.max[f] = std::max(agg.max[f], vals[f]);
      agg.avg[f] += vals[f];
    }
  }
  if (!runs.empty()) {
    for (std::size_t f = 0; f < kMetricCount; ++f) {
      agg.avg[f] /= static_cast<double>(runs.size());
    }
  }
  return agg;
}

CellResult run_cell(const SuiteCell& cell, int repetitions) {
  CellResult result;
  result.cell = cell;
  try {
    for (int rep = 0; rep < repetitions; ++rep) {
      GenParams gp = cell.gen;
      gp.seed = cell.gen.seed + static_cast<std::uint64_t>(rep);
      Instance inst = generate_instance(gp);

      double tol = cell.tol_is_varrho_multiple ? cell.tol_varrho_multiple * inst.truth.varrho
                                               : cell.config.tol;
      SolverConfig cfg;
      if (cell.derive_scale) {
        cfg = default_config(inst.problem, cell.algorithm, tol);
        cfg.rho_growth = cell.config.rho_growth;
        cfg.rho_factor = cell.config.rho_factor;
        cfg.rho_max = cell.config.rho_max;
        cfg.max_iters = cell.config.max_iters;
        cfg.svd_mode = cell.config.svd_mode;
        cfg.seed = cell.config.seed;
        cfg.stats_objective_every = cell.config.stats_objective_every;
      } else {
        cfg = cell.config;
        cfg.algorithm = cell.algorithm;
        cfg.tol = tol;
      }

      auto t0 = std::chrono::steady_clock::now();
      SolveResult sr = solve(inst.problem, cfg);
      auto t1 = std::chrono::steady_clock::now();

      SolutionMetrics m = evaluate_solution(inst.truth, sr.solution, inst.problem);
      m.cpu_seconds = std::chrono::duration<double>(t1 - t0).count();
      result.runs.push_back(m);
    }
    result.aggregate = aggregate_runs(result.runs);
  } catch (const std::exception& e) {
    result.failed = true;
    result.error = e.what();
  }
  return result;
}

}  // namespace

SuiteReport run_suite(const std::vector<SuiteCell>& cells, int repetitions, int jobs) {
  if (cells.empty()) throw SpcpError(ErrorCode::InvalidConfig, "no cells to run");
  if (repetitions < 1) throw SpcpError(ErrorCode::InvalidConfig, "repetitions must be >= 1");
  SuiteReport report;
  report.repetitions = repetitions;
  report.cells.resize(cells.size());

  if (jobs <= 1 || cells.size() == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      report.cells[i] = run_cell(cells[i], repetitions);
    }
    return report;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      report.cells[i] = run_cell(cells[i], repetitions);
    }
  };
  std::vector<std::thread> pool;
  std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(jobs), cells.size());
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return report;
}

namespace {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_row(std::string& out, const SuiteCell& cell, const char* stat,
                const std::array<double, kMetricCount>& vals, char sep, const char* prefix,
                const char* suffix) {
  Index m = cell.gen.m > 0 ? cell.gen.m : cell.gen.n;
  out += prefix;
  out += std::to_string(m);
  out += sep;
  out += std::to_string(cell.gen.n);
  out += sep;
  out += format_full(cell.gen.c_r);
  out += sep;
  out += format_full(cell.gen.c_p);
  out += sep;
  out += format_full(cell.gen.snr_db);
  out += sep;
  out += algorithm_name(cell.algorithm);
  out += sep;
  out += stat;
  for (double v : vals) {
    out += sep;
    out += format_full(v);
  }
  out += suffix;
  out += '\n';
}

}  // namespace

std::string render_table(const SuiteReport& report, TableFormat format) {
  const bool md = format == TableFormat::Markdown;
  const char sep = md ? '|' : ',';
  const char* prefix = md ? "| " : "";
  const char* suffix = md ? " |" : "";

  std::string out;
  out += prefix;
  out += "m";
  out += sep;
  out += "n";
  out += sep;
  out += "c_r";
  out += sep;
  out += "c_p";
  out += sep;
  out += "snr_db";
  out += sep;
  out += "algorithm";
  out += sep;
  out += "statistic";
  for (auto name : kMetricNames) {
    out += sep;
    out += name;
  }
  out += suffix;
  out += '\n';
  if (md) {
    out += "|";
    for (std::size_t i = 0; i < 7 + kMetricCount; ++i) out += "---|";
    out += '\n';
  }

  for (const CellResult& cell : report.cells) {
    if (cell.failed) {
      append_row(out, cell.cell, "failed", {}, sep, prefix, suffix);
      continue;
    }
    append_row(out, cell.cell, "min", cell.aggregate.min, sep, prefix, suffix);
    append_row(out, cell.cell, "avg", cell.aggregate.avg, sep, prefix, suffix);
    append_row(out, cell.cell, "max", cell.aggregate.max, sep, prefix, suffix);
  }
  return out;
}

}  // namespace spcp
