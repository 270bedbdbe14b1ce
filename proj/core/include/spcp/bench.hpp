#pragma once

#include <array>
#include <string_view>
#include <string>
#include <vector>

#include "spcp/instance_gen.hpp"
#include "spcp/model.hpp"

namespace spcp {

/// Recovery statistics of one solve against the generating ground truth.
struct SolutionMetrics {
  double rel_err_X = 0.0;  // ||X - X0||_F / ||X0||_F
  double rel_err_S = 0.0;
  int rank_sol = 0;  // singular values below 1e-12 discarded
  double rel_nuclear_gap = 0.0;
  double rel_l1_gap = 0.0;
  double max_sigma_err_nonzero = 0.0;  // max |sigma_i - sigma0_i| over sigma0_i > 0
  double max_sigma_zero = 0.0;         // max sigma_i over sigma0_i = 0
  double max_S_err_support = 0.0;
  double max_S_off_support = 0.0;
  double residual_ratio = 0.0;  // ||X + S - D||_F / ||D||_F
  long svd_count = 0;
  double cpu_seconds = 0.0;  // wall clock of the solve; reported, never asserted
};

SolutionMetrics evaluate_solution(const GroundTruth& gt, const SpcpSolution& sol,
                                  const SpcpProblem& p);

inline constexpr std::size_t kMetricCount = 12;
/// Stable column order of every rendered table.
extern const std::array<std::string_view, kMetricCount> kMetricNames;
std::array<double, kMetricCount> metrics_as_array(const SolutionMetrics& m);

/// One benchmark cell: an instance family plus the solver to run on it.
struct SuiteCell {
  GenParams gen;
  Algorithm algorithm = Algorithm::Nsa;
  SolverConfig config;  // used as-is when derive_scale is false
  // Rebuild mu/nu/rho0 from each instance (default_config) instead of taking
  // them from `config`; growth mode, caps, iteration budget and svd mode are
  // always taken from `config`.
  bool derive_scale = true;
  // tol as a multiple of the instance varrho; mirrors the customary stopping
  // rule of the random-instance protocol.
  bool tol_is_varrho_multiple = false;
  double tol_varrho_multiple = 1.0;
};

struct MetricAggregate {
  std::array<double, kMetricCount> min{};
  std::array<double, kMetricCount> avg{};
  std::array<double, kMetricCount> max{};
};

struct CellResult {
  SuiteCell cell;
  std::vector<SolutionMetrics> runs;  // one per repetition, seed order
  MetricAggregate aggregate;
  bool failed = false;
  std::string error;
};

struct SuiteReport {
  std::vector<CellResult> cells;
  int repetitions = 0;
};

/// Run every cell for `repetitions` seeds (cell seed, cell seed + 1, ...).
/// Cells run independently on up to `jobs` threads; a solver failure marks
/// the cell failed without aborting the suite.
SuiteReport run_suite(const std::vector<SuiteCell>& cells, int repetitions, int jobs = 1);

enum class TableFormat { Csv, Markdown };

/// CSV: header plus one row per (cell, statistic) with statistic in
/// {min, avg, max}; full precision. Markdown: one table in the same order.
std::string render_table(const SuiteReport& report, TableFormat format);

}  // namespace spcp
