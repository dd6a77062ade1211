#pragma once

// Validation tools: a screening-free dense reference solver, objective and
// relative-difference reports, an independent KKT audit, synthetic data
// generators and a screening benchmark.
//
// Everything here recomputes standardization naively (two-pass mean and
// population scale, explicit x~ columns) so that it shares no arithmetic
// with the kernels it is used to check.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oocl/bigmat.hpp"
#include "oocl/solver.hpp"
#include "oocl/types.hpp"

namespace oocl {

/// Dense coordinate descent without screening or sum identities. Uses
/// cfg.lambda when given, otherwise its own lambda_max and cfg's grid
/// settings. tol and max_iter are fixed at 1e-10 and 1e6; sweeps continue
/// until every KKT residual is below 1e-9 (times lambda_max).
PathFit reference_fit(const MatrixView& v, std::span<const double> y, const FitConfig& cfg);

/// Penalized objective at grid point k on the standardized scale:
///   gaussian: (1/2n) ||y - yhat||^2 + lam * P(b * s)
///   binomial: (1/n) sum log(1 + e^eta) - y eta + lam * P(b * s)
double objective(const PathFit& fit, std::size_t k, const MatrixView& v,
                 std::span<const double> y);

struct Summary6 {
  double min = 0, q1 = 0, median = 0, mean = 0, q3 = 0, max = 0;
};
/// Quartiles by linear interpolation between order statistics.
Summary6 summarize(std::vector<double> values);

struct RdReport {
  /// (Q_a - Q_b) / Q_b per lambda; NaN where Q_b <= 0.
  std::vector<double> rd;
  Summary6 summary;
  double max_abs = 0.0;
};

/// RangeError when the grids differ.
RdReport rd(const PathFit& a, const PathFit& b, const MatrixView& v, std::span<const double> y);

struct KktAudit {
  /// Largest |g_j| - alpha*lam over zero coefficients (may be negative).
  double zero_excess = -1.0;
  /// Largest stationarity residual over nonzero coefficients.
  double stationarity = 0.0;
  /// |sum residual| / n; the intercept condition.
  double intercept = 0.0;
  std::size_t violations = 0;
  std::size_t checked = 0;
};

/// Recomputes every gradient g_j = x~_j'(y - fitted)/n naively and checks
/// the KKT conditions at grid point k with slack tol. `scope` limits the
/// check to flagged columns; empty means all varying columns.
KktAudit kkt_audit(const PathFit& fit, std::size_t k, const MatrixView& v,
                   std::span<const double> y, double tol, std::span<const std::uint8_t> scope = {});

struct SynthSpec {
  std::size_t n = 100;
  std::size_t p = 200;
  std::size_t n_true = 20;
  double noise = 0.1;
  Family family = Family::gaussian;
  std::uint64_t seed = 1;
};

struct SynthData {
  FileMatrix x;
  std::vector<double> y;
  /// Dense true coefficients (length p).
  std::vector<double> beta;
};

/// X iid N(0,1); n_true coefficients on randomly chosen columns drawn from
/// Unif[-1, 1]; gaussian y = X beta + noise * eps, binomial y ~
/// Bernoulli(sigmoid(X beta)). Written to `<prefix>.bin/.desc` and attached.
SynthData gen_synth(const SynthSpec& spec, const std::filesystem::path& prefix);
/// Same values, held in memory.
SynthData gen_synth_memory(const SynthSpec& spec);

struct BenchRow {
  ScreenPolicy policy = ScreenPolicy::none;
  /// Median over repeats.
  double seconds = 0.0;
  std::vector<double> run_seconds;
  std::size_t total_scanned = 0;
  std::size_t total_kkt_rounds = 0;
  std::vector<std::size_t> cols_scanned;
};

/// Fits every policy on the same data `repeats` times, interleaving the
/// policies within each repeat.
std::vector<BenchRow> screen_bench(const MatrixView& v, std::span<const double> y,
                                   const FitConfig& base, std::span<const ScreenPolicy> policies,
                                   std::size_t repeats);

/// policy,median_seconds,total_cols_scanned,total_kkt_rounds,speedup_vs_first
std::string bench_csv(std::span<const BenchRow> rows);
/// lambda_index,lambda_ratio,<policy>_scanned...
std::string bench_scan_csv(const PathFit& ref_grid, std::span<const BenchRow> rows);

std::string rd_csv(const PathFit& fit, const RdReport& report);
std::string summary6_text(const Summary6& s);

}  // namespace oocl
