#pragma once

// Feature screening: the sequential strong rule (heuristic, needs a KKT
// check), the basic EDPP safe rule, and their hybrid, where the strong rule
// runs inside the BEDPP-safe set and the KKT check scans only that set.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oocl/kernels.hpp"
#include "oocl/types.hpp"

namespace oocl {

struct PathFit;

/// Strong rule: keep j in scope iff |z_prev[j]| >= alpha * (2*lam - lam_prev).
/// z_prev[j] = x~_j^T r / n at the solution for lam_prev. RangeError when
/// lam > lam_prev.
Mask ssr_filter(std::span<const double> z_prev, double lam, double lam_prev, double alpha,
                std::span<const std::uint8_t> scope);

/// Everything BEDPP needs, fixed once per fit. Internally the rule is
/// evaluated in per-observation lambda scaling:
///
///   discard j  iff  |(lmax + lam) x~_j'y - (lmax - lam) lmax sgn x~_j'x~_*|
///                     < 2 n lam lmax - (lmax - lam) sqrt(n ||y||^2 - n^2 lmax^2)
///
/// with y centered and sgn = sign(x~_*'y).
struct BedppCache {
  std::size_t n = 0;
  double lambda_max = 0.0;
  std::size_t star = 0;
  double sign_star = 1.0;
  /// sqrt(n ||y||^2 - n^2 lmax^2), clamped at 0.
  double radius = 0.0;
  std::span<const double> xty;
  std::span<const double> xtx_star;
  std::span<const std::uint8_t> active;
};

/// Requires st.xty and st.xtx_star filled for st.star. PolicyError unless
/// family is gaussian and alpha == 1; DegenerateError when lambda_max == 0.
BedppCache make_bedpp_cache(const ColumnStats& st, double y_norm_sq, double lambda_max,
                            Family family, double alpha);

/// Safe set at lam: 1 = survives BEDPP. Inactive columns are always 0.
/// lam >= lambda_max is evaluated at lambda_max.
Mask bedpp_filter(const BedppCache& cache, double lam, int workers = 1);

namespace serial {
Mask bedpp_filter(const BedppCache& cache, double lam);
}

struct HybridMasks {
  Mask safe;
  Mask strong;
};

/// Safe set from BEDPP, strong set from the strong rule restricted to it.
HybridMasks hybrid_filter(std::span<const double> z_prev, const BedppCache& cache, double lam,
                          double lam_prev, double alpha, int workers = 1);

struct KktResult {
  /// Zero coefficients with |x~_j'r/n| > alpha*lam + tol, ascending.
  std::vector<std::size_t> violators;
  /// Nonzero coefficients whose stationarity residual
  /// |x~_j'r/n - alpha*lam*sign(b) - lam*(1-alpha)*b| exceeds tol, ascending.
  std::vector<std::size_t> unsettled;
};

/// Post-convergence check over `scope` (column ids). Writes x~_j'r/n into
/// z[j] for every scanned column; the scan is the only O(n |scope|) work.
KktResult kkt_check(const MatrixView& v, const ColumnStats& st, const ResidualState& res,
                    std::span<const double> beta, std::span<const std::size_t> scope, double lam,
                    double alpha, double tol, std::span<double> z, int workers = 1);

/// Per-lambda counts recorded when a fit runs with diagnostics on.
struct ScreenDiagnostics {
  std::size_t p = 0;
  std::size_t bedpp_discarded = 0;
  std::size_t ssr_discarded = 0;
  std::size_t hybrid_discarded = 0;
};

struct RejectionRow {
  double lambda_ratio = 0.0;
  double pct_bedpp = 0.0;
  double pct_ssr = 0.0;
  double pct_hybrid = 0.0;
};

/// Percent of features discarded by each rule along the path. RangeError
/// when the fit carries no diagnostics.
std::vector<RejectionRow> rejection_stats(const PathFit& fit);

/// CSV with header lambda_ratio,pct_bedpp,pct_ssr,pct_hybrid.
std::string rejection_csv(std::span<const RejectionRow> rows);

}  // namespace oocl
