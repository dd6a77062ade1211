#include "oocl/screen.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "oocl/error.hpp"
#include "oocl/solver.hpp"

namespace oocl {

Mask ssr_filter(std::span<const double> z_prev, double lam, double lam_prev, double alpha,
                std::span<const std::uint8_t> scope) {
  if (lam > lam_prev)
    throw RangeError("strong rule needs lambda <= previous lambda (" + std::to_string(lam) +
                     " > " + std::to_string(lam_prev) + ")");
  const double thresh = alpha * (2.0 * lam - lam_prev);
  Mask keep(scope.size(), 0);
  for (std::size_t j = 0; j < scope.size(); ++j)
    keep[j] = scope[j] && std::abs(z_prev[j]) >= thresh;
  return keep;
}

BedppCache make_bedpp_cache(const ColumnStats& st, double y_norm_sq, double lambda_max,
                            Family family, double alpha) {
  if (family != Family::gaussian || alpha != 1.0)
    throw PolicyError("BEDPP applies to the gaussian lasso only (alpha = 1)");
  if (!(lambda_max > 0.0)) throw DegenerateError("BEDPP: lambda_max is zero");
  if (st.xty.size() != st.p() || st.xtx_star.size() != st.p())
    throw RangeError("BEDPP: x'y and x'x_* must be filled first");
  BedppCache c;
  c.n = st.n;
  c.lambda_max = lambda_max;
  c.star = st.star;
  c.sign_star = st.xty[st.star] >= 0.0 ? 1.0 : -1.0;
  const double n = static_cast<double>(st.n);
  const double rad_sq = n * y_norm_sq - n * n * lambda_max * lambda_max;
  c.radius = rad_sq > 0.0 ? std::sqrt(rad_sq) : 0.0;
  c.xty = st.xty;
  c.xtx_star = st.xtx_star;
  c.active = st.active;
  return c;
}

namespace {

struct BedppTerms {
  double a;       // lmax + lam
  double b;       // (lmax - lam) * lmax * sign
  double rhs;
  double margin;
};

BedppTerms bedpp_terms(const BedppCache& c, double lam) {
  const double lmax = c.lambda_max;
  lam = std::min(lam, lmax);
  const double n = static_cast<double>(c.n);
  BedppTerms t;
  t.a = lmax + lam;
  t.b = (lmax - lam) * lmax * c.sign_star;
  t.rhs = 2.0 * n * lam * lmax - (lmax - lam) * c.radius;
  // Relative slack so rounding never discards the argmax column at lmax.
  t.margin = 1e-10 * n * lmax * (lmax + lam);
  return t;
}

inline std::uint8_t bedpp_keep(const BedppCache& c, const BedppTerms& t, std::size_t j) {
  if (!c.active[j]) return 0;
  const double lhs = t.a * c.xty[j] - t.b * c.xtx_star[j];
  return std::abs(lhs) < t.rhs - t.margin ? 0 : 1;
}

}  // namespace

Mask bedpp_filter(const BedppCache& cache, double lam, int workers) {
  const BedppTerms t = bedpp_terms(cache, lam);
  const std::size_t p = cache.xty.size();
  Mask keep(p, 0);
  const auto pp = static_cast<std::ptrdiff_t>(p);
#pragma omp parallel for schedule(static) num_threads(workers) if (workers > 1)
  for (std::ptrdiff_t j = 0; j < pp; ++j) keep[j] = bedpp_keep(cache, t, j);
  return keep;
}

Mask serial::bedpp_filter(const BedppCache& cache, double lam) {
  const BedppTerms t = bedpp_terms(cache, lam);
  Mask keep(cache.xty.size(), 0);
  for (std::size_t j = 0; j < keep.size(); ++j) keep[j] = bedpp_keep(cache, t, j);
  return keep;
}

HybridMasks hybrid_filter(std::span<const double> z_prev, const BedppCache& cache, double lam,
                          double lam_prev, double alpha, int workers) {
  HybridMasks m;
  m.safe = bedpp_filter(cache, lam, workers);
  m.strong = ssr_filter(z_prev, lam, lam_prev, alpha, m.safe);
  return m;
}

KktResult kkt_check(const MatrixView& v, const ColumnStats& st, const ResidualState& res,
                    std::span<const double> beta, std::span<const std::size_t> scope, double lam,
                    double alpha, double tol, std::span<double> z, int workers) {
  scan_xr(v, st, scope, res, z, workers);
  KktResult out;
  const double l1 = alpha * lam;
  const double l2 = lam * (1.0 - alpha);
  for (std::size_t j : scope) {
    const double b = beta[j];
    if (b == 0.0) {
      if (std::abs(z[j]) > l1 + tol) out.violators.push_back(j);
    } else {
      const double resid = z[j] - (b > 0 ? l1 : -l1) - l2 * b;
      if (std::abs(resid) > tol) out.unsettled.push_back(j);
    }
  }
  return out;
}

std::vector<RejectionRow> rejection_stats(const PathFit& fit) {
  if (fit.diagnostics.size() != fit.n_lambda())
    throw RangeError("rejection_stats: fit was run without diagnostics");
  std::vector<RejectionRow> rows;
  rows.reserve(fit.n_lambda());
  for (std::size_t k = 0; k < fit.n_lambda(); ++k) {
    const auto& d = fit.diagnostics[k];
    const double p = static_cast<double>(d.p);
    rows.push_back({fit.lambda[k] / fit.lambda_max, 100.0 * d.bedpp_discarded / p,
                    100.0 * d.ssr_discarded / p, 100.0 * d.hybrid_discarded / p});
  }
  return rows;
}

std::string rejection_csv(std::span<const RejectionRow> rows) {
  std::string out = "lambda_ratio,pct_bedpp,pct_ssr,pct_hybrid\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6g,%.4f,%.4f,%.4f\n", r.lambda_ratio, r.pct_bedpp,
                  r.pct_ssr, r.pct_hybrid);
    out += buf;
  }
  return out;
}

}  // namespace oocl
