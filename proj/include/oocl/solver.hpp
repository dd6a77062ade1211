#pragma once

// Pathwise coordinate descent for lasso / elastic-net penalized linear and
// logistic regression on a MatrixView.
//
// Internal problem (standardized columns, unpenalized intercept):
//   gaussian: (1/2n) ||y - b0 - X~ b||^2        + lam * P(b)
//   binomial: (1/n) sum log(1 + e^eta) - y eta + lam * P(b)
//   P(b) = alpha ||b||_1 + (1 - alpha)/2 ||b||^2
// Returned coefficients are mapped back to the original column scale.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oocl/bigmat.hpp"
#include "oocl/kernels.hpp"
#include "oocl/screen.hpp"
#include "oocl/types.hpp"

namespace oocl {

struct FitConfig {
  Family family = Family::gaussian;
  /// Elastic-net mix in (0, 1]; 1 is the lasso.
  double alpha = 1.0;
  std::size_t n_lambda = 100;
  double lambda_min_ratio = 0.1;
  LambdaSpacing spacing = LambdaSpacing::linear;
  /// Unset: hybrid for gaussian lasso, ssr otherwise. bedpp/hybrid requested
  /// outside the gaussian lasso fall back to ssr.
  std::optional<ScreenPolicy> screen;
  /// Convergence: max standardized coefficient change per sweep.
  double tol = 1e-7;
  /// KKT slack, relative to lambda_max.
  double kkt_tol = 1e-7;
  /// Coordinate sweeps allowed per lambda.
  std::size_t max_iter = 10000;
  std::size_t max_kkt_rounds = 10;
  int workers = 1;
  /// Explicit non-increasing lambda grid; overrides n_lambda/ratio/spacing.
  std::vector<double> lambda;
  /// Record per-lambda rejection counts of every applicable rule.
  bool diagnostics = false;
  /// Binomial only: fixed 0.25 weights instead of exact IRLS weights.
  bool majorize = false;
  /// Throw std::logic_error if a gaussian sweep increases the objective.
#ifdef NDEBUG
  bool check_monotone = false;
#else
  bool check_monotone = true;
#endif

  /// RangeError on out-of-range fields.
  void validate() const;
  ScreenPolicy effective_policy() const;
};

/// Coefficients over the lambda grid, one sparse column per lambda.
struct SparsePath {
  std::vector<std::size_t> col_start{0};
  std::vector<std::size_t> index;
  std::vector<double> value;

  std::size_t n_lambda() const noexcept { return col_start.size() - 1; }
  std::size_t nnz(std::size_t k) const { return col_start[k + 1] - col_start[k]; }
  std::span<const std::size_t> indices(std::size_t k) const {
    return {index.data() + col_start[k], nnz(k)};
  }
  std::span<const double> values(std::size_t k) const {
    return {value.data() + col_start[k], nnz(k)};
  }
  /// Appends one lambda column; entries must be in ascending index order.
  void push_back(std::span<const std::pair<std::size_t, double>> entries);
};

struct PathFit {
  Family family = Family::gaussian;
  double alpha = 1.0;
  ScreenPolicy policy = ScreenPolicy::none;
  std::size_t n = 0;
  std::size_t p = 0;
  double lambda_max = 0.0;
  std::size_t star = 0;
  double tol = 0.0;
  double kkt_tol = 0.0;

  std::vector<double> lambda;
  std::vector<double> intercept;
  /// Original-scale coefficients.
  SparsePath coefs;

  std::vector<std::size_t> n_iter;
  std::vector<std::size_t> n_kkt_rounds;
  /// Columns scanned by the post-convergence check at each lambda.
  std::vector<std::size_t> cols_scanned;
  /// Columns whose stale x~'r had to be refreshed before screening
  /// (newly safe under the hybrid rule).
  std::vector<std::size_t> cols_refreshed;
  std::vector<std::size_t> safe_size;
  std::vector<std::size_t> strong_size;
  /// FNV-1a over the final safe and strong masks at each lambda.
  std::vector<std::uint64_t> mask_digest;
  std::vector<ScreenDiagnostics> diagnostics;

  std::vector<double> center;
  std::vector<double> scale;
  std::vector<std::string> col_names;
  double seconds = 0.0;

  std::size_t n_lambda() const noexcept { return lambda.size(); }
  std::vector<double> dense_coefs(std::size_t k) const;
  std::string col_name(std::size_t j) const;
};

/// max_j |x~_j'(y - ybar)| / (n * alpha) over active columns. Fills st.xty
/// and sets st.star. DegenerateError for constant y or lambda_max == 0.
double lambda_max(const MatrixView& v, std::span<const double> y, ColumnStats& st, double alpha,
                  int workers = 1);

/// Decreasing grid starting exactly at lambda_max.
std::vector<double> lambda_path(double lambda_max, const FitConfig& cfg);

inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

/// One gaussian coordinate update; z = x~_j'r/n + b_j.
inline double cd_update(double z, double lam, double alpha) {
  return soft_threshold(z, lam * alpha) / (1.0 + lam * (1.0 - alpha));
}

PathFit fit_gaussian(const MatrixView& v, std::span<const double> y, const FitConfig& cfg);
/// y must be 0/1 with both classes present.
PathFit fit_binomial(const MatrixView& v, std::span<const double> y, const FitConfig& cfg);
/// Dispatches on cfg.family.
PathFit fit(const MatrixView& v, std::span<const double> y, const FitConfig& cfg);

enum class PredictKind { link, response, cls, nvars, vars, coefficients };
PredictKind parse_predict_kind(std::string_view s);

/// Index of the grid point nearest lam. RangeError when lam lies outside
/// [min, max] of the grid by more than a relative 1e-9, or when exact is set
/// and no grid point matches.
std::size_t lambda_index(const PathFit& fit, double lam, bool exact = false);

/// link, response or class for every row of the view at grid point k.
std::vector<double> predict(const PathFit& fit, const MatrixView& v, std::size_t k,
                            PredictKind kind);
std::size_t nvars(const PathFit& fit, std::size_t k);
std::vector<std::size_t> vars(const PathFit& fit, std::size_t k);

struct Coefficients {
  double intercept = 0.0;
  std::vector<std::pair<std::size_t, double>> nonzero;
};
Coefficients coefficients(const PathFit& fit, std::size_t k);

/// Writes <prefix>.coef.csv (lambda,col_index,col_name,coef; the intercept
/// is col_index -1) and <prefix>.fit.json (metadata and diagnostics).
void write_path_fit(const PathFit& fit, const std::filesystem::path& prefix);
PathFit read_path_fit(const std::filesystem::path& prefix);
std::string coef_csv(const PathFit& fit);

}  // namespace oocl
