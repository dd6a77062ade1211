#pragma once

// K-fold cross-validation over one shared matrix. Every fold trains and
// tests on row-index views of the same attachment; no matrix data is
// copied. All folds use the lambda grid of the full-data fit.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oocl/bigmat.hpp"
#include "oocl/solver.hpp"

namespace oocl {

/// Fold ids in 1..K for n rows. A seeded permutation is dealt round-robin
/// into the folds. With `stratify_on` (0/1 labels) each class is permuted
/// separately, zeros first, and the deal continues across classes, so every
/// fold gets floor or ceil of its share of each class. RangeError unless
/// 2 <= K <= n.
std::vector<int> make_folds(std::size_t n, std::size_t k, std::uint64_t seed,
                            std::optional<std::span<const double>> stratify_on = std::nullopt);

struct CvConfig {
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  /// Run folds concurrently on cfg.workers threads; each fold fit then
  /// runs with a single worker.
  bool parallel_folds = false;
  /// Unset: stratify for binomial.
  std::optional<bool> stratify;
};

struct CvFit {
  Family family = Family::gaussian;
  double alpha = 1.0;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t n_folds = 0;
  std::uint64_t seed = 0;

  std::vector<double> lambda;
  /// Mean held-out loss per lambda (mse or deviance), averaged over rows.
  std::vector<double> cve;
  /// Standard deviation of the per-fold mean losses over sqrt(K).
  std::vector<double> cvse;
  /// Binomial only: held-out misclassification rate per lambda.
  std::vector<double> misclass;
  std::vector<int> folds;
  std::size_t min_index = 0;
  double lambda_min = 0.0;
  /// Loss of the intercept-only model on the same folds.
  double cve_null = 0.0;
  PathFit full_fit;
  double seconds = 0.0;
};

/// Throws the fold fit's error type with the fold number prefixed.
CvFit cv_fit(const FileMatrix& m, std::span<const double> y, const FitConfig& cfg,
             const CvConfig& cv = {});

struct CvSummary {
  std::size_t nonzero = 0;
  double cve = 0.0;
  double r_squared = 0.0;
  double snr = 0.0;
  /// Misclassification rate (binomial) or mean squared error (gaussian)
  /// at lambda_min.
  double prediction_error = 0.0;
};

CvSummary summarize(const CvFit& cv);
/// Plain-text block: model line, selected lambda, then the five fields.
std::string cv_summary(const CvFit& cv);

/// Writes the full fit (<prefix>.coef.csv, <prefix>.fit.json),
/// <prefix>.cv.csv (lambda,cve,cvse), <prefix>.cv.json and
/// <prefix>.summary.txt.
void write_cv_fit(const CvFit& cv, const std::filesystem::path& prefix);
CvFit read_cv_fit(const std::filesystem::path& prefix);

/// Per-row held-out losses used by cv_fit.
double squared_error(double y, double link);
/// -2 [y log p + (1 - y) log(1 - p)] with p clamped to [1e-5, 1 - 1e-5].
double binomial_deviance(double y, double prob);

}  // namespace oocl
