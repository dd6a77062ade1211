#include "oocl/cv.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "oocl/error.hpp"

namespace oocl {

using json = nlohmann::ordered_json;

namespace {

constexpr double kProbFloor = 1e-5;

double sigmoid(double e) { return 1.0 / (1.0 + std::exp(-e)); }

std::string model_line(const CvFit& cv) {
  const char* penalty = cv.alpha == 1.0 ? "lasso" : "elastic-net";
  const char* model =
      cv.family == Family::gaussian ? "linear regression" : "logistic regression";
  return std::string(penalty) + "-penalized " + model + " with n=" + std::to_string(cv.n) +
         ", p=" + std::to_string(cv.p);
}

// Per-fold accumulators: summed loss and misclassified count per lambda.
struct FoldLoss {
  std::vector<double> loss;
  std::vector<double> miss;
  std::size_t rows = 0;
  double null_loss = 0.0;
};

FoldLoss run_fold(const FileMatrix& m, std::span<const double> y, std::span<const int> folds,
                  int fold, const FitConfig& cfg) {
  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == fold ? test : train).push_back(i);
  std::vector<double> y_train(train.size()), y_test(test.size());
  for (std::size_t t = 0; t < train.size(); ++t) y_train[t] = y[train[t]];
  for (std::size_t t = 0; t < test.size(); ++t) y_test[t] = y[test[t]];

  const MatrixView train_view(m, std::move(train));
  const MatrixView test_view(m, std::move(test));
  const bool binomial = cfg.family == Family::binomial;

  FoldLoss out;
  out.rows = y_test.size();
  {
    // Intercept-only model fitted on the training rows.
    const double mean = std::accumulate(y_train.begin(), y_train.end(), 0.0) /
                        static_cast<double>(y_train.size());
    for (double yi : y_test)
      out.null_loss += binomial ? binomial_deviance(yi, mean) : squared_error(yi, mean);
  }

  const PathFit pf = fit(train_view, y_train, cfg);
  const std::size_t L = pf.n_lambda();
  out.loss.assign(L, 0.0);
  out.miss.assign(L, 0.0);
  for (std::size_t k = 0; k < L; ++k) {
    const auto link = predict(pf, test_view, k, PredictKind::link);
    for (std::size_t i = 0; i < link.size(); ++i) {
      if (binomial) {
        const double p = sigmoid(link[i]);
        out.loss[k] += binomial_deviance(y_test[i], p);
        out.miss[k] += ((p >= 0.5 ? 1.0 : 0.0) != y_test[i]) ? 1.0 : 0.0;
      } else {
        out.loss[k] += squared_error(y_test[i], link[i]);
      }
    }
  }
  return out;
}

[[noreturn]] void rethrow_for_fold(std::exception_ptr err, int fold) {
  const std::string where = "fold " + std::to_string(fold) + ": ";
  try {
    std::rethrow_exception(err);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(where + e.what());
  } catch (const DegenerateError& e) {
    throw DegenerateError(where + e.what());
  } catch (const RangeError& e) {
    throw RangeError(where + e.what());
  }
}

}  // namespace

double squared_error(double y, double link) { return (y - link) * (y - link); }

double binomial_deviance(double y, double prob) {
  // Probability assigned to the observed class, floored so log stays finite.
  const double q = y == 1.0 ? prob : 1.0 - prob;
  return -2.0 * std::log(std::max(q, kProbFloor));
}

std::vector<int> make_folds(std::size_t n, std::size_t k, std::uint64_t seed,
                            std::optional<std::span<const double>> stratify_on) {
  if (k < 2) throw RangeError("need at least 2 folds");
  if (k > n) throw RangeError("more folds (" + std::to_string(k) + ") than rows (" +
                              std::to_string(n) + ")");
  std::mt19937_64 rng(seed);
  std::vector<int> folds(n, 0);
  std::size_t dealt = 0;
  auto deal = [&](std::vector<std::size_t> ids) {
    std::shuffle(ids.begin(), ids.end(), rng);
    for (std::size_t i : ids) folds[i] = static_cast<int>(dealt++ % k) + 1;
  };
  if (stratify_on) {
    const auto y = *stratify_on;
    if (y.size() != n) throw RangeError("stratification labels do not match n");
    std::vector<std::size_t> zeros, ones;
    for (std::size_t i = 0; i < n; ++i) (y[i] == 1.0 ? ones : zeros).push_back(i);
    deal(std::move(zeros));
    deal(std::move(ones));
  } else {
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    deal(std::move(ids));
  }
  return folds;
}

CvFit cv_fit(const FileMatrix& m, std::span<const double> y, const FitConfig& cfg,
             const CvConfig& cv) {
  const auto t0 = std::chrono::steady_clock::now();
  if (y.size() != m.n_rows())
    throw RangeError("response has " + std::to_string(y.size()) + " values, matrix has " +
                     std::to_string(m.n_rows()) + " rows");
  CvFit out;
  out.family = cfg.family;
  out.alpha = cfg.alpha;
  out.n = m.n_rows();
  out.p = m.n_cols();
  out.n_folds = cv.folds;
  out.seed = cv.seed;

  const bool stratify = cv.stratify.value_or(cfg.family == Family::binomial);
  out.folds = make_folds(out.n, cv.folds, cv.seed,
                         stratify ? std::optional<std::span<const double>>(y) : std::nullopt);

  out.full_fit = fit(MatrixView(m), y, cfg);
  out.lambda = out.full_fit.lambda;
  const std::size_t L = out.lambda.size();
  const std::size_t K = cv.folds;

  FitConfig fold_cfg = cfg;
  fold_cfg.lambda = out.lambda;
  fold_cfg.diagnostics = false;
  if (cv.parallel_folds) fold_cfg.workers = 1;

  std::vector<FoldLoss> losses(K);
  std::vector<std::exception_ptr> errors(K);
  const int fold_threads =
      cv.parallel_folds ? std::max(1, std::min(cfg.workers, static_cast<int>(K))) : 1;
  const auto KK = static_cast<std::ptrdiff_t>(K);
#pragma omp parallel for schedule(dynamic) num_threads(fold_threads) if (fold_threads > 1)
  for (std::ptrdiff_t f = 0; f < KK; ++f) {
    try {
      losses[f] = run_fold(m, y, out.folds, static_cast<int>(f) + 1, fold_cfg);
    } catch (...) {
      errors[f] = std::current_exception();
    }
  }
  for (std::size_t f = 0; f < K; ++f)
    if (errors[f]) rethrow_for_fold(errors[f], static_cast<int>(f) + 1);

  const double n = static_cast<double>(out.n);
  out.cve.assign(L, 0.0);
  out.cvse.assign(L, 0.0);
  if (cfg.family == Family::binomial) out.misclass.assign(L, 0.0);
  double null_sum = 0.0;
  for (const auto& fl : losses) null_sum += fl.null_loss;
  out.cve_null = null_sum / n;
  for (std::size_t k = 0; k < L; ++k) {
    double total = 0.0, miss = 0.0;
    for (const auto& fl : losses) {
      total += fl.loss[k];
      miss += fl.miss[k];
    }
    out.cve[k] = total / n;
    if (!out.misclass.empty()) out.misclass[k] = miss / n;
    double fold_mean = 0.0;
    for (const auto& fl : losses) fold_mean += fl.loss[k] / static_cast<double>(fl.rows);
    fold_mean /= static_cast<double>(K);
    double ss = 0.0;
    for (const auto& fl : losses) {
      const double d = fl.loss[k] / static_cast<double>(fl.rows) - fold_mean;
      ss += d * d;
    }
    out.cvse[k] = std::sqrt(ss / static_cast<double>(K - 1)) / std::sqrt(static_cast<double>(K));
  }
  out.min_index = static_cast<std::size_t>(
      std::min_element(out.cve.begin(), out.cve.end()) - out.cve.begin());
  out.lambda_min = out.lambda[out.min_index];
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

CvSummary summarize(const CvFit& cv) {
  CvSummary s;
  const std::size_t k = cv.min_index;
  s.nonzero = cv.full_fit.coefs.nnz(k);
  s.cve = cv.cve[k];
  s.r_squared = 1.0 - s.cve / cv.cve_null;
  s.snr = (cv.cve_null - s.cve) / s.cve;
  s.prediction_error = cv.family == Family::binomial ? cv.misclass[k] : s.cve;
  return s;
}

std::string cv_summary(const CvFit& cv) {
  const CvSummary s = summarize(cv);
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%s\n"
                "At minimum cross-validation error (lambda=%.4g):\n"
                "-------------------------------------------------\n"
                "  Nonzero coefficients: %zu\n"
                "  Cross-validation error (%s): %.2f\n"
                "  R-squared: %.2f\n"
                "  Signal-to-noise ratio: %.2f\n"
                "  Prediction error: %.3f\n",
                model_line(cv).c_str(), cv.lambda_min, s.nonzero,
                cv.family == Family::binomial ? "deviance" : "mse", s.cve, s.r_squared, s.snr,
                s.prediction_error);
  return buf;
}

void write_cv_fit(const CvFit& cv, const std::filesystem::path& prefix) {
  write_path_fit(cv.full_fit, prefix);
  const auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out.flush()) throw IoError("write failed for " + path.string());
  };

  std::string csv = "lambda,cve,cvse\n";
  char buf[96];
  for (std::size_t k = 0; k < cv.lambda.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", cv.lambda[k], cv.cve[k], cv.cvse[k]);
    csv += buf;
  }
  write(prefix.string() + ".cv.csv", csv);

  const CvSummary s = summarize(cv);
  json j;
  j["family"] = std::string(to_string(cv.family));
  j["alpha"] = cv.alpha;
  j["n"] = cv.n;
  j["p"] = cv.p;
  j["folds"] = cv.n_folds;
  j["seed"] = cv.seed;
  j["lambda_min"] = cv.lambda_min;
  j["min_index"] = cv.min_index;
  j["cve_null"] = cv.cve_null;
  j["seconds"] = cv.seconds;
  j["summary"] = {{"nonzero", s.nonzero},
                  {"cve", s.cve},
                  {"r_squared", s.r_squared},
                  {"snr", s.snr},
                  {"prediction_error", s.prediction_error}};
  j["lambda"] = cv.lambda;
  j["cve"] = cv.cve;
  j["cvse"] = cv.cvse;
  j["misclass"] = cv.misclass;
  j["fold_assignments"] = cv.folds;
  write(prefix.string() + ".cv.json", j.dump(1) + "\n");
  write(prefix.string() + ".summary.txt", cv_summary(cv));
}

CvFit read_cv_fit(const std::filesystem::path& prefix) {
  const std::filesystem::path path = prefix.string() + ".cv.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  CvFit cv;
  try {
    const json j = json::parse(ss.str());
    cv.family = parse_family(j.at("family").get<std::string>());
    cv.alpha = j.at("alpha").get<double>();
    cv.n = j.at("n").get<std::size_t>();
    cv.p = j.at("p").get<std::size_t>();
    cv.n_folds = j.at("folds").get<std::size_t>();
    cv.seed = j.at("seed").get<std::uint64_t>();
    cv.lambda_min = j.at("lambda_min").get<double>();
    cv.min_index = j.at("min_index").get<std::size_t>();
    cv.cve_null = j.at("cve_null").get<double>();
    cv.seconds = j.at("seconds").get<double>();
    cv.lambda = j.at("lambda").get<std::vector<double>>();
    cv.cve = j.at("cve").get<std::vector<double>>();
    cv.cvse = j.at("cvse").get<std::vector<double>>();
    cv.misclass = j.at("misclass").get<std::vector<double>>();
    cv.folds = j.at("fold_assignments").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw FormatError("corrupt cv metadata " + path.string() + ": " + e.what());
  }
  cv.full_fit = read_path_fit(prefix);
  return cv;
}

}  // namespace oocl
