#include "oocl/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "kernels_detail.hpp"
#include "oocl/error.hpp"

namespace oocl {

namespace {

/// Absolute KKT slack floor, relative to the RMS of the centered response.
constexpr double kKktFloor = 1e-12;

std::string fmt_lambda(double lam) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", lam);
  return buf;
}

double penalty(std::span<const double> beta, double lam, double alpha) {
  double l1 = 0.0, l2 = 0.0;
  for (double b : beta) {
    l1 += std::abs(b);
    l2 += b * b;
  }
  return lam * (alpha * l1 + 0.5 * (1.0 - alpha) * l2);
}

std::uint64_t fnv1a(std::uint64_t h, std::span<const std::uint8_t> bytes) {
  for (auto b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

// Squared-error model: r = y - ybar - X~ beta.
class GaussianModel {
 public:
  GaussianModel(const MatrixView& v, const ColumnStats& st, std::span<const double> y,
                const FitConfig& cfg)
      : v_(v), st_(st), cfg_(cfg), beta_(st.p(), 0.0) {
    const double n = static_cast<double>(y.size());
    y_mean_ = detail::y_sum_of(y) / n;
    std::vector<double> r(y.begin(), y.end());
    for (double& x : r) x -= y_mean_;
    res_.assign(r);
  }

  static void check_response(std::span<const double> y) {
    for (double x : y)
      if (!std::isfinite(x)) throw RangeError("response contains a non-finite value");
    if (std::all_of(y.begin(), y.end(), [&](double x) { return x == y[0]; }))
      throw DegenerateError("response is constant");
  }

  std::vector<double>& beta() { return beta_; }
  double null_intercept() const { return y_mean_; }
  double intercept_std() const { return y_mean_; }
  const ResidualState& gradient_residual() const { return res_; }
  double intercept_gap() const { return 0.0; }

  void zero(std::size_t j) {
    if (beta_[j] == 0.0) return;
    res_.subtract_column(v_, st_, j, -beta_[j]);
    beta_[j] = 0.0;
  }

  /// Sweeps performed. Throws ConvergenceError past max_iter.
  std::size_t solve(std::span<const std::size_t> strong, double lam, double tol,
                    std::size_t budget) {
    std::size_t sweeps = 0;
    std::vector<std::size_t> active;
    double last_obj = std::numeric_limits<double>::infinity();
    auto run = [&](std::span<const std::size_t> cols) {
      if (++sweeps > budget) throw_budget(lam);
      const double d = sweep(cols, lam);
      if (cfg_.check_monotone) {
        const double obj = objective(lam);
        if (obj > last_obj + 1e-12 * (1.0 + std::abs(last_obj)))
          throw std::logic_error("objective increased during a sweep at lambda " +
                                 fmt_lambda(lam));
        last_obj = obj;
      }
      return d;
    };
    while (true) {
      if (run(strong) < tol) break;
      while (true) {
        active.clear();
        for (std::size_t j : strong)
          if (beta_[j] != 0.0) active.push_back(j);
        if (run(active) < tol) break;
      }
    }
    return sweeps;
  }

  double objective(double lam) const {
    double ss = 0.0;
    for (double x : res_.r) ss += x * x;
    return ss / (2.0 * static_cast<double>(res_.r.size())) + penalty(beta_, lam, cfg_.alpha);
  }

 private:
  double sweep(std::span<const std::size_t> cols, double lam) {
    const double inv_n = 1.0 / static_cast<double>(st_.n);
    double max_delta = 0.0;
    for (std::size_t j : cols) {
      const double old = beta_[j];
      const double z = std_dot_xr(v_, st_, j, res_) * inv_n + old;
      const double next = cd_update(z, lam, cfg_.alpha);
      const double d = next - old;
      if (d != 0.0) {
        res_.subtract_column(v_, st_, j, d);
        beta_[j] = next;
        max_delta = std::max(max_delta, std::abs(d));
      }
    }
    return max_delta;
  }

  [[noreturn]] void throw_budget(double lam) const {
    throw ConvergenceError("coordinate descent did not converge within " +
                           std::to_string(cfg_.max_iter) + " sweeps at lambda " +
                           fmt_lambda(lam));
  }

  const MatrixView& v_;
  const ColumnStats& st_;
  const FitConfig& cfg_;
  std::vector<double> beta_;
  ResidualState res_;
  double y_mean_ = 0.0;
};

// Logistic model fitted by IRLS: each outer step builds the quadratic
// approximation at the current linear predictor and runs weighted CD on it.
class BinomialModel {
 public:
  static constexpr double kProbFloor = 1e-5;

  BinomialModel(const MatrixView& v, const ColumnStats& st, std::span<const double> y,
                const FitConfig& cfg)
      : v_(v), st_(st), cfg_(cfg), y_(y), beta_(st.p(), 0.0), xw_(st.p()), xxw_(st.p()) {
    const double n = static_cast<double>(y.size());
    const double ybar = detail::y_sum_of(y) / n;
    b0_ = null_b0_ = std::log(ybar / (1.0 - ybar));
    eta_.assign(y.size(), b0_);
    refresh_gradient();
  }

  static void check_response(std::span<const double> y) {
    bool zero = false, one = false;
    for (double x : y) {
      if (x == 0.0)
        zero = true;
      else if (x == 1.0)
        one = true;
      else
        throw RangeError("binomial response must be 0 or 1");
    }
    if (!zero || !one) throw DegenerateError("binomial response has a single class");
  }

  std::vector<double>& beta() { return beta_; }
  double null_intercept() const { return null_b0_; }
  double intercept_std() const { return b0_; }
  const ResidualState& gradient_residual() const { return grad_; }
  double intercept_gap() const { return std::abs(grad_.r_sum) / static_cast<double>(st_.n); }

  void zero(std::size_t j) {
    if (beta_[j] == 0.0) return;
    const double d = -beta_[j];
    const double c = st_.center[j], s = st_.scale[j];
    v_.with_column(j, [&](const double* x, std::span<const std::size_t> rows) {
      for (std::size_t i = 0; i < eta_.size(); ++i)
        eta_[i] += d * ((rows.empty() ? x[i] : x[rows[i]]) - c) / s;
    });
    beta_[j] = 0.0;
    refresh_gradient();
  }

  std::size_t solve(std::span<const std::size_t> strong, double lam, double tol,
                    std::size_t budget) {
    std::size_t sweeps = 0;
    std::vector<double> snapshot(strong.size());
    std::vector<std::size_t> active;
    auto run = [&](std::span<const std::size_t> cols) {
      if (++sweeps > budget)
        throw ConvergenceError("IRLS did not converge within " + std::to_string(cfg_.max_iter) +
                               " sweeps at lambda " + fmt_lambda(lam));
      return sweep(cols, lam);
    };
    while (true) {
      build_quadratic(strong);
      for (std::size_t t = 0; t < strong.size(); ++t) snapshot[t] = beta_[strong[t]];
      const double b0_start = b0_;
      while (true) {
        if (run(strong) < tol) break;
        while (true) {
          active.clear();
          for (std::size_t j : strong)
            if (beta_[j] != 0.0) active.push_back(j);
          if (run(active) < tol) break;
        }
      }
      double change = std::abs(b0_ - b0_start);
      for (std::size_t t = 0; t < strong.size(); ++t)
        change = std::max(change, std::abs(beta_[strong[t]] - snapshot[t]));
      if (change < tol) break;
    }
    refresh_gradient();
    return sweeps;
  }

 private:
  static double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

  void refresh_gradient() {
    std::vector<double> g(y_.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = y_[i] - sigmoid(eta_[i]);
    grad_.assign(g);
  }

  // Weights, weighted residual y - p and the weighted column moments of the
  // strong set at the current linear predictor.
  void build_quadratic(std::span<const std::size_t> strong) {
    const std::size_t n = y_.size();
    w_.resize(n);
    std::vector<double> rho(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(eta_[i]);
      const double pc = std::clamp(p, kProbFloor, 1.0 - kProbFloor);
      w_[i] = cfg_.majorize ? 0.25 : pc * (1.0 - pc);
      rho[i] = y_[i] - p;
    }
    rho_.assign(rho);
    w_sum_ = detail::y_sum_of(w_);
    weighted_moments(v_, st_, strong, w_, xw_, xxw_, cfg_.workers);
  }

  double sweep(std::span<const std::size_t> cols, double lam) {
    const double n = static_cast<double>(st_.n);
    double max_delta = 0.0;

    const double d0 = rho_.r_sum / w_sum_;
    if (d0 != 0.0) {
      double change = 0.0;
      for (std::size_t i = 0; i < eta_.size(); ++i) {
        const double dr = w_[i] * d0;
        rho_.r[i] -= dr;
        change += dr;
        eta_[i] += d0;
      }
      rho_.r_sum -= change;
      b0_ += d0;
      max_delta = std::abs(d0);
    }

    for (std::size_t j : cols) {
      const double vj = xxw_[j] / n;
      const double old = beta_[j];
      const double u = std_dot_xr(v_, st_, j, rho_) / n + vj * old;
      const double next = soft_threshold(u, lam * cfg_.alpha) / (vj + lam * (1.0 - cfg_.alpha));
      const double d = next - old;
      if (d == 0.0) continue;
      const double c = st_.center[j];
      const double ds = d / st_.scale[j];
      double change = 0.0;
      v_.with_column(j, [&](const double* x, std::span<const std::size_t> rows) {
        for (std::size_t i = 0; i < eta_.size(); ++i) {
          const double step = ds * ((rows.empty() ? x[i] : x[rows[i]]) - c);
          const double dr = w_[i] * step;
          rho_.r[i] -= dr;
          change += dr;
          eta_[i] += step;
        }
      });
      rho_.r_sum -= change;
      beta_[j] = next;
      max_delta = std::max(max_delta, std::abs(d));
    }
    return max_delta;
  }

  const MatrixView& v_;
  const ColumnStats& st_;
  const FitConfig& cfg_;
  std::span<const double> y_;
  std::vector<double> beta_;
  double b0_ = 0.0;
  double null_b0_ = 0.0;
  std::vector<double> eta_;
  std::vector<double> w_;
  double w_sum_ = 0.0;
  ResidualState rho_;
  ResidualState grad_;
  std::vector<double> xw_;
  std::vector<double> xxw_;
};

Mask all_active(const ColumnStats& st) { return Mask(st.active.begin(), st.active.end()); }

std::size_t count(const Mask& m) {
  std::size_t k = 0;
  for (auto b : m) k += b;
  return k;
}

std::vector<std::size_t> to_list(const Mask& m) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < m.size(); ++j)
    if (m[j]) out.push_back(j);
  return out;
}

template <class Model>
PathFit run_path(const MatrixView& v, std::span<const double> y, const FitConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  if (y.size() != v.n_rows())
    throw RangeError("response has " + std::to_string(y.size()) + " values, matrix has " +
                     std::to_string(v.n_rows()) + " rows");
  Model::check_response(y);
  const int workers = cfg.workers;

  ColumnStats st = compute_column_stats(v, workers);
  if (st.n_active() == 0) throw DegenerateError("no column has nonzero variance");
  const double lmax = lambda_max(v, y, st, cfg.alpha, workers);
  const std::size_t p = st.p();
  const double inv_n = 1.0 / static_cast<double>(st.n);

  PathFit fit;
  fit.family = cfg.family;
  fit.alpha = cfg.alpha;
  fit.policy = cfg.effective_policy();
  fit.n = st.n;
  fit.p = p;
  fit.lambda_max = lmax;
  fit.star = st.star;
  fit.tol = cfg.tol;
  {
    // lambda_max never exceeds the RMS of the centered response; the floor
    // only matters for near-degenerate paths where the relative slack would
    // drop below rounding level.
    const double ybar = detail::y_sum_of(y) * inv_n;
    double ss = 0.0;
    for (double t : y) ss += (t - ybar) * (t - ybar);
    fit.kkt_tol = std::max(cfg.kkt_tol * lmax, kKktFloor * std::sqrt(ss * inv_n));
  }
  fit.lambda = cfg.lambda.empty() ? lambda_path(lmax, cfg) : cfg.lambda;
  fit.col_names = v.matrix().col_names();

  const ScreenPolicy policy = fit.policy;
  const bool uses_bedpp = policy == ScreenPolicy::bedpp || policy == ScreenPolicy::hybrid;
  const bool uses_ssr = policy == ScreenPolicy::ssr || policy == ScreenPolicy::hybrid;
  const bool diag = cfg.diagnostics;

  BedppCache cache;
  if (uses_bedpp) {
    fill_xtx_star(v, st, st.star, workers);
    const double ybar = detail::y_sum_of(y) * inv_n;
    std::vector<double> yc2(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) yc2[i] = (y[i] - ybar) * (y[i] - ybar);
    cache = make_bedpp_cache(st, detail::y_sum_of(yc2), lmax, cfg.family, cfg.alpha);
  }

  Model model(v, st, y, cfg);
  auto& beta = model.beta();
  const Mask active_mask = all_active(st);
  const std::vector<std::size_t> active_cols = to_list(active_mask);

  std::vector<double> z(p, 0.0);
  for (std::size_t j : active_cols) z[j] = st.xty[j] * inv_n;
  // 1 where z[j] matches the current residual.
  Mask fresh = active_mask;
  double lam_prev = lmax;
  Mask ever(p, 0);
  int bedpp_idle = 0;
  bool bedpp_on = uses_bedpp;

  const std::size_t K = fit.lambda.size();
  auto reserve = [&](auto& vec) { vec.reserve(K); };
  reserve(fit.intercept), reserve(fit.n_iter), reserve(fit.n_kkt_rounds);
  reserve(fit.cols_scanned), reserve(fit.cols_refreshed), reserve(fit.safe_size);
  reserve(fit.strong_size), reserve(fit.mask_digest);

  std::vector<std::pair<std::size_t, double>> entries;
  std::vector<std::size_t> stale;

  auto refresh = [&](const Mask& want) {
    stale.clear();
    for (std::size_t j : active_cols)
      if (want[j] && !fresh[j]) stale.push_back(j);
    if (!stale.empty()) {
      scan_xr(v, st, stale, model.gradient_residual(), z, workers);
      for (std::size_t j : stale) fresh[j] = 1;
    }
    return stale.size();
  };

  auto record = [&](const Mask& safe, const Mask& strong) {
    entries.clear();
    double shift = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (beta[j] == 0.0) continue;
      const double b = beta[j] / st.scale[j];
      entries.emplace_back(j, b);
      shift += b * st.center[j];
    }
    fit.coefs.push_back(entries);
    fit.intercept.push_back(model.intercept_std() - shift);
    fit.safe_size.push_back(count(safe));
    fit.strong_size.push_back(count(strong));
    fit.mask_digest.push_back(fnv1a(fnv1a(1469598103934665603ull, safe), strong));
  };

  for (std::size_t k = 0; k < K; ++k) {
    const double lam = fit.lambda[k];
    const double lam_eff = std::min(lam, lmax);

    ScreenDiagnostics d;
    d.p = p;
    if (diag && policy != ScreenPolicy::none) {
      if (uses_bedpp) d.bedpp_discarded = p - count(bedpp_filter(cache, lam_eff, workers));
      if (uses_ssr) {
        refresh(active_mask);
        d.ssr_discarded = p - count(ssr_filter(z, lam_eff, lam_prev, cfg.alpha, active_mask));
      }
    }

    if (lam >= lmax) {
      // Null solution; every coefficient is still zero.
      Mask safe = active_mask, strong(p, 0);
      if (uses_bedpp) safe = bedpp_filter(cache, lmax, workers);
      if (diag && policy == ScreenPolicy::hybrid)
        d.hybrid_discarded = p - count(ssr_filter(z, lmax, lam_prev, cfg.alpha, safe));
      record(safe, strong);
      fit.n_iter.push_back(0);
      fit.n_kkt_rounds.push_back(0);
      fit.cols_scanned.push_back(0);
      fit.cols_refreshed.push_back(0);
      if (diag) fit.diagnostics.push_back(d);
      continue;
    }

    // Safe set.
    Mask safe = active_mask;
    if (bedpp_on) {
      safe = bedpp_filter(cache, lam, workers);
      const std::size_t discarded = st.n_active() - count(safe);
      bedpp_idle = discarded == 0 ? bedpp_idle + 1 : 0;
      if (bedpp_idle >= 2) bedpp_on = false;
    }

    // Strong set.
    std::size_t refreshed = 0;
    Mask strong;
    switch (policy) {
      case ScreenPolicy::none:
        strong = active_mask;
        break;
      case ScreenPolicy::bedpp:
        strong = safe;
        break;
      case ScreenPolicy::ssr:
      case ScreenPolicy::hybrid:
        refreshed = refresh(safe);
        strong = ssr_filter(z, lam, lam_prev, cfg.alpha, safe);
        break;
    }
    if (diag && policy == ScreenPolicy::hybrid) d.hybrid_discarded = p - count(strong);
    for (std::size_t j : active_cols) {
      if (!safe[j]) {
        model.zero(j);
        continue;
      }
      if (beta[j] != 0.0 || ever[j]) strong[j] = 1;
    }

    std::vector<std::size_t> safe_list;
    if (uses_bedpp) safe_list = to_list(safe);
    const std::span<const std::size_t> scope = uses_bedpp ? safe_list : active_cols;
    std::vector<std::size_t> strong_list = to_list(strong);

    double inner_tol = cfg.tol;
    std::size_t sweeps = 0, rounds = 0;
    bool certified = false;
    while (rounds < cfg.max_kkt_rounds) {
      ++rounds;
      std::fill(fresh.begin(), fresh.end(), 0);
      sweeps += model.solve(strong_list, lam, inner_tol,
                            cfg.max_iter - std::min(sweeps, cfg.max_iter));

      // Cheap stationarity pass over the nonzero coefficients first; a full
      // scope scan is only worth doing once they are settled.
      for (int tighten = 0; tighten < 6; ++tighten) {
        std::vector<std::size_t> nz;
        for (std::size_t j : strong_list)
          if (beta[j] != 0.0) nz.push_back(j);
        const KktResult chk = kkt_check(v, st, model.gradient_residual(), beta, nz, lam,
                                        cfg.alpha, fit.kkt_tol, z, workers);
        if (chk.unsettled.empty() && model.intercept_gap() <= fit.kkt_tol) break;
        inner_tol *= 0.1;
        sweeps += model.solve(strong_list, lam, inner_tol,
                              cfg.max_iter - std::min(sweeps, cfg.max_iter));
      }

      const KktResult kkt = kkt_check(v, st, model.gradient_residual(), beta, scope, lam,
                                      cfg.alpha, fit.kkt_tol, z, workers);
      for (std::size_t j : scope) fresh[j] = 1;
      if (kkt.violators.empty() && kkt.unsettled.empty() &&
          model.intercept_gap() <= fit.kkt_tol) {
        certified = true;
        break;
      }
      if (!kkt.violators.empty()) {
        for (std::size_t j : kkt.violators) strong[j] = 1;
        strong_list = to_list(strong);
      } else {
        inner_tol *= 0.1;
      }
    }
    if (!certified)
      throw ConvergenceError("KKT conditions still violated after " +
                             std::to_string(cfg.max_kkt_rounds) + " rounds at lambda " +
                             fmt_lambda(lam));

    for (std::size_t j : strong_list)
      if (beta[j] != 0.0) ever[j] = 1;
    record(safe, strong);
    fit.n_iter.push_back(sweeps);
    fit.n_kkt_rounds.push_back(rounds);
    fit.cols_scanned.push_back(scope.size());
    fit.cols_refreshed.push_back(refreshed);
    if (diag) fit.diagnostics.push_back(d);
    lam_prev = lam;
  }

  fit.center = std::move(st.center);
  fit.scale = std::move(st.scale);
  fit.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return fit;
}

}  // namespace

void FitConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw RangeError("alpha must lie in (0, 1]");
  if (lambda.empty()) {
    if (n_lambda < 1) throw RangeError("n_lambda must be at least 1");
    if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0))
      throw RangeError("lambda_min_ratio must lie in (0, 1)");
  } else {
    for (std::size_t k = 0; k < lambda.size(); ++k) {
      if (!(std::isfinite(lambda[k]) && lambda[k] > 0.0))
        throw RangeError("lambda values must be positive and finite");
      if (k > 0 && lambda[k] > lambda[k - 1])
        throw RangeError("lambda grid must be non-increasing");
    }
  }
  if (!(tol > 0.0)) throw RangeError("tol must be positive");
  if (!(kkt_tol > 0.0)) throw RangeError("kkt_tol must be positive");
  if (max_iter < 1) throw RangeError("max_iter must be at least 1");
  if (max_kkt_rounds < 1) throw RangeError("max_kkt_rounds must be at least 1");
  if (workers < 1) throw RangeError("workers must be at least 1");
}

ScreenPolicy FitConfig::effective_policy() const {
  const bool lasso = family == Family::gaussian && alpha == 1.0;
  const ScreenPolicy want = screen.value_or(lasso ? ScreenPolicy::hybrid : ScreenPolicy::ssr);
  if (!lasso && (want == ScreenPolicy::bedpp || want == ScreenPolicy::hybrid))
    return ScreenPolicy::ssr;
  return want;
}

void SparsePath::push_back(std::span<const std::pair<std::size_t, double>> entries) {
  for (const auto& [j, b] : entries) {
    index.push_back(j);
    value.push_back(b);
  }
  col_start.push_back(index.size());
}

std::vector<double> PathFit::dense_coefs(std::size_t k) const {
  if (k >= n_lambda()) throw RangeError("lambda index out of range");
  std::vector<double> out(p, 0.0);
  const auto idx = coefs.indices(k);
  const auto val = coefs.values(k);
  for (std::size_t t = 0; t < idx.size(); ++t) out[idx[t]] = val[t];
  return out;
}

std::string PathFit::col_name(std::size_t j) const {
  if (j < col_names.size()) return col_names[j];
  return "V" + std::to_string(j + 1);
}

double lambda_max(const MatrixView& v, std::span<const double> y, ColumnStats& st, double alpha,
                  int workers) {
  if (y.size() != st.n) throw RangeError("response length does not match the view");
  if (std::all_of(y.begin(), y.end(), [&](double x) { return x == y[0]; }))
    throw DegenerateError("response is constant");
  fill_xty(v, st, y, workers);
  double best = 0.0;
  std::size_t star = st.p();
  for (std::size_t j = 0; j < st.p(); ++j) {
    if (!st.active[j]) continue;
    const double a = std::abs(st.xty[j]);
    if (star == st.p() || a > best) {
      best = a;
      star = j;
    }
  }
  if (star == st.p()) throw DegenerateError("no column has nonzero variance");
  const double lmax = best / (static_cast<double>(st.n) * alpha);
  if (!(lmax > 0.0)) throw DegenerateError("lambda_max is zero: response is orthogonal to X");
  st.star = star;
  return lmax;
}

std::vector<double> lambda_path(double lmax, const FitConfig& cfg) {
  const std::size_t K = cfg.n_lambda;
  std::vector<double> grid(K);
  grid[0] = lmax;
  if (K == 1) return grid;
  const double lmin = cfg.lambda_min_ratio * lmax;
  if (cfg.spacing == LambdaSpacing::linear) {
    const double step = (lmax - lmin) / static_cast<double>(K - 1);
    for (std::size_t k = 1; k < K; ++k) grid[k] = lmax - static_cast<double>(k) * step;
  } else {
    const double a = std::log(lmax), b = std::log(lmin);
    for (std::size_t k = 1; k < K; ++k)
      grid[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(K - 1));
  }
  grid[K - 1] = lmin;
  return grid;
}

PathFit fit_gaussian(const MatrixView& v, std::span<const double> y, const FitConfig& cfg) {
  FitConfig c = cfg;
  c.family = Family::gaussian;
  return run_path<GaussianModel>(v, y, c);
}

PathFit fit_binomial(const MatrixView& v, std::span<const double> y, const FitConfig& cfg) {
  FitConfig c = cfg;
  c.family = Family::binomial;
  return run_path<BinomialModel>(v, y, c);
}

PathFit fit(const MatrixView& v, std::span<const double> y, const FitConfig& cfg) {
  return cfg.family == Family::gaussian ? fit_gaussian(v, y, cfg) : fit_binomial(v, y, cfg);
}

}  // namespace oocl
