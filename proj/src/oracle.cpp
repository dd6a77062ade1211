#include "oocl/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "oocl/error.hpp"

namespace oocl {

namespace {

constexpr double kRefTol = 1e-10;
constexpr std::size_t kRefMaxIter = 1000000;
constexpr double kRefKkt = 1e-9;
constexpr double kTolFloor = 1e-15;

double naive_mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Column j of the view, copied out.
std::vector<double> gather(const MatrixView& v, std::size_t j) {
  std::vector<double> out(v.n_rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v(i, j);
  return out;
}

// Two-pass mean and population scale.
void naive_moments(std::span<const double> x, double& c, double& s) {
  c = naive_mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - c) * (v - c);
  s = std::sqrt(ss / static_cast<double>(x.size()));
}

struct DenseStd {
  std::size_t n = 0, p = 0;
  std::vector<double> xs;  // column-major standardized; zero for constant columns
  std::vector<double> center, scale;
  std::vector<std::uint8_t> active;

  const double* col(std::size_t j) const { return xs.data() + j * n; }
};

DenseStd standardize(const MatrixView& v) {
  DenseStd d;
  d.n = v.n_rows();
  d.p = v.n_cols();
  if (d.n < 2) throw RangeError("reference fit needs at least 2 rows");
  d.xs.assign(d.n * d.p, 0.0);
  d.center.resize(d.p);
  d.scale.resize(d.p);
  d.active.resize(d.p);
  for (std::size_t j = 0; j < d.p; ++j) {
    const auto x = gather(v, j);
    naive_moments(x, d.center[j], d.scale[j]);
    d.active[j] = d.scale[j] > 0.0;
    if (!d.active[j]) continue;
    double* out = d.xs.data() + j * d.n;
    for (std::size_t i = 0; i < d.n; ++i) out[i] = (x[i] - d.center[j]) / d.scale[j];
  }
  return d;
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double soft(double z, double g) { return z > g ? z - g : (z < -g ? z + g : 0.0); }

double sigmoid(double e) { return 1.0 / (1.0 + std::exp(-e)); }

class DenseSolver {
 public:
  DenseSolver(const DenseStd& d, std::span<const double> y, Family family, double alpha)
      : d_(d), y_(y.begin(), y.end()), family_(family), alpha_(alpha), beta_(d.p, 0.0) {
    const double ybar = naive_mean(y_);
    if (family_ == Family::gaussian) {
      b0_ = ybar;
    } else {
      b0_ = std::log(ybar / (1.0 - ybar));
    }
    null_b0_ = b0_;
    eta_.assign(d.n, b0_);
  }

  std::vector<double>& beta() { return beta_; }
  double b0() const { return b0_; }
  double null_b0() const { return null_b0_; }

  /// Residual y - mean response at the current iterate.
  std::vector<double> gradient_residual() const {
    std::vector<double> r(d_.n);
    for (std::size_t i = 0; i < d_.n; ++i)
      r[i] = y_[i] - (family_ == Family::gaussian ? eta_[i] : sigmoid(eta_[i]));
    return r;
  }

  /// Largest KKT residual over all varying columns and the intercept.
  double kkt_residual(double lam) const {
    const auto r = gradient_residual();
    const double n = static_cast<double>(d_.n);
    double worst = std::abs(naive_mean(r));
    for (std::size_t j = 0; j < d_.p; ++j) {
      if (!d_.active[j]) continue;
      const double g = dot(d_.col(j), r.data(), d_.n) / n;
      const double b = beta_[j];
      const double e = b == 0.0 ? std::abs(g) - alpha_ * lam
                                : std::abs(g - alpha_ * lam * (b > 0 ? 1 : -1) -
                                           lam * (1 - alpha_) * b);
      worst = std::max(worst, e);
    }
    return worst;
  }

  std::size_t solve(double lam) {
    std::size_t sweeps = 0;
    double tol = kRefTol;
    while (true) {
      sweeps += family_ == Family::gaussian ? solve_gaussian(lam, tol, sweeps)
                                            : solve_binomial(lam, tol, sweeps);
      if (kkt_residual(lam) <= kRefKkt || tol <= kTolFloor) break;
      tol = std::max(tol * 0.1, kTolFloor);
    }
    return sweeps;
  }

 private:
  void guard(std::size_t sweeps, double lam) const {
    if (sweeps > kRefMaxIter) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "reference solver did not converge at lambda %.6g", lam);
      throw ConvergenceError(buf);
    }
  }

  // Gaussian: eta = b0 + X~ beta, residual r = y - eta kept explicitly.
  std::size_t solve_gaussian(double lam, double tol, std::size_t used) {
    const double n = static_cast<double>(d_.n);
    std::vector<double> r(d_.n);
    for (std::size_t i = 0; i < d_.n; ++i) r[i] = y_[i] - eta_[i];
    std::size_t sweeps = 0;
    auto sweep = [&](bool active_only) {
      guard(used + ++sweeps, lam);
      double md = 0.0;
      for (std::size_t j = 0; j < d_.p; ++j) {
        if (!d_.active[j] || (active_only && beta_[j] == 0.0)) continue;
        const double* x = d_.col(j);
        const double z = dot(x, r.data(), d_.n) / n + beta_[j];
        const double next = soft(z, lam * alpha_) / (1.0 + lam * (1.0 - alpha_));
        const double dlt = next - beta_[j];
        if (dlt == 0.0) continue;
        for (std::size_t i = 0; i < d_.n; ++i) {
          r[i] -= dlt * x[i];
          eta_[i] += dlt * x[i];
        }
        beta_[j] = next;
        md = std::max(md, std::abs(dlt));
      }
      return md;
    };
    while (sweep(false) >= tol)
      while (sweep(true) >= tol) {
      }
    return sweeps;
  }

  std::size_t solve_binomial(double lam, double tol, std::size_t used) {
    const double n = static_cast<double>(d_.n);
    std::size_t sweeps = 0;
    std::vector<double> w(d_.n), rho(d_.n), vj(d_.p);
    while (true) {
      double w_sum = 0.0;
      for (std::size_t i = 0; i < d_.n; ++i) {
        const double p = sigmoid(eta_[i]);
        const double pc = std::clamp(p, 1e-5, 1.0 - 1e-5);
        w[i] = pc * (1.0 - pc);
        rho[i] = y_[i] - p;
        w_sum += w[i];
      }
      for (std::size_t j = 0; j < d_.p; ++j) {
        if (!d_.active[j]) continue;
        const double* x = d_.col(j);
        double s = 0.0;
        for (std::size_t i = 0; i < d_.n; ++i) s += w[i] * x[i] * x[i];
        vj[j] = s / n;
      }
      const std::vector<double> start = beta_;
      const double b0_start = b0_;
      auto sweep = [&](bool active_only) {
        guard(used + ++sweeps, lam);
        double rs = 0.0;
        for (double v : rho) rs += v;
        const double d0 = rs / w_sum;
        for (std::size_t i = 0; i < d_.n; ++i) {
          rho[i] -= w[i] * d0;
          eta_[i] += d0;
        }
        b0_ += d0;
        double md = std::abs(d0);
        for (std::size_t j = 0; j < d_.p; ++j) {
          if (!d_.active[j] || (active_only && beta_[j] == 0.0)) continue;
          const double* x = d_.col(j);
          const double u = dot(x, rho.data(), d_.n) / n + vj[j] * beta_[j];
          const double next = soft(u, lam * alpha_) / (vj[j] + lam * (1.0 - alpha_));
          const double dlt = next - beta_[j];
          if (dlt == 0.0) continue;
          for (std::size_t i = 0; i < d_.n; ++i) {
            rho[i] -= w[i] * dlt * x[i];
            eta_[i] += dlt * x[i];
          }
          beta_[j] = next;
          md = std::max(md, std::abs(dlt));
        }
        return md;
      };
      while (sweep(false) >= tol)
        while (sweep(true) >= tol) {
        }
      double change = std::abs(b0_ - b0_start);
      for (std::size_t j = 0; j < d_.p; ++j) change = std::max(change, std::abs(beta_[j] - start[j]));
      if (change < tol) break;
    }
    return sweeps;
  }

  const DenseStd& d_;
  std::vector<double> y_;
  Family family_;
  double alpha_;
  std::vector<double> beta_;
  double b0_ = 0.0;
  double null_b0_ = 0.0;
  std::vector<double> eta_;
};

// Fitted mean-scale quantities from original-scale coefficients.
std::vector<double> linear_predictor(const PathFit& fit, std::size_t k, const MatrixView& v) {
  std::vector<double> eta(v.n_rows(), fit.intercept[k]);
  const auto idx = fit.coefs.indices(k);
  const auto val = fit.coefs.values(k);
  for (std::size_t t = 0; t < idx.size(); ++t)
    for (std::size_t i = 0; i < eta.size(); ++i) eta[i] += val[t] * v(i, idx[t]);
  return eta;
}

double quantile(const std::vector<double>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void check_same_grid(const PathFit& a, const PathFit& b) {
  if (a.lambda.size() != b.lambda.size())
    throw RangeError("fits have different lambda grids (" + std::to_string(a.lambda.size()) +
                     " vs " + std::to_string(b.lambda.size()) + " points)");
  for (std::size_t k = 0; k < a.lambda.size(); ++k)
    if (std::abs(a.lambda[k] - b.lambda[k]) > 1e-12 * std::abs(b.lambda[k]))
      throw RangeError("fits have different lambda grids at index " + std::to_string(k));
}

// Draws X column by column and accumulates the linear predictor as it goes.
using ColumnFill = std::function<void(std::size_t, std::span<double>)>;

SynthData generate(const SynthSpec& spec,
                   const std::function<FileMatrix(const ColumnFill&)>& sink) {
  if (spec.n == 0 || spec.p == 0) throw RangeError("synthetic data needs n, p > 0");
  if (spec.n_true > spec.p) throw RangeError("n_true exceeds p");
  std::mt19937_64 rng(spec.seed);
  std::vector<std::size_t> ids(spec.p);
  for (std::size_t j = 0; j < spec.p; ++j) ids[j] = j;
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<double> beta(spec.p, 0.0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (std::size_t t = 0; t < spec.n_true; ++t) beta[ids[t]] = unif(rng);

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> eta(spec.n, 0.0);
  SynthData out{sink([&](std::size_t j, std::span<double> col) {
                  for (double& x : col) x = normal(rng);
                  if (beta[j] != 0.0)
                    for (std::size_t i = 0; i < spec.n; ++i) eta[i] += beta[j] * col[i];
                }),
                {}, std::move(beta)};

  out.y.resize(spec.n);
  if (spec.family == Family::gaussian) {
    for (std::size_t i = 0; i < spec.n; ++i) out.y[i] = eta[i] + spec.noise * normal(rng);
  } else {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::size_t i = 0; i < spec.n; ++i) out.y[i] = u01(rng) < sigmoid(eta[i]) ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace

PathFit reference_fit(const MatrixView& v, std::span<const double> y, const FitConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  if (y.size() != v.n_rows()) throw RangeError("response length does not match the matrix");
  const DenseStd d = standardize(v);
  const double n = static_cast<double>(d.n);

  double lmax = 0.0;
  std::size_t star = 0;
  {
    const double ybar = naive_mean(y);
    std::vector<double> yc(y.begin(), y.end());
    for (double& x : yc) x -= ybar;
    for (std::size_t j = 0; j < d.p; ++j) {
      if (!d.active[j]) continue;
      const double a = std::abs(dot(d.col(j), yc.data(), d.n)) / (n * cfg.alpha);
      if (a > lmax) {
        lmax = a;
        star = j;
      }
    }
  }
  if (!(lmax > 0.0)) throw DegenerateError("lambda_max is zero");

  PathFit fit;
  fit.family = cfg.family;
  fit.alpha = cfg.alpha;
  fit.policy = ScreenPolicy::none;
  fit.n = d.n;
  fit.p = d.p;
  fit.lambda_max = lmax;
  fit.star = star;
  fit.tol = kRefTol;
  fit.kkt_tol = kRefKkt;
  fit.lambda = cfg.lambda.empty() ? lambda_path(lmax, cfg) : cfg.lambda;
  fit.center = d.center;
  fit.scale = d.scale;
  fit.col_names = v.matrix().col_names();

  DenseSolver solver(d, y, cfg.family, cfg.alpha);
  std::vector<std::pair<std::size_t, double>> entries;
  for (double lam : fit.lambda) {
    std::size_t sweeps = 0;
    if (lam < lmax) sweeps = solver.solve(lam);
    entries.clear();
    double shift = 0.0;
    const auto& beta = solver.beta();
    for (std::size_t j = 0; j < d.p; ++j) {
      if (beta[j] == 0.0) continue;
      const double b = beta[j] / d.scale[j];
      entries.emplace_back(j, b);
      shift += b * d.center[j];
    }
    fit.coefs.push_back(entries);
    fit.intercept.push_back((lam < lmax ? solver.b0() : solver.null_b0()) - shift);
    fit.n_iter.push_back(sweeps);
    fit.n_kkt_rounds.push_back(0);
    fit.cols_scanned.push_back(0);
    fit.cols_refreshed.push_back(0);
    fit.safe_size.push_back(0);
    fit.strong_size.push_back(0);
    fit.mask_digest.push_back(0);
  }
  fit.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return fit;
}

double objective(const PathFit& fit, std::size_t k, const MatrixView& v,
                 std::span<const double> y) {
  if (k >= fit.n_lambda()) throw RangeError("lambda index out of range");
  const auto eta = linear_predictor(fit, k, v);
  const double n = static_cast<double>(v.n_rows());
  double loss = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (fit.family == Family::gaussian) {
      const double r = y[i] - eta[i];
      loss += 0.5 * r * r;
    } else {
      // log(1 + e^eta) computed stably.
      const double e = eta[i];
      const double softplus = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
      loss += softplus - y[i] * e;
    }
  }
  double l1 = 0.0, l2 = 0.0;
  const auto idx = fit.coefs.indices(k);
  const auto val = fit.coefs.values(k);
  for (std::size_t t = 0; t < idx.size(); ++t) {
    double c, s;
    naive_moments(gather(v, idx[t]), c, s);
    const double b = val[t] * s;
    l1 += std::abs(b);
    l2 += b * b;
  }
  const double lam = fit.lambda[k];
  return loss / n + lam * (fit.alpha * l1 + 0.5 * (1.0 - fit.alpha) * l2);
}

Summary6 summarize(std::vector<double> values) {
  Summary6 s;
  std::erase_if(values, [](double x) { return std::isnan(x); });
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q3 = quantile(values, 0.75);
  double sum = 0.0;
  for (double x : values) sum += x;
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

RdReport rd(const PathFit& a, const PathFit& b, const MatrixView& v, std::span<const double> y) {
  check_same_grid(a, b);
  if (a.family != b.family || a.alpha != b.alpha)
    throw RangeError("fits differ in family or alpha");
  RdReport rep;
  rep.rd.resize(a.n_lambda());
  for (std::size_t k = 0; k < a.n_lambda(); ++k) {
    const double qa = objective(a, k, v, y);
    const double qb = objective(b, k, v, y);
    rep.rd[k] = qb > 0.0 ? (qa - qb) / qb : std::numeric_limits<double>::quiet_NaN();
    if (!std::isnan(rep.rd[k])) rep.max_abs = std::max(rep.max_abs, std::abs(rep.rd[k]));
  }
  rep.summary = summarize(rep.rd);
  return rep;
}

KktAudit kkt_audit(const PathFit& fit, std::size_t k, const MatrixView& v,
                   std::span<const double> y, double tol, std::span<const std::uint8_t> scope) {
  if (!scope.empty() && scope.size() != v.n_cols())
    throw RangeError("audit scope length does not match the matrix");
  const auto eta = linear_predictor(fit, k, v);
  const std::size_t n = v.n_rows();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i)
    r[i] = y[i] - (fit.family == Family::gaussian ? eta[i] : sigmoid(eta[i]));
  const auto dense = fit.dense_coefs(k);
  const double lam = fit.lambda[k];
  const double a = fit.alpha;

  KktAudit out;
  out.intercept = std::abs(naive_mean(r));
  if (out.intercept > tol) ++out.violations;
  for (std::size_t j = 0; j < v.n_cols(); ++j) {
    if (!scope.empty() && !scope[j]) continue;
    const auto x = gather(v, j);
    double c, s;
    naive_moments(x, c, s);
    if (!(s > 0.0)) continue;
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i) g += (x[i] - c) / s * r[i];
    g /= static_cast<double>(n);
    ++out.checked;
    const double b = dense[j] * s;
    if (b == 0.0) {
      const double e = std::abs(g) - a * lam;
      out.zero_excess = std::max(out.zero_excess, e);
      if (e > tol) ++out.violations;
    } else {
      const double e = std::abs(g - a * lam * (b > 0 ? 1 : -1) - lam * (1 - a) * b);
      out.stationarity = std::max(out.stationarity, e);
      if (e > tol) ++out.violations;
    }
  }
  return out;
}

SynthData gen_synth(const SynthSpec& spec, const std::filesystem::path& prefix) {
  return generate(spec, [&](const ColumnFill& fill) {
    write_matrix(prefix, spec.n, spec.p, fill);
    return FileMatrix::attach(prefix.string() + ".desc");
  });
}

SynthData gen_synth_memory(const SynthSpec& spec) {
  return generate(spec, [&](const ColumnFill& fill) {
    std::vector<double> data(spec.n * spec.p);
    for (std::size_t j = 0; j < spec.p; ++j)
      fill(j, std::span<double>(data.data() + j * spec.n, spec.n));
    return FileMatrix::from_memory(spec.n, spec.p, std::move(data));
  });
}

std::vector<BenchRow> screen_bench(const MatrixView& v, std::span<const double> y,
                                   const FitConfig& base, std::span<const ScreenPolicy> policies,
                                   std::size_t repeats) {
  if (repeats == 0) throw RangeError("repeats must be positive");
  std::vector<BenchRow> rows(policies.size());
  for (std::size_t r = 0; r < repeats; ++r) {
    for (std::size_t t = 0; t < policies.size(); ++t) {
      FitConfig cfg = base;
      cfg.screen = policies[t];
      cfg.diagnostics = false;
      const auto t0 = std::chrono::steady_clock::now();
      const PathFit f = fit(v, y, cfg);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      auto& row = rows[t];
      row.policy = f.policy;
      row.run_seconds.push_back(secs);
      if (r == 0) {
        row.cols_scanned = f.cols_scanned;
        for (auto c : f.cols_scanned) row.total_scanned += c;
        for (auto c : f.n_kkt_rounds) row.total_kkt_rounds += c;
      }
    }
  }
  for (auto& row : rows) {
    std::vector<double> s = row.run_seconds;
    std::sort(s.begin(), s.end());
    row.seconds = quantile(s, 0.5);
  }
  return rows;
}

std::string bench_csv(std::span<const BenchRow> rows) {
  std::string out = "policy,median_seconds,total_cols_scanned,total_kkt_rounds,speedup_vs_first\n";
  char buf[160];
  for (const auto& r : rows) {
    const double speedup = rows.empty() || r.seconds <= 0 ? 0.0 : rows.front().seconds / r.seconds;
    std::snprintf(buf, sizeof buf, "%s,%.6f,%zu,%zu,%.3f\n",
                  std::string(to_string(r.policy)).c_str(), r.seconds, r.total_scanned,
                  r.total_kkt_rounds, speedup);
    out += buf;
  }
  return out;
}

std::string bench_scan_csv(const PathFit& ref_grid, std::span<const BenchRow> rows) {
  std::string out = "lambda_index,lambda_ratio";
  for (const auto& r : rows) out += "," + std::string(to_string(r.policy)) + "_scanned";
  out += "\n";
  char buf[64];
  for (std::size_t k = 0; k < ref_grid.n_lambda(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.6g", k, ref_grid.lambda[k] / ref_grid.lambda_max);
    out += buf;
    for (const auto& r : rows)
      out += "," + (k < r.cols_scanned.size() ? std::to_string(r.cols_scanned[k]) : "");
    out += "\n";
  }
  return out;
}

std::string rd_csv(const PathFit& fit, const RdReport& report) {
  std::string out = "lambda,rd\n";
  char buf[80];
  for (std::size_t k = 0; k < report.rd.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.10g,%.6e\n", fit.lambda[k], report.rd[k]);
    out += buf;
  }
  return out;
}

std::string summary6_text(const Summary6& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%12s %12s %12s %12s %12s %12s\n%12.3e %12.3e %12.3e %12.3e %12.3e %12.3e\n",
                "Minimum", "1st Qu.", "Median", "Mean", "3rd Qu.", "Maximum", s.min, s.q1,
                s.median, s.mean, s.q3, s.max);
  return buf;
}

}  // namespace oocl
