// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Optional arguments select criteria by number (default: all).

#include <malloc.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <new>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oocl/cv.hpp"
#include "oocl/oracle.hpp"
#include "oocl/solver.hpp"
#include "support.hpp"

// ---------------------------------------------------------------------------
// Allocation accounting. Every operator new/delete in the process goes
// through these counters.

namespace {

std::atomic<long long> g_live{0};
std::atomic<long long> g_peak{0};
std::atomic<std::size_t> g_largest{0};

void note_alloc(void* p) {
  if (!p) return;
  const auto size = static_cast<long long>(malloc_usable_size(p));
  const long long now = g_live.fetch_add(size, std::memory_order_relaxed) + size;
  long long peak = g_peak.load(std::memory_order_relaxed);
  while (now > peak && !g_peak.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
  }
  std::size_t big = g_largest.load(std::memory_order_relaxed);
  const auto usize = static_cast<std::size_t>(size);
  while (usize > big && !g_largest.compare_exchange_weak(big, usize, std::memory_order_relaxed)) {
  }
}

void* counted_alloc(std::size_t n) {
  void* p = std::malloc(n == 0 ? 1 : n);
  if (!p) throw std::bad_alloc();
  note_alloc(p);
  return p;
}

void counted_free(void* p) noexcept {
  if (!p) return;
  g_live.fetch_sub(static_cast<long long>(malloc_usable_size(p)), std::memory_order_relaxed);
  std::free(p);
}

void reset_peak() {
  g_peak.store(g_live.load());
  g_largest.store(0);
}

}  // namespace

void* operator new(std::size_t n) { return counted_alloc(n); }
void* operator new[](std::size_t n) { return counted_alloc(n); }
void* operator new(std::size_t n, const std::nothrow_t&) noexcept {
  try {
    return counted_alloc(n);
  } catch (...) {
    return nullptr;
  }
}
void* operator new[](std::size_t n, const std::nothrow_t&) noexcept {
  try {
    return counted_alloc(n);
  } catch (...) {
    return nullptr;
  }
}
void operator delete(void* p) noexcept { counted_free(p); }
void operator delete[](void* p) noexcept { counted_free(p); }
void operator delete(void* p, std::size_t) noexcept { counted_free(p); }
void operator delete[](void* p, std::size_t) noexcept { counted_free(p); }

// ---------------------------------------------------------------------------

using namespace oocl;
using testing::TempDir;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SynthData synth(std::uint64_t seed, std::size_t n, std::size_t p, Family family,
                std::size_t n_true = 20, double noise = 0.1) {
  SynthSpec spec;
  spec.n = n;
  spec.p = p;
  spec.n_true = std::min(n_true, p);
  spec.family = family;
  spec.seed = seed;
  spec.noise = noise;
  return gen_synth_memory(spec);
}

/// Correctly rounded mean.
double exact_mean(std::span<const double> y) {
  long double s = 0;
  for (double t : y) s += t;
  return static_cast<double>(s) / static_cast<double>(y.size());
}

/// BEDPP cache rebuilt outside the solver from the same data.
struct SafeRule {
  ColumnStats st;
  BedppCache cache;
};

SafeRule safe_rule(const MatrixView& v, std::span<const double> y) {
  SafeRule s;
  s.st = compute_column_stats(v);
  const double lmax = lambda_max(v, y, s.st, 1.0);
  fill_xtx_star(v, s.st, s.st.star);
  const double ybar = exact_mean(y);
  double ss = 0;
  for (double t : y) ss += (t - ybar) * (t - ybar);
  s.cache = make_bedpp_cache(s.st, ss, lmax, Family::gaussian, 1.0);
  return s;
}

// 1 -------------------------------------------------------------------------
Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_g = 0, worst_b = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const SynthData d = synth(seed, 50, 200, Family::gaussian);
    const MatrixView v(d.x);
    FitConfig cfg;
    const PathFit f = fit(v, d.y, cfg);
    FitConfig rc = cfg;
    rc.lambda = f.lambda;
    worst_g = std::max(worst_g, rd(f, reference_fit(v, d.y, rc), v, d.y).max_abs);
  }
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SynthData d = synth(seed, 100, 150, Family::binomial);
    const MatrixView v(d.x);
    FitConfig cfg;
    cfg.family = Family::binomial;
    const PathFit f = fit(v, d.y, cfg);
    FitConfig rc = cfg;
    rc.lambda = f.lambda;
    worst_b = std::max(worst_b, rd(f, reference_fit(v, d.y, rc), v, d.y).max_abs);
  }
  const double secs = seconds_since(t0);
  return {worst_g <= 1e-6 && worst_b <= 1e-5 && secs <= 300,
          fmt("max|RD| gaussian %.2e (<=1e-6), binomial %.2e (<=1e-5), %.0f s", worst_g,
              worst_b, secs)};
}

// 2 -------------------------------------------------------------------------
Outcome screening_safety() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::size_t violations = 0, nonzero_checked = 0, discarded_total = 0;
  for (std::uint64_t inst = 0; inst < 200; ++inst) {
    const std::size_t n = 20 + rng() % 81;   // 20..100
    const std::size_t p = 50 + rng() % 451;  // 50..500
    const std::size_t n_true = 1 + rng() % 20;
    const double noise = (inst % 3 == 0) ? 1.0 : 0.1;
    const SynthData d = synth(1000 + inst, n, p, Family::gaussian, n_true, noise);
    const MatrixView v(d.x);
    const SafeRule rule = safe_rule(v, d.y);
    FitConfig cfg;
    if (inst % 2) {
      cfg.spacing = LambdaSpacing::log;
      cfg.lambda_min_ratio = 0.01;
    }
    const PathFit ref = reference_fit(v, d.y, cfg);
    for (std::size_t k = 0; k < ref.n_lambda(); ++k) {
      const Mask safe = bedpp_filter(rule.cache, ref.lambda[k]);
      discarded_total += p - static_cast<std::size_t>(std::count(safe.begin(), safe.end(), 1));
      for (std::size_t j : ref.coefs.indices(k)) {
        ++nonzero_checked;
        if (!safe[j]) ++violations;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs <= 300,
          fmt("%zu violations over 200 instances (%zu nonzero coefficients checked, %zu "
              "discards), %.0f s",
              violations, nonzero_checked, discarded_total, secs)};
}

// 3 -------------------------------------------------------------------------
Outcome kkt_certification() {
  std::size_t fits = 0, audits = 0, violations = 0, full_scope_hybrid = 0;
  double worst_ratio = 0;  // largest KKT residual / (2 tol)
  auto audit_fit = [&](const PathFit& f, const MatrixView& v, std::span<const double> y,
                       const SafeRule* rule, bool full_scope) {
    ++fits;
    const double tol = 2 * f.kkt_tol;
    for (std::size_t k = 0; k < f.n_lambda(); ++k) {
      Mask scope;
      if (rule && !full_scope && f.policy == ScreenPolicy::hybrid) {
        Mask safe = bedpp_filter(rule->cache, std::min(f.lambda[k], f.lambda_max));
        // After the safe rule switches itself off the scope is every column.
        if (static_cast<std::size_t>(std::count(safe.begin(), safe.end(), 1)) == f.safe_size[k])
          scope = std::move(safe);
      }
      const KktAudit a = kkt_audit(f, k, v, y, tol, scope);
      ++audits;
      violations += a.violations;
      worst_ratio = std::max({worst_ratio, a.zero_excess / tol, a.stationarity / tol,
                              a.intercept / tol});
    }
  };

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SynthData d = synth(300 + seed, 60 + 4 * seed, 150 + 30 * seed, Family::gaussian);
    const MatrixView v(d.x);
    const SafeRule rule = safe_rule(v, d.y);
    for (ScreenPolicy pol :
         {ScreenPolicy::none, ScreenPolicy::ssr, ScreenPolicy::bedpp, ScreenPolicy::hybrid}) {
      FitConfig cfg;
      cfg.screen = pol;
      const PathFit f = fit(v, d.y, cfg);
      audit_fit(f, v, d.y, &rule, false);
      if (pol == ScreenPolicy::hybrid) {
        audit_fit(f, v, d.y, &rule, true);
        ++full_scope_hybrid;
      }
    }
    FitConfig en;
    en.alpha = 0.5;
    audit_fit(fit(v, d.y, en), v, d.y, nullptr, true);

    const SynthData b = synth(400 + seed, 80 + 4 * seed, 100 + 20 * seed, Family::binomial);
    const MatrixView vb(b.x);
    for (ScreenPolicy pol : {ScreenPolicy::none, ScreenPolicy::ssr}) {
      FitConfig cfg;
      cfg.family = Family::binomial;
      cfg.screen = pol;
      audit_fit(fit(vb, b.y, cfg), vb, b.y, nullptr, true);
    }
    FitConfig ben;
    ben.family = Family::binomial;
    ben.alpha = 0.7;
    audit_fit(fit(vb, b.y, ben), vb, b.y, nullptr, true);
  }
  return {violations == 0,
          fmt("%zu fits, %zu lambda audits, %zu violations at 2*tol (worst residual %.2f of "
              "bound); %zu hybrid fits also audited on full scope",
              fits, audits, violations, worst_ratio, full_scope_hybrid)};
}

// 4 -------------------------------------------------------------------------
Outcome rejection_profile() {
  const auto t0 = std::chrono::steady_clock::now();
  const SynthData d = synth(1, 1000, 5000, Family::gaussian);
  const MatrixView v(d.x);
  FitConfig cfg;
  cfg.screen = ScreenPolicy::hybrid;
  cfg.diagnostics = true;
  const PathFit hybrid = fit(v, d.y, cfg);
  cfg.screen = ScreenPolicy::ssr;
  cfg.diagnostics = false;
  const PathFit ssr = fit(v, d.y, cfg);
  const auto rows = rejection_stats(hybrid);

  double min_high = 100, max_low = 0, ssr_mean = 0;
  std::size_t n_high = 0, n_low = 0, scan_violations = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const RejectionRow& r = rows[k];
    if (r.lambda_ratio >= 0.95) min_high = std::min(min_high, r.pct_bedpp), ++n_high;
    if (r.lambda_ratio < 0.45) max_low = std::max(max_low, r.pct_bedpp), ++n_low;
    ssr_mean += r.pct_ssr;
    if (hybrid.cols_scanned[k] > ssr.cols_scanned[k]) ++scan_violations;
  }
  ssr_mean /= static_cast<double>(rows.size());
  const double secs = seconds_since(t0);
  const bool ok = n_high > 0 && n_low > 0 && min_high >= 90 && max_low <= 5 && ssr_mean >= 70 &&
                  scan_violations == 0 && secs <= 600;
  return {ok, fmt("BEDPP min %.1f%% at ratio>=0.95 (%zu pts), max %.1f%% at ratio<0.45 (%zu "
                  "pts); SSR mean %.1f%%; hybrid scans > SSR at %zu lambdas; %.0f s",
                  min_high, n_high, max_low, n_low, ssr_mean, scan_violations, secs)};
}

// 5 -------------------------------------------------------------------------
Outcome hybrid_speedup() {
  TempDir dir;
  SynthSpec spec;
  spec.n = 1000;
  spec.p = 20000;
  spec.seed = 1;
  const SynthData d = gen_synth(spec, dir / "case2");
  const MatrixView v(d.x);
  FitConfig cfg;
  cfg.lambda_min_ratio = 0.5;
  const ScreenPolicy pols[] = {ScreenPolicy::ssr, ScreenPolicy::hybrid};
  const auto rows = screen_bench(v, d.y, cfg, pols, 5);
  const double ratio = rows[0].seconds / rows[1].seconds;
  return {ratio >= 1.2, fmt("median of 5: SSR %.3f s, hybrid %.3f s, speedup %.2fx (>=1.2)",
                            rows[0].seconds, rows[1].seconds, ratio)};
}

// 6 -------------------------------------------------------------------------
Outcome out_of_core_equivalence() {
  TempDir dir;
  std::size_t compared = 0, differing = 0;
  for (Family fam : {Family::gaussian, Family::binomial}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      SynthSpec spec;
      spec.n = 120;
      spec.p = 400;
      spec.family = fam;
      spec.seed = seed;
      const std::string prefix = (dir / ("m" + std::to_string(seed))).string();
      const SynthData d = gen_synth(spec, prefix);
      std::vector<double> copy(spec.n * spec.p);
      const std::string bytes = testing::read_file(prefix + ".bin");
      std::memcpy(copy.data(), bytes.data(), bytes.size());
      const FileMatrix mem = FileMatrix::from_memory(spec.n, spec.p, std::move(copy));
      FitConfig cfg;
      cfg.family = fam;
      const PathFit a = fit(MatrixView(d.x), d.y, cfg);
      const PathFit b = fit(MatrixView(mem), d.y, cfg);
      write_path_fit(a, prefix + "-file");
      write_path_fit(b, prefix + "-mem");
      ++compared;
      if (testing::read_file(prefix + "-file.coef.csv") !=
              testing::read_file(prefix + "-mem.coef.csv") ||
          a.mask_digest != b.mask_digest)
        ++differing;
    }
  }
  return {differing == 0, fmt("%zu of %zu file-backed fits differ from in-memory fits in "
                               "serialized coefficients",
                               differing, compared)};
}

// 7 -------------------------------------------------------------------------
struct CvMemory {
  long long transient = 0;
  long long budget = 0;
  std::size_t largest = 0;
};

CvMemory measure_cv(const FileMatrix& x, std::span<const double> y, bool parallel) {
  FitConfig cfg;
  cfg.workers = parallel ? 4 : 1;
  CvConfig cvc;
  cvc.folds = 10;
  cvc.parallel_folds = parallel;
  const std::size_t concurrent = parallel ? 4 : 1;

  // Result storage: one fold PathFit per concurrent fold, measured by
  // refitting each training view on its own.
  const auto folds = make_folds(x.n_rows(), 10, cvc.seed);
  long long fold_result = 0;
  {
    FitConfig full = cfg;
    full.workers = 1;
    const PathFit grid = fit(MatrixView(x), y, full);
    full.lambda = grid.lambda;
    for (int f = 1; f <= 10; ++f) {
      std::vector<std::size_t> rows;
      std::vector<double> yt;
      for (std::size_t i = 0; i < x.n_rows(); ++i)
        if (folds[i] != f) rows.push_back(i), yt.push_back(y[i]);
      const MatrixView train = make_view(x, rows);
      const long long before = g_live.load();
      const PathFit pf = fit(train, yt, full);
      fold_result = std::max(fold_result, g_live.load() - before);
    }
  }

  const long long base = g_live.load();
  reset_peak();
  long long cv_result = 0;
  {
    const CvFit cv = cv_fit(x, y, cfg, cvc);
    cv_result = g_live.load() - base;
  }
  CvMemory m;
  m.transient = g_peak.load() - base - cv_result - static_cast<long long>(concurrent) * fold_result;
  m.budget = static_cast<long long>(concurrent * 10 * (x.n_rows() + x.n_cols()) * 8);
  m.largest = g_largest.load();
  return m;
}

Outcome no_copy_cv() {
  TempDir dir;
  SynthSpec spec;
  spec.n = 500;
  spec.p = 20000;
  spec.seed = 7;
  const SynthData d = gen_synth(spec, dir / "cvmat");
  const CvMemory serial = measure_cv(d.x, d.y, false);
  const CvMemory parallel = measure_cv(d.x, d.y, true);
  const auto np_bytes = static_cast<std::size_t>(spec.n * spec.p * 8);
  // No allocation may come anywhere near a matrix-sized (or even a
  // training-fold-sized) copy.
  const std::size_t cap = np_bytes / 10;
  const bool ok = serial.transient < serial.budget && parallel.transient < parallel.budget &&
                  serial.largest < cap && parallel.largest < cap;
  return {ok, fmt("transient %.0f KiB (budget %.0f KiB) serial, %.0f KiB (budget %.0f KiB) with "
                  "4 concurrent folds; largest single allocation %.0f KiB vs n*p %.0f KiB",
                  serial.transient / 1024.0, serial.budget / 1024.0,
                  parallel.transient / 1024.0, parallel.budget / 1024.0,
                  std::max(serial.largest, parallel.largest) / 1024.0, np_bytes / 1024.0)};
}

// 8 -------------------------------------------------------------------------
std::vector<std::vector<double>> csv_numbers(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);  // header
  while (std::getline(ss, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    int col = 0;
    while (std::getline(ls, cell, ',')) {
      if (col != 2) row.push_back(std::stod(cell));  // column 2 is the name
      ++col;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Outcome parallel_determinism() {
  TempDir dir;
  std::size_t mask_mismatch = 0, shape_mismatch = 0;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthSpec spec;
    spec.n = 100 + 10 * seed;
    spec.p = 300 + 50 * seed;
    spec.family = seed % 3 == 0 ? Family::binomial : Family::gaussian;
    spec.seed = seed;
    const std::string prefix = (dir / ("d" + std::to_string(seed))).string();
    const SynthData d = gen_synth(spec, prefix);
    std::string ys;
    for (double t : d.y) ys += fmt("%.17g\n", t);
    testing::write_file(prefix + ".y", ys);
    const std::string fam(to_string(spec.family));
    std::ostringstream sink;
    const int c1 = cli::run({"oocl", "fit", prefix + ".desc", prefix + ".y", "--family", fam,
                             "--ncores", "1", "--out", prefix + "-1"},
                            sink, sink);
    const int c4 = cli::run({"oocl", "fit", prefix + ".desc", prefix + ".y", "--family", fam,
                             "--ncores", "4", "--out", prefix + "-4"},
                            sink, sink);
    if (c1 != 0 || c4 != 0) return {false, "fit failed: " + sink.str()};
    const PathFit a = read_path_fit(prefix + "-1");
    const PathFit b = read_path_fit(prefix + "-4");
    if (a.mask_digest != b.mask_digest || a.safe_size != b.safe_size ||
        a.strong_size != b.strong_size)
      ++mask_mismatch;
    const auto ra = csv_numbers(testing::read_file(prefix + "-1.coef.csv"));
    const auto rb = csv_numbers(testing::read_file(prefix + "-4.coef.csv"));
    if (ra.size() != rb.size()) {
      ++shape_mismatch;
      continue;
    }
    for (std::size_t i = 0; i < ra.size(); ++i) {
      if (ra[i].size() != rb[i].size() || ra[i][1] != rb[i][1]) {
        ++shape_mismatch;
        break;
      }
      for (std::size_t c = 0; c < ra[i].size(); ++c)
        worst = std::max(worst, std::abs(ra[i][c] - rb[i][c]));
    }
  }
  return {mask_mismatch == 0 && shape_mismatch == 0 && worst <= 1e-12,
          fmt("10 instances: %zu mask mismatches, %zu support mismatches, max entry difference "
              "%.1e",
              mask_mismatch, shape_mismatch, worst)};
}

// 9 -------------------------------------------------------------------------
Outcome null_anchor() {
  std::size_t fits = 0, failures = 0;
  auto check = [&](const PathFit& f, std::span<const double> y) {
    ++fits;
    const double ybar = exact_mean(y);
    const double want =
        f.family == Family::gaussian ? ybar : std::log(ybar / (1.0 - ybar));
    if (f.lambda[0] != f.lambda_max || f.coefs.nnz(0) != 0 || f.intercept[0] != want) {
      ++failures;
      if (std::getenv("OOCL_VERBOSE"))
        std::fprintf(stderr, "%s alpha %g policy %s nnz %zu intercept %.17g want %.17g\n",
                     std::string(to_string(f.family)).c_str(), f.alpha,
                     std::string(to_string(f.policy)).c_str(), f.coefs.nnz(0), f.intercept[0],
                     want);
    }
  };
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SynthData g = synth(seed, 40 + seed, 100, Family::gaussian);
    const MatrixView vg(g.x);
    for (ScreenPolicy pol :
         {ScreenPolicy::none, ScreenPolicy::ssr, ScreenPolicy::bedpp, ScreenPolicy::hybrid}) {
      FitConfig cfg;
      cfg.screen = pol;
      check(fit(vg, g.y, cfg), g.y);
    }
    FitConfig en;
    en.alpha = 0.3;
    en.spacing = LambdaSpacing::log;
    check(fit(vg, g.y, en), g.y);

    const SynthData b = synth(seed, 60 + seed, 80, Family::binomial);
    const MatrixView vb(b.x);
    for (double alpha : {1.0, 0.5}) {
      FitConfig cfg;
      cfg.family = Family::binomial;
      cfg.alpha = alpha;
      check(fit(vb, b.y, cfg), b.y);
      cfg.majorize = true;
      check(fit(vb, b.y, cfg), b.y);
    }
  }
  return {failures == 0, fmt("%zu of %zu fits break the null anchor", failures, fits)};
}

// 10 ------------------------------------------------------------------------
Outcome standardization_identities() {
  std::mt19937_64 rng(10);
  double worst[3] = {0, 0, 0};
  auto rel = [](double got, double want, double magnitude) {
    return std::abs(got - want) / std::max(magnitude, 1e-300);
  };
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t n = 5 + rng() % 16, p = 1 + rng() % 10;
    const auto x = testing::random_matrix(n, p, rng);
    const auto y = testing::random_vector(n, rng);
    const auto r = testing::random_vector(n, rng);
    const MatrixView v(FileMatrix::from_memory(n, p, x));
    const ColumnStats st = compute_column_stats(v);
    ResidualState res;
    res.assign(r);
    const double y_sum = std::accumulate(y.begin(), y.end(), 0.0);

    std::vector<std::vector<double>> xs(p);
    for (std::size_t j = 0; j < p; ++j) {
      double c = 0, ss = 0;
      for (std::size_t i = 0; i < n; ++i) c += x[j * n + i];
      c /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) ss += (x[j * n + i] - c) * (x[j * n + i] - c);
      const double sd = std::sqrt(ss / static_cast<double>(n));
      if (!(sd > 0)) continue;
      xs[j].resize(n);
      for (std::size_t i = 0; i < n; ++i) xs[j][i] = (x[j * n + i] - c) / sd;
    }
    auto naive = [&](const std::vector<double>& a, std::span<const double> b, double& mag) {
      double s = 0;
      mag = 0;
      for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i], mag += std::abs(a[i] * b[i]);
      return s;
    };
    for (std::size_t j = 0; j < p; ++j) {
      if (xs[j].empty() || !st.active[j]) continue;
      double mag;
      double want = naive(xs[j], y, mag);
      worst[1] = std::max(worst[1], rel(std_dot_xy(v, st, j, y, y_sum), want, mag));
      want = naive(xs[j], r, mag);
      worst[2] = std::max(worst[2], rel(std_dot_xr(v, st, j, res), want, mag));
      for (std::size_t k = 0; k < p; ++k) {
        if (xs[k].empty() || !st.active[k]) continue;
        want = naive(xs[j], xs[k], mag);
        const double got = std_dot_xx(st, j, k, raw_cross_compensated(v, j, k), n);
        worst[0] = std::max(worst[0], rel(got, want, mag));
      }
    }
  }
  const double w = std::max({worst[0], worst[1], worst[2]});
  return {w <= 1e-12,
          fmt("1000 instances, worst relative error: x~'x~ %.1e, x~'y %.1e, x~'r %.1e", worst[0],
              worst[1], worst[2])};
}


}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "oracle equivalence", oracle_equivalence},
      {2, "screening safety", screening_safety},
      {3, "KKT certification", kkt_certification},
      {4, "rejection profile", rejection_profile},
      {5, "hybrid speedup", hybrid_speedup},
      {6, "out-of-core equivalence", out_of_core_equivalence},
      {7, "no-copy cross-validation", no_copy_cv},
      {8, "parallel determinism", parallel_determinism},
      {9, "null-model anchor", null_anchor},
      {10, "standardization identities", standardization_identities},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
