#include "oocl/kernels.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "kernels_detail.hpp"
#include "oocl/error.hpp"

namespace oocl {

namespace {

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Plain dot with four partial sums. The association order is fixed, so the
// result does not depend on which thread runs it.
double dot_contiguous(const double* x, const double* w, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * w[i];
    s1 += x[i + 1] * w[i + 1];
    s2 += x[i + 2] * w[i + 2];
    s3 += x[i + 3] * w[i + 3];
  }
  for (; i < n; ++i) s0 += x[i] * w[i];
  return (s0 + s1) + (s2 + s3);
}

double dot_gathered(const double* x, std::span<const std::size_t> rows, const double* w) {
  const std::size_t n = rows.size();
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[rows[i]] * w[i];
    s1 += x[rows[i + 1]] * w[i + 1];
    s2 += x[rows[i + 2]] * w[i + 2];
    s3 += x[rows[i + 3]] * w[i + 3];
  }
  for (; i < n; ++i) s0 += x[rows[i]] * w[i];
  return (s0 + s1) + (s2 + s3);
}

void require_active(const ColumnStats& st, std::size_t j) {
  if (j >= st.p() || !st.active[j])
    throw RangeError("column " + std::to_string(j) + " is inactive (zero variance)");
}

}  // namespace

std::size_t ColumnStats::n_active() const noexcept {
  std::size_t k = 0;
  for (auto a : active) k += a;
  return k;
}

void ResidualState::assign(std::span<const double> values) {
  r.assign(values.begin(), values.end());
  CompensatedSum s;
  for (double x : r) s.add(x);
  r_sum = s.value();
}

void ResidualState::subtract_column(const MatrixView& v, const ColumnStats& st, std::size_t j,
                                    double delta) {
  const double c = st.center[j];
  const double scaled = delta / st.scale[j];
  double change = 0.0;
  v.with_column(j, [&](const double* x, std::span<const std::size_t> rows) {
    const std::size_t n = r.size();
    if (rows.empty()) {
      for (std::size_t i = 0; i < n; ++i) {
        const double d = scaled * (x[i] - c);
        r[i] -= d;
        change += d;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double d = scaled * (x[rows[i]] - c);
        r[i] -= d;
        change += d;
      }
    }
  });
  r_sum -= change;
}

void ResidualState::subtract_constant(double delta) {
  for (double& x : r) x -= delta;
  r_sum -= delta * static_cast<double>(r.size());
}

void column_moments(const MatrixView& v, std::size_t j, double& center, double& scale) {
  const std::size_t n = v.n_rows();
  v.with_column(j, [&](const double* x, std::span<const std::size_t> rows) {
    double sum = 0.0;
    if (rows.empty()) {
      for (std::size_t i = 0; i < n; ++i) sum += x[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) sum += x[rows[i]];
    }
    const double c = sum / static_cast<double>(n);
    double ss = 0.0;
    if (rows.empty()) {
      for (std::size_t i = 0; i < n; ++i) ss += (x[i] - c) * (x[i] - c);
    } else {
      for (std::size_t i = 0; i < n; ++i) ss += (x[rows[i]] - c) * (x[rows[i]] - c);
    }
    center = c;
    scale = std::sqrt(ss / static_cast<double>(n));
  });
}

ColumnStats compute_column_stats(const MatrixView& v, int workers) {
  const std::size_t n = v.n_rows();
  if (n < 2) throw RangeError("column stats need at least 2 rows, view has " + std::to_string(n));
  const std::size_t p = v.n_cols();
  ColumnStats st;
  st.n = n;
  st.center.resize(p);
  st.scale.resize(p);
  st.active.resize(p);
  const auto pp = static_cast<std::ptrdiff_t>(p);
#pragma omp parallel for schedule(static) num_threads(workers) if (workers > 1)
  for (std::ptrdiff_t j = 0; j < pp; ++j) {
    column_moments(v, j, st.center[j], st.scale[j]);
    st.active[j] = st.scale[j] > 0.0;
  }
  return st;
}

double raw_dot(const MatrixView& v, std::size_t j, std::span<const double> w) {
  return v.with_column(j, [&](const double* x, std::span<const std::size_t> rows) {
    return rows.empty() ? dot_contiguous(x, w.data(), w.size()) : dot_gathered(x, rows, w.data());
  });
}

double raw_dot_compensated(const MatrixView& v, std::size_t j, std::span<const double> w) {
  return v.with_column(j, [&](const double* x, std::span<const std::size_t> rows) {
    CompensatedSum s;
    const std::size_t n = w.size();
    if (rows.empty()) {
      for (std::size_t i = 0; i < n; ++i) s.add(x[i] * w[i]);
    } else {
      for (std::size_t i = 0; i < n; ++i) s.add(x[rows[i]] * w[i]);
    }
    return s.value();
  });
}

double raw_cross_compensated(const MatrixView& v, std::size_t j, std::size_t k) {
  const double* xk = v.matrix().column(k).data();
  return v.with_column(j, [&](const double* xj, std::span<const std::size_t> rows) {
    CompensatedSum s;
    const std::size_t n = v.n_rows();
    if (rows.empty()) {
      for (std::size_t i = 0; i < n; ++i) s.add(xj[i] * xk[i]);
    } else {
      for (std::size_t i = 0; i < n; ++i) s.add(xj[rows[i]] * xk[rows[i]]);
    }
    return s.value();
  });
}

double std_dot_xx(const ColumnStats& st, std::size_t j, std::size_t k, double raw, std::size_t n) {
  require_active(st, j);
  require_active(st, k);
  return (raw - static_cast<double>(n) * st.center[j] * st.center[k]) /
         (st.scale[j] * st.scale[k]);
}

double std_dot_xy(const MatrixView& v, const ColumnStats& st, std::size_t j,
                  std::span<const double> y, double y_sum) {
  require_active(st, j);
  return (raw_dot(v, j, y) - st.center[j] * y_sum) / st.scale[j];
}

double std_dot_xr(const MatrixView& v, const ColumnStats& st, std::size_t j,
                  const ResidualState& res) {
  require_active(st, j);
  return (raw_dot(v, j, res.r) - st.center[j] * res.r_sum) / st.scale[j];
}

namespace detail {

// Per-column bodies shared by the OpenMP and serial batch kernels.

double xty_one(const MatrixView& v, const ColumnStats& st, std::size_t j,
               std::span<const double> y, double y_sum) {
  return (raw_dot_compensated(v, j, y) - st.center[j] * y_sum) / st.scale[j];
}

double xtx_star_one(const MatrixView& v, const ColumnStats& st, std::size_t j, std::size_t star) {
  if (j == star) return static_cast<double>(st.n);
  const double raw = raw_cross_compensated(v, j, star);
  return (raw - static_cast<double>(st.n) * st.center[j] * st.center[star]) /
         (st.scale[j] * st.scale[star]);
}

void weighted_one(const MatrixView& v, const ColumnStats& st, std::size_t j,
                  std::span<const double> w, double& xw, double& xxw) {
  const double c = st.center[j];
  const double s = st.scale[j];
  const std::size_t n = w.size();
  double a = 0.0, b = 0.0;
  v.with_column(j, [&](const double* x, std::span<const std::size_t> rows) {
    if (rows.empty()) {
      for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - c;
        a += w[i] * d;
        b += w[i] * d * d;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double d = x[rows[i]] - c;
        a += w[i] * d;
        b += w[i] * d * d;
      }
    }
  });
  xw = a / s;
  xxw = b / (s * s);
}

double y_sum_of(std::span<const double> y) {
  CompensatedSum s;
  for (double x : y) s.add(x);
  return s.value();
}

}  // namespace detail

void fill_xty(const MatrixView& v, ColumnStats& st, std::span<const double> y, int workers) {
  const double y_sum = detail::y_sum_of(y);
  st.xty.assign(st.p(), 0.0);
  const auto pp = static_cast<std::ptrdiff_t>(st.p());
#pragma omp parallel for schedule(static) num_threads(workers) if (workers > 1)
  for (std::ptrdiff_t j = 0; j < pp; ++j) {
    if (st.active[j]) st.xty[j] = detail::xty_one(v, st, j, y, y_sum);
  }
}

void fill_xtx_star(const MatrixView& v, ColumnStats& st, std::size_t star, int workers) {
  require_active(st, star);
  st.star = star;
  st.xtx_star.assign(st.p(), 0.0);
  const auto pp = static_cast<std::ptrdiff_t>(st.p());
#pragma omp parallel for schedule(static) num_threads(workers) if (workers > 1)
  for (std::ptrdiff_t j = 0; j < pp; ++j) {
    if (st.active[j]) st.xtx_star[j] = detail::xtx_star_one(v, st, j, star);
  }
}

void scan_xr(const MatrixView& v, const ColumnStats& st, std::span<const std::size_t> cols,
             const ResidualState& res, std::span<double> out, int workers) {
  const double inv_n = 1.0 / static_cast<double>(st.n);
  const auto m = static_cast<std::ptrdiff_t>(cols.size());
#pragma omp parallel for schedule(static) num_threads(workers) if (workers > 1)
  for (std::ptrdiff_t t = 0; t < m; ++t) {
    const std::size_t j = cols[t];
    out[j] = (raw_dot(v, j, res.r) - st.center[j] * res.r_sum) / st.scale[j] * inv_n;
  }
}

void weighted_moments(const MatrixView& v, const ColumnStats& st,
                      std::span<const std::size_t> cols, std::span<const double> w,
                      std::span<double> xw, std::span<double> xxw, int workers) {
  const auto m = static_cast<std::ptrdiff_t>(cols.size());
#pragma omp parallel for schedule(static) num_threads(workers) if (workers > 1)
  for (std::ptrdiff_t t = 0; t < m; ++t) {
    const std::size_t j = cols[t];
    detail::weighted_one(v, st, j, w, xw[j], xxw[j]);
  }
}

}  // namespace oocl
