#pragma once

// Cell-wise standardization. Every quantity involving the standardized
// matrix X~ (x~_ij = (x_ij - c_j) / s_j) is computed from raw column sums
// and the per-column (c_j, s_j); X~ itself is never formed.
//
// Scale convention: s_j = sqrt(sum_i (x_ij - c_j)^2 / n) (population, divide
// by n), so that x~_j^T x~_j = n for every varying column. Users comparing
// against tools that standardize with the sample SD will see lambda paths
// scaled by sqrt((n-1)/n).
//
// Batch kernels come in two flavours: the OpenMP version here, and a plain
// loop in namespace oocl::serial kept as the reference. Each column is
// reduced by one thread in a fixed order, so both produce identical bits.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "oocl/bigmat.hpp"

namespace oocl {

struct ColumnStats {
  std::size_t n = 0;
  std::vector<double> center;
  std::vector<double> scale;
  /// 1 when scale > 0. Columns with zero variance keep a zero coefficient.
  std::vector<std::uint8_t> active;
  /// x~_j^T y for every active column (filled by fill_xty).
  std::vector<double> xty;
  /// x~_j^T x~_* against the column attaining lambda_max (fill_xtx_star).
  std::vector<double> xtx_star;
  std::size_t star = 0;

  std::size_t p() const noexcept { return center.size(); }
  std::size_t n_active() const noexcept;
};

/// Residual vector on a view together with its cached sum. The sum is
/// updated from the same increments applied to r, never recomputed.
struct ResidualState {
  std::vector<double> r;
  double r_sum = 0.0;

  void assign(std::span<const double> values);
  /// r -= delta * x~_j, keeping r_sum in step.
  void subtract_column(const MatrixView& v, const ColumnStats& st, std::size_t j, double delta);
  /// r -= delta (every entry).
  void subtract_constant(double delta);
};

/// Mean and population scale of column j over the view.
void column_moments(const MatrixView& v, std::size_t j, double& center, double& scale);

/// c, s and active flags. Throws RangeError when the view has fewer than two
/// rows.
ColumnStats compute_column_stats(const MatrixView& v, int workers = 1);

/// sum_i x_ij w_i over the view's rows.
double raw_dot(const MatrixView& v, std::size_t j, std::span<const double> w);
/// Same, with compensated (Neumaier) summation.
double raw_dot_compensated(const MatrixView& v, std::size_t j, std::span<const double> w);
/// sum_i x_ij x_ik over the view's rows, compensated.
double raw_cross_compensated(const MatrixView& v, std::size_t j, std::size_t k);

/// x~_j^T x~_k = (raw_dot - n c_j c_k) / (s_j s_k). Throws RangeError for an
/// inactive column.
double std_dot_xx(const ColumnStats& st, std::size_t j, std::size_t k, double raw_dot,
                  std::size_t n);
/// x~_j^T y = (sum_i x_ij y_i - c_j sum_i y_i) / s_j.
double std_dot_xy(const MatrixView& v, const ColumnStats& st, std::size_t j,
                  std::span<const double> y, double y_sum);
/// x~_j^T r = (sum_i x_ij r_i - c_j r_sum) / s_j, using the cached r_sum.
double std_dot_xr(const MatrixView& v, const ColumnStats& st, std::size_t j,
                  const ResidualState& res);

/// Compensated x~_j^T y for every active column, stored in st.xty.
void fill_xty(const MatrixView& v, ColumnStats& st, std::span<const double> y, int workers = 1);
/// Compensated x~_j^T x~_star for every active column, stored in st.xtx_star.
void fill_xtx_star(const MatrixView& v, ColumnStats& st, std::size_t star, int workers = 1);

/// out[j] = x~_j^T r / n for each j in cols. Entries outside cols untouched.
void scan_xr(const MatrixView& v, const ColumnStats& st, std::span<const std::size_t> cols,
             const ResidualState& res, std::span<double> out, int workers = 1);

/// Weighted column moments used by the binomial solver. For each j in cols:
///   xw[j] = sum_i w_i x~_ij,  xxw[j] = sum_i w_i x~_ij^2.
void weighted_moments(const MatrixView& v, const ColumnStats& st,
                      std::span<const std::size_t> cols, std::span<const double> w,
                      std::span<double> xw, std::span<double> xxw, int workers = 1);

namespace serial {

ColumnStats compute_column_stats(const MatrixView& v);
void fill_xty(const MatrixView& v, ColumnStats& st, std::span<const double> y);
void fill_xtx_star(const MatrixView& v, ColumnStats& st, std::size_t star);
void scan_xr(const MatrixView& v, const ColumnStats& st, std::span<const std::size_t> cols,
             const ResidualState& res, std::span<double> out);
void weighted_moments(const MatrixView& v, const ColumnStats& st,
                      std::span<const std::size_t> cols, std::span<const double> w,
                      std::span<double> xw, std::span<double> xxw);

}  // namespace serial

}  // namespace oocl
