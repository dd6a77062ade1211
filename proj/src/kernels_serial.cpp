// Serial reference versions of the batch kernels. Same per-column bodies as
// the OpenMP versions, plain loops around them.

#include <string>

#include "kernels_detail.hpp"
#include "oocl/error.hpp"

namespace oocl::serial {

ColumnStats compute_column_stats(const MatrixView& v) {
  const std::size_t n = v.n_rows();
  if (n < 2) throw RangeError("column stats need at least 2 rows, view has " + std::to_string(n));
  ColumnStats st;
  st.n = n;
  st.center.resize(v.n_cols());
  st.scale.resize(v.n_cols());
  st.active.resize(v.n_cols());
  for (std::size_t j = 0; j < v.n_cols(); ++j) {
    column_moments(v, j, st.center[j], st.scale[j]);
    st.active[j] = st.scale[j] > 0.0;
  }
  return st;
}

void fill_xty(const MatrixView& v, ColumnStats& st, std::span<const double> y) {
  const double y_sum = detail::y_sum_of(y);
  st.xty.assign(st.p(), 0.0);
  for (std::size_t j = 0; j < st.p(); ++j)
    if (st.active[j]) st.xty[j] = detail::xty_one(v, st, j, y, y_sum);
}

void fill_xtx_star(const MatrixView& v, ColumnStats& st, std::size_t star) {
  if (star >= st.p() || !st.active[star]) throw RangeError("star column is inactive");
  st.star = star;
  st.xtx_star.assign(st.p(), 0.0);
  for (std::size_t j = 0; j < st.p(); ++j)
    if (st.active[j]) st.xtx_star[j] = detail::xtx_star_one(v, st, j, star);
}

void scan_xr(const MatrixView& v, const ColumnStats& st, std::span<const std::size_t> cols,
             const ResidualState& res, std::span<double> out) {
  const double inv_n = 1.0 / static_cast<double>(st.n);
  for (std::size_t j : cols)
    out[j] = (raw_dot(v, j, res.r) - st.center[j] * res.r_sum) / st.scale[j] * inv_n;
}

void weighted_moments(const MatrixView& v, const ColumnStats& st,
                      std::span<const std::size_t> cols, std::span<const double> w,
                      std::span<double> xw, std::span<double> xxw) {
  for (std::size_t j : cols) detail::weighted_one(v, st, j, w, xw[j], xxw[j]);
}

}  // namespace oocl::serial
