#pragma once

// Per-column kernel bodies shared by the OpenMP and serial batch kernels.

#include <span>

#include "oocl/kernels.hpp"

namespace oocl::detail {

double xty_one(const MatrixView& v, const ColumnStats& st, std::size_t j,
               std::span<const double> y, double y_sum);
double xtx_star_one(const MatrixView& v, const ColumnStats& st, std::size_t j, std::size_t star);
void weighted_one(const MatrixView& v, const ColumnStats& st, std::size_t j,
                  std::span<const double> w, double& xw, double& xxw);
double y_sum_of(std::span<const double> y);

}  // namespace oocl::detail
