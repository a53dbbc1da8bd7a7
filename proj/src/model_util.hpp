#pragma once

#include "ravflow/grid.hpp"
#include "ravflow/kernels.hpp"

namespace ravflow::detail {

/// Rectangle-rule integral hx hy sum_k density(k), deterministic in the
/// thread count.
template <typename F>
double integrate(const Grid2D& grid, F&& density) {
  return grid.cell_area() * kernels::parallel_sum(grid.size(), std::forward<F>(density));
}

}  // namespace ravflow::detail
