#include <omp.h>

#include <algorithm>
#include <vector>

#include "ravflow/kernels.hpp"

namespace ravflow::kernels {

namespace {

// Sums `block_sum(begin, end)` over fixed blocks, partials added in order.
template <typename BlockSum>
double blocked_reduce(std::size_t n, BlockSum&& block_sum) {
  const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(nblocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t end = std::min(n, begin + kReductionBlock);
    partial[static_cast<std::size_t>(b)] = block_sum(begin, end);
  }
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum;
}

}  // namespace

namespace omp {

void theta_update(std::span<const cplx> prev, std::span<const cplx> nl,
                  std::span<const double> g, std::span<const double> a,
                  double theta, double dt, std::span<cplx> out) {
  const auto n = static_cast<std::ptrdiff_t>(prev.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const double dg = dt * g[k];
    out[k] = prev[k] + dg * (a[k] * prev[k] + nl[k]) / (1.0 - theta * dg * a[k]);
  }
}

void modal_potential(std::span<const cplx> next, std::span<const cplx> prev,
                     std::span<const cplx> nl, std::span<const double> a,
                     double theta, std::span<cplx> out) {
  const auto n = static_cast<std::ptrdiff_t>(next.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[k] = a[k] * (theta * next[k] + (1.0 - theta) * prev[k]) + nl[k];
  }
}

double weighted_modal_inner(std::span<const cplx> u, std::span<const cplx> v,
                            std::span<const double> w) {
  return blocked_reduce(u.size(), [&](std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      s += w[k] * (u[k].real() * v[k].real() + u[k].imag() * v[k].imag());
    }
    return s;
  });
}

double dot(std::span<const double> f, std::span<const double> g) {
  return blocked_reduce(f.size(), [&](std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t k = begin; k < end; ++k) s += f[k] * g[k];
    return s;
  });
}

void axpby(double alpha, std::span<const double> x, double beta,
           std::span<const double> y, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = alpha * x[k] + beta * y[k];
}

}  // namespace omp

void set_thread_limit(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace ravflow::kernels
