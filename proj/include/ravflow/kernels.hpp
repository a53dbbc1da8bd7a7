#pragma once

// Data-parallel inner loops shared by the integrators.
//
// Every kernel exists twice: `serial::` is the plain reference loop kept for
// testing, `omp::` is the OpenMP version used by the library. Element-wise
// kernels are bitwise identical between the two. Reductions in `omp::` sum
// fixed-size blocks and then add the block partials in order, so the result
// does not depend on the thread count (it may differ from `serial::` in the
// last bits).

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace ravflow::kernels {

using cplx = std::complex<double>;

/// Block length used by the deterministic reductions.
inline constexpr std::size_t kReductionBlock = 2048;

namespace serial {

// out[k] = prev[k] + dt g[k] (a[k] prev[k] + nl[k]) / (1 - theta dt g[k] a[k])
//
// theta = 1/2 is the midpoint rule, theta = 1 backward Euler. Modes with
// g[k] == 0 return prev[k] unchanged.
void theta_update(std::span<const cplx> prev, std::span<const cplx> nl,
                  std::span<const double> g, std::span<const double> a,
                  double theta, double dt, std::span<cplx> out);

// out[k] = a[k] (theta next[k] + (1 - theta) prev[k]) + nl[k]
void modal_potential(std::span<const cplx> next, std::span<const cplx> prev,
                     std::span<const cplx> nl, std::span<const double> a,
                     double theta, std::span<cplx> out);

// sum_k w[k] Re(conj(u[k]) v[k])
double weighted_modal_inner(std::span<const cplx> u, std::span<const cplx> v,
                            std::span<const double> w);

// sum_k f[k] g[k]
double dot(std::span<const double> f, std::span<const double> g);

// out[k] = alpha x[k] + beta y[k]
void axpby(double alpha, std::span<const double> x, double beta,
           std::span<const double> y, std::span<double> out);

}  // namespace serial

namespace omp {

void theta_update(std::span<const cplx> prev, std::span<const cplx> nl,
                  std::span<const double> g, std::span<const double> a,
                  double theta, double dt, std::span<cplx> out);

void modal_potential(std::span<const cplx> next, std::span<const cplx> prev,
                     std::span<const cplx> nl, std::span<const double> a,
                     double theta, std::span<cplx> out);

double weighted_modal_inner(std::span<const cplx> u, std::span<const cplx> v,
                            std::span<const double> w);

double dot(std::span<const double> f, std::span<const double> g);

void axpby(double alpha, std::span<const double> x, double beta,
           std::span<const double> y, std::span<double> out);

}  // namespace omp

/// Caps the OpenMP team size used by `omp::` kernels (<= 0 leaves it alone).
void set_thread_limit(int threads);

}  // namespace ravflow::kernels

namespace ravflow::kernels {

/// Deterministic parallel sum of f(k) for k in [0, n): fixed blocks, partials
/// added in block order.
template <typename F>
double parallel_sum(std::size_t n, F&& f) {
  const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  double partial_stack[64];
  std::unique_ptr<double[]> partial_heap;
  double* partial = partial_stack;
  if (nblocks > 64) {
    partial_heap = std::make_unique<double[]>(nblocks);
    partial = partial_heap.get();
  }
  const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t end = begin + kReductionBlock < n ? begin + kReductionBlock : n;
    double s = 0.0;
    for (std::size_t k = begin; k < end; ++k) s += f(k);
    partial[b] = s;
  }
  double sum = 0.0;
  for (std::size_t b = 0; b < nblocks; ++b) sum += partial[b];
  return sum;
}

/// Parallel element-wise loop.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < nn; ++k) f(static_cast<std::size_t>(k));
}

}  // namespace ravflow::kernels
