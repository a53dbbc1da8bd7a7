// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "ravflow/kernels.hpp"

namespace k = ravflow::kernels;

namespace {

struct Data {
  std::vector<k::cplx> u, v, nl, out;
  std::vector<double> g, a, w, x, y, z;

  explicit Data(std::size_t n) : u(n), v(n), nl(n), out(n), g(n), a(n), w(n), x(n), y(n), z(n) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = {d(rng), d(rng)};
      v[i] = {d(rng), d(rng)};
      nl[i] = {d(rng), d(rng)};
      g[i] = -std::abs(d(rng));
      a[i] = 1.0 + std::abs(d(rng));
      w[i] = 2.0;
      x[i] = d(rng);
      y[i] = d(rng);
    }
  }
};

// Range argument is the grid side; spectral kernels see n * (n/2 + 1) modes.
std::size_t modes(const benchmark::State& s) {
  const auto n = static_cast<std::size_t>(s.range(0));
  return n * (n / 2 + 1);
}

std::size_t points(const benchmark::State& s) {
  const auto n = static_cast<std::size_t>(s.range(0));
  return n * n;
}

template <bool Par>
void theta_update(benchmark::State& s) {
  Data d(modes(s));
  for (auto _ : s) {
    if constexpr (Par) {
      k::omp::theta_update(d.u, d.nl, d.g, d.a, 0.5, 0.01, d.out);
    } else {
      k::serial::theta_update(d.u, d.nl, d.g, d.a, 0.5, 0.01, d.out);
    }
    benchmark::DoNotOptimize(d.out.data());
  }
  s.SetItemsProcessed(s.iterations() * static_cast<long>(d.u.size()));
}

template <bool Par>
void modal_potential(benchmark::State& s) {
  Data d(modes(s));
  for (auto _ : s) {
    if constexpr (Par) {
      k::omp::modal_potential(d.u, d.v, d.nl, d.a, 0.5, d.out);
    } else {
      k::serial::modal_potential(d.u, d.v, d.nl, d.a, 0.5, d.out);
    }
    benchmark::DoNotOptimize(d.out.data());
  }
  s.SetItemsProcessed(s.iterations() * static_cast<long>(d.u.size()));
}

template <bool Par>
void modal_inner(benchmark::State& s) {
  Data d(modes(s));
  for (auto _ : s) {
    double r = Par ? k::omp::weighted_modal_inner(d.u, d.v, d.w)
                   : k::serial::weighted_modal_inner(d.u, d.v, d.w);
    benchmark::DoNotOptimize(r);
  }
  s.SetItemsProcessed(s.iterations() * static_cast<long>(d.u.size()));
}

template <bool Par>
void dot(benchmark::State& s) {
  Data d(points(s));
  for (auto _ : s) {
    double r = Par ? k::omp::dot(d.x, d.y) : k::serial::dot(d.x, d.y);
    benchmark::DoNotOptimize(r);
  }
  s.SetItemsProcessed(s.iterations() * static_cast<long>(d.x.size()));
}

template <bool Par>
void axpby(benchmark::State& s) {
  Data d(points(s));
  for (auto _ : s) {
    if constexpr (Par) {
      k::omp::axpby(0.5, d.x, -1.5, d.y, d.z);
    } else {
      k::serial::axpby(0.5, d.x, -1.5, d.y, d.z);
    }
    benchmark::DoNotOptimize(d.z.data());
  }
  s.SetItemsProcessed(s.iterations() * static_cast<long>(d.x.size()));
}

}  // namespace

#define RAVFLOW_PAIR(fn)                                                      \
  BENCHMARK(fn<false>)->Name(#fn "/serial")->RangeMultiplier(2)->Range(64, 512); \
  BENCHMARK(fn<true>)->Name(#fn "/omp")->RangeMultiplier(2)->Range(64, 512)

RAVFLOW_PAIR(theta_update);
RAVFLOW_PAIR(modal_potential);
RAVFLOW_PAIR(modal_inner);
RAVFLOW_PAIR(dot);
RAVFLOW_PAIR(axpby);

BENCHMARK_MAIN();
