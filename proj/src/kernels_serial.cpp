#include "ravflow/kernels.hpp"

namespace ravflow::kernels::serial {

void theta_update(std::span<const cplx> prev, std::span<const cplx> nl,
                  std::span<const double> g, std::span<const double> a,
                  double theta, double dt, std::span<cplx> out) {
  for (std::size_t k = 0; k < prev.size(); ++k) {
    const double dg = dt * g[k];
    out[k] = prev[k] + dg * (a[k] * prev[k] + nl[k]) / (1.0 - theta * dg * a[k]);
  }
}

void modal_potential(std::span<const cplx> next, std::span<const cplx> prev,
                     std::span<const cplx> nl, std::span<const double> a,
                     double theta, std::span<cplx> out) {
  for (std::size_t k = 0; k < next.size(); ++k) {
    out[k] = a[k] * (theta * next[k] + (1.0 - theta) * prev[k]) + nl[k];
  }
}

double weighted_modal_inner(std::span<const cplx> u, std::span<const cplx> v,
                            std::span<const double> w) {
  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    sum += w[k] * (u[k].real() * v[k].real() + u[k].imag() * v[k].imag());
  }
  return sum;
}

double dot(std::span<const double> f, std::span<const double> g) {
  double sum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) sum += f[k] * g[k];
  return sum;
}

void axpby(double alpha, std::span<const double> x, double beta,
           std::span<const double> y, std::span<double> out) {
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = alpha * x[k] + beta * y[k];
}

}  // namespace ravflow::kernels::serial
