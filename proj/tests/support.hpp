#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "oracle/naive_dft.hpp"
#include "ravflow/grid.hpp"
#include "ravflow/rng.hpp"

namespace support {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline ravflow::Field random_field(const ravflow::Grid2D& grid, std::uint64_t seed,
                                   double amplitude = 1.0, double offset = 0.0) {
  ravflow::Xorshift64Star rng(seed);
  ravflow::Field f(grid);
  for (double& v : f.values()) v = offset + amplitude * rng.uniform();
  return f;
}

// Smooth random field: a few random low harmonics, so derivatives stay O(1).
inline ravflow::Field smooth_random(const ravflow::Grid2D& grid, std::uint64_t seed,
                                    double amplitude = 1.0, double offset = 0.0) {
  ravflow::Xorshift64Star rng(seed);
  double c[3][3][2];
  for (auto& a : c)
    for (auto& b : a)
      for (double& v : b) v = rng.uniform();
  const double ax = kTwoPi / grid.lx();
  const double ay = kTwoPi / grid.ly();
  return ravflow::Field::sample(grid, [&](double x, double y) {
    double s = 0.0;
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q)
        s += c[p][q][0] * std::cos(p * ax * x + q * ay * y) +
             c[p][q][1] * std::sin(p * ax * x - q * ay * y);
    return offset + amplitude * s / 9.0;
  });
}

inline oracle::Mesh mesh(const ravflow::Grid2D& g) { return {g.nx(), g.ny(), g.lx(), g.ly()}; }

inline oracle::Vec vec(const ravflow::Field& f) { return {f.values().begin(), f.values().end()}; }

inline double max_abs_diff(const ravflow::Field& a, const oracle::Vec& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double max_abs_diff(const ravflow::Field& a, const ravflow::Field& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace support
