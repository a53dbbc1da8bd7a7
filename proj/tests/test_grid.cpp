#include <doctest.h>

#include <cmath>

#include "ravflow/errors.hpp"
#include "ravflow/grid.hpp"
#include "support.hpp"

using namespace ravflow;
using support::kTwoPi;

TEST_SUITE("grid") {

TEST_CASE("grid construction is validated") {
  CHECK_THROWS_AS(Grid2D(7, 8, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid2D(2, 8, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid2D(8, 8, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid2D(8, 8, 1.0, -1.0), ConfigError);
  const Grid2D g(8, 6, 2.0, 3.0);
  CHECK(g.size() == 48);
  CHECK(g.spectral_size() == 5 * 6);
}

TEST_CASE("forward of a constant has only the mean mode") {
  const Grid2D g(8, 8, kTwoPi, kTwoPi);
  const Spectrum s = forward(Field::constant(g, 2.5));
  for (std::size_t k = 0; k < s.coeffs().size(); ++k) {
    if (k == 0) {
      CHECK(s[k].real() == doctest::Approx(2.5).epsilon(1e-15));
      CHECK(std::abs(s[k].imag()) < 1e-15);
    } else {
      CHECK(std::abs(s[k]) < 1e-15);
    }
  }
}

TEST_CASE("sin x has exactly the two modes (+-1, 0)") {
  const Grid2D g(16, 16, kTwoPi, kTwoPi);
  const Spectrum s = forward(Field::sample(g, [](double x, double) { return std::sin(x); }));
  for (int n = -7; n <= 8; ++n) {
    for (int m = -7; m <= 8; ++m) {
      const cplx c = s.at(m, n);
      if (n == 0 && (m == 1 || m == -1)) {
        CHECK(std::abs(c) == doctest::Approx(0.5).epsilon(1e-14));
      } else {
        CHECK(std::abs(c) < 1e-14);
      }
    }
  }
  // sin x = (e^{ix} - e^{-ix}) / 2i
  CHECK(s.at(1, 0).imag() == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(s.at(-1, 0).imag() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("transform round trip and naive DFT agreement") {
  const Grid2D g(8, 8, 3.0, 5.0);
  const Field f = support::random_field(g, 42);
  const Field back = inverse(forward(f));
  CHECK(support::max_abs_diff(back, f) < 1e-12);

  const auto c = oracle::dft(support::mesh(g), support::vec(f));
  const Spectrum s = forward(f);
  for (int q = 0; q < g.ny(); ++q) {
    for (int p = 0; p <= g.nx() / 2; ++p) {
      CHECK(std::abs(s.at(p, g.signed_row(q)) - c[static_cast<std::size_t>(q) * g.nx() + p]) < 1e-13);
    }
  }
}

TEST_CASE("Laplacian and biharmonic symbols") {
  const Grid2D g(16, 16, kTwoPi, kTwoPi);
  const Field one = Field::constant(g, 1.0);
  CHECK(support::max_abs_diff(inverse(apply_symbol(forward(one), symbols::laplacian())),
                              Field::constant(g, 0.0)) < 1e-14);

  auto s23 = [](double x, double y) { return std::sin(2 * x) * std::sin(3 * y); };
  const Field lap = inverse(apply_symbol(forward(Field::sample(g, s23)), symbols::laplacian()));
  CHECK(support::max_abs_diff(lap, Field::sample(g, [&](double x, double y) {
          return -13.0 * s23(x, y);
        })) < 1e-12);

  const Field sx = Field::sample(g, [](double x, double) { return std::sin(x); });
  CHECK(support::max_abs_diff(inverse(apply_symbol(forward(sx), symbols::biharmonic())), sx) <
        1e-12);

  // Tabulated symbols agree with apply_symbol.
  const auto ctx = SpectralContext::get(g);
  const auto tab = ctx->tabulate(symbols::laplacian());
  CHECK(support::max_abs_diff(inverse(apply_table(forward(Field::sample(g, s23)), tab)), lap) <
        1e-14);
}

TEST_CASE("gradient of simple fields") {
  const Grid2D g(16, 16, kTwoPi, kTwoPi);
  auto [cx, cy] = gradient(Field::constant(g, 5.0));
  CHECK(support::max_abs_diff(cx, Field::constant(g, 0.0)) < 1e-14);
  CHECK(support::max_abs_diff(cy, Field::constant(g, 0.0)) < 1e-14);

  auto [sx, sy] = gradient(Field::sample(g, [](double x, double) { return std::sin(x); }));
  CHECK(support::max_abs_diff(sx, Field::sample(g, [](double x, double) { return std::cos(x); })) <
        1e-13);
  CHECK(support::max_abs_diff(sy, Field::constant(g, 0.0)) < 1e-14);

  auto [yx, yy] = gradient(Field::sample(g, [](double, double y) { return std::cos(y); }));
  CHECK(support::max_abs_diff(yx, Field::constant(g, 0.0)) < 1e-14);
  CHECK(support::max_abs_diff(yy, Field::sample(g, [](double, double y) { return -std::sin(y); })) <
        1e-13);
}

TEST_CASE("gradient and divergence match the naive oracle and are adjoint") {
  const Grid2D g(8, 8, 2.0, 3.0);
  const auto m = support::mesh(g);
  const Field f = support::random_field(g, 7);
  auto [gx, gy] = gradient(f);
  CHECK(support::max_abs_diff(gx, oracle::d_dx(m, support::vec(f))) < 1e-12);
  CHECK(support::max_abs_diff(gy, oracle::d_dy(m, support::vec(f))) < 1e-12);

  const Field vx = support::random_field(g, 8);
  const Field vy = support::random_field(g, 9);
  // (grad f, v) = -(f, div v) on random data, Nyquist included.
  const double lhs = inner(gx, vx) + inner(gy, vy);
  const double rhs = -inner(f, divergence(vx, vy));
  CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
}

TEST_CASE("inner product and mean") {
  const Grid2D g(16, 16, kTwoPi, kTwoPi);
  const Field one = Field::constant(g, 1.0);
  CHECK(inner(one, one) == doctest::Approx(kTwoPi * kTwoPi).epsilon(1e-14));
  const Field sx = Field::sample(g, [](double x, double) { return std::sin(x); });
  CHECK(inner(sx, sx) == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi).epsilon(1e-13));

  const Grid2D g8(8, 8, 1.5, 2.5);
  const Field a = support::random_field(g8, 1);
  const Field b = support::random_field(g8, 2);
  const double direct = oracle::inner(support::mesh(g8), support::vec(a), support::vec(b));
  CHECK(std::abs(inner(a, b) - direct) < 1e-13);
  CHECK(std::abs(spectral_inner(forward(a), forward(b)) - direct) < 1e-13);

  CHECK(mean(Field::constant(g, 3.0)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(std::abs(mean(sx)) < 1e-15);
  CHECK(std::abs(mean(Field::sample(g, [](double x, double y) {
          return 0.05 * std::sin(x) * std::sin(y);
        }))) < 1e-15);
}

TEST_CASE("two-thirds dealiasing") {
  const Grid2D g(16, 16, kTwoPi, kTwoPi);
  Spectrum low(g);
  low[1] = cplx(0.5, -0.25);  // mode (1, 0)
  const Spectrum kept = dealias(low);
  for (std::size_t k = 0; k < low.coeffs().size(); ++k) CHECK(kept[k] == low[k]);

  Spectrum high(g);
  high[7] = cplx(1.0, 1.0);  // mode (nx/2 - 1, 0)
  const Spectrum cut = dealias(high);
  for (const cplx& c : cut.coeffs()) CHECK(c == cplx(0.0));

  const Spectrum rnd = forward(support::random_field(g, 3));
  const Spectrum same = dealias(rnd, false);
  for (std::size_t k = 0; k < rnd.coeffs().size(); ++k) CHECK(same[k] == rnd[k]);
}

TEST_CASE("field arithmetic checks grids") {
  const Grid2D a(8, 8, 1.0, 1.0), b(8, 8, 2.0, 1.0);
  CHECK_THROWS_AS(Field::constant(a, 1.0) + Field::constant(b, 1.0), InvalidFieldError);
  CHECK_THROWS(Field(a, std::vector<double>(10)));
  Field f = Field::constant(a, 1.0);
  CHECK(f.all_finite());
  f[3] = std::nan("");
  CHECK_FALSE(f.all_finite());
}

}
