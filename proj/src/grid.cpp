#include "ravflow/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "ravflow/errors.hpp"
#include "ravflow/kernels.hpp"

namespace ravflow {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
std::unique_ptr<T, FftwDeleter> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return std::unique_ptr<T, FftwDeleter>(p);
}

}  // namespace

// ---------------------------------------------------------------- Grid2D

Grid2D::Grid2D(int nx, int ny, double lx, double ly)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
  if (nx < 4 || ny < 4 || nx % 2 != 0 || ny % 2 != 0) {
    std::ostringstream os;
    os << "grid sizes must be even and >= 4, got " << nx << "x" << ny;
    throw ConfigError(os.str());
  }
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw ConfigError("domain lengths must be positive and finite");
  }
}

double Grid2D::kx(int m) const { return 2.0 * std::numbers::pi * m / lx_; }
double Grid2D::ky(int n_signed) const {
  return 2.0 * std::numbers::pi * n_signed / ly_;
}

// ---------------------------------------------------------------- Field

Field::Field(const Grid2D& grid) : grid_(grid), values_(grid.size(), 0.0) {}

Field::Field(const Grid2D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidFieldError("field value count does not match the grid");
  }
}

Field Field::constant(const Grid2D& grid, double c) {
  return Field(grid, std::vector<double>(grid.size(), c));
}

Field Field::sample(const Grid2D& grid,
                    const std::function<double(double, double)>& f) {
  Field out(grid);
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      out(i, j) = f(i * grid.hx(), j * grid.hy());
    }
  }
  return out;
}

bool Field::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// ---------------------------------------------------------------- Spectrum

Spectrum::Spectrum(const Grid2D& grid)
    : grid_(grid), coeffs_(grid.spectral_size(), cplx{0.0, 0.0}) {}

cplx Spectrum::at(int m, int n) const {
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  bool conjugate = false;
  if (m < 0) {
    m = -m;
    n = -n;
    conjugate = true;
  }
  if (m > nx / 2) throw std::out_of_range("x-mode outside the stored half spectrum");
  const int row = ((n % ny) + ny) % ny;
  const cplx c = coeffs_[static_cast<std::size_t>(row) * grid_.spectral_nx() + m];
  return conjugate ? std::conj(c) : c;
}

namespace symbols {
Symbol laplacian() {
  return [](double kx, double ky) { return -(kx * kx + ky * ky); };
}
Symbol biharmonic() {
  return [](double kx, double ky) {
    const double k2 = kx * kx + ky * ky;
    return k2 * k2;
  };
}
}  // namespace symbols

// ---------------------------------------------------------------- SpectralContext

std::shared_ptr<const SpectralContext> SpectralContext::get(const Grid2D& grid) {
  using Key = std::tuple<int, int, double, double>;
  static std::mutex cache_mutex;
  static std::map<Key, std::shared_ptr<const SpectralContext>> cache;
  const Key key{grid.nx(), grid.ny(), grid.lx(), grid.ly()};
  std::lock_guard lock(cache_mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto ctx = std::make_shared<const SpectralContext>(grid);
  cache.emplace(key, ctx);
  return ctx;
}

SpectralContext::SpectralContext(const Grid2D& grid) : grid_(grid) {
  const int nx = grid.nx();
  const int ny = grid.ny();
  const int sx = grid.spectral_nx();
  const std::size_t ns = grid.spectral_size();
  {
    std::lock_guard lock(planner_mutex());
    auto real = fftw_buffer<double>(grid.size());
    auto spec = fftw_buffer<fftw_complex>(ns);
    forward_plan_ = fftw_plan_dft_r2c_2d(ny, nx, real.get(), spec.get(), FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r_2d(ny, nx, spec.get(), real.get(), FFTW_ESTIMATE);
  }
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    throw std::runtime_error("FFTW planning failed");
  }

  kx_.resize(ns);
  ky_.resize(ns);
  k2_.resize(ns);
  dx_.resize(ns);
  dy_.resize(ns);
  parseval_.resize(ns);
  mask_.resize(ns);
  for (int n = 0; n < ny; ++n) {
    const int ns_row = grid.signed_row(n);
    for (int m = 0; m < sx; ++m) {
      const std::size_t k = static_cast<std::size_t>(n) * sx + m;
      kx_[k] = grid.kx(m);
      ky_[k] = grid.ky(ns_row);
      k2_[k] = kx_[k] * kx_[k] + ky_[k] * ky_[k];
      dx_[k] = (m == nx / 2) ? 0.0 : kx_[k];
      dy_[k] = (n == ny / 2) ? 0.0 : ky_[k];
      const double mult = (m == 0 || m == nx / 2) ? 1.0 : 2.0;
      parseval_[k] = grid.area() * mult;
      const bool keep = 3 * m <= nx && 3 * std::abs(ns_row) <= ny;
      mask_[k] = keep ? 1.0 : 0.0;
    }
  }
}

SpectralContext::~SpectralContext() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void SpectralContext::forward(std::span<const double> in, std::span<cplx> out) const {
  auto real = fftw_buffer<double>(grid_.size());
  auto spec = fftw_buffer<fftw_complex>(grid_.spectral_size());
  std::copy(in.begin(), in.end(), real.get());
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), real.get(), spec.get());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = cplx(spec.get()[k][0] * scale, spec.get()[k][1] * scale);
  }
}

void SpectralContext::inverse(std::span<const cplx> in, std::span<double> out) const {
  auto real = fftw_buffer<double>(grid_.size());
  auto spec = fftw_buffer<fftw_complex>(grid_.spectral_size());
  for (std::size_t k = 0; k < in.size(); ++k) {
    spec.get()[k][0] = in[k].real();
    spec.get()[k][1] = in[k].imag();
  }
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), spec.get(), real.get());
  std::copy(real.get(), real.get() + grid_.size(), out.begin());
}

std::vector<double> SpectralContext::tabulate(const Symbol& s) const {
  std::vector<double> out(kx_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = s(kx_[k], ky_[k]);
  return out;
}

// ---------------------------------------------------------------- operations

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) {
    throw InvalidFieldError("fields live on different grids");
  }
}

Field axpby(double alpha, const Field& a, double beta, const Field& b) {
  require_same_grid(a, b);
  Field out(a.grid());
  kernels::omp::axpby(alpha, a.values(), beta, b.values(), out.values());
  return out;
}

Field operator+(const Field& a, const Field& b) { return axpby(1.0, a, 1.0, b); }
Field operator-(const Field& a, const Field& b) { return axpby(1.0, a, -1.0, b); }
Field operator*(double s, const Field& a) { return axpby(s, a, 0.0, a); }

Spectrum forward(const Field& field) {
  if (!field.all_finite()) throw InvalidFieldError("non-finite field value");
  Spectrum out(field.grid());
  SpectralContext::get(field.grid())->forward(field.values(), out.coeffs());
  return out;
}

Field inverse(const Spectrum& spec) {
  Field out(spec.grid());
  SpectralContext::get(spec.grid())->inverse(spec.coeffs(), out.values());
  return out;
}

Spectrum apply_table(const Spectrum& spec, std::span<const double> table) {
  Spectrum out(spec.grid());
  auto in = spec.coeffs();
  auto dst = out.coeffs();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = table[k] * in[k];
  return out;
}

Spectrum apply_symbol(const Spectrum& spec, const Symbol& s) {
  const auto table = SpectralContext::get(spec.grid())->tabulate(s);
  return apply_table(spec, table);
}

std::pair<Field, Field> gradient(const Field& field) {
  const auto ctx = SpectralContext::get(field.grid());
  const Spectrum f = forward(field);
  Spectrum gx(field.grid()), gy(field.grid());
  const auto dx = ctx->dx_symbol();
  const auto dy = ctx->dy_symbol();
  for (std::size_t k = 0; k < f.coeffs().size(); ++k) {
    gx[k] = cplx(0.0, dx[k]) * f[k];
    gy[k] = cplx(0.0, dy[k]) * f[k];
  }
  return {inverse(gx), inverse(gy)};
}

Field divergence(const Field& fx, const Field& fy) {
  require_same_grid(fx, fy);
  const auto ctx = SpectralContext::get(fx.grid());
  const Spectrum ax = forward(fx);
  const Spectrum ay = forward(fy);
  Spectrum d(fx.grid());
  const auto dx = ctx->dx_symbol();
  const auto dy = ctx->dy_symbol();
  for (std::size_t k = 0; k < d.coeffs().size(); ++k) {
    d[k] = cplx(0.0, dx[k]) * ax[k] + cplx(0.0, dy[k]) * ay[k];
  }
  return inverse(d);
}

double inner(const Field& f, const Field& g) {
  require_same_grid(f, g);
  return f.grid().cell_area() * kernels::omp::dot(f.values(), g.values());
}

double mean(const Field& f) {
  return inner(f, Field::constant(f.grid(), 1.0)) / f.grid().area();
}

double spectral_inner(const Spectrum& u, const Spectrum& v) {
  if (!(u.grid() == v.grid())) throw InvalidFieldError("spectra live on different grids");
  const auto ctx = SpectralContext::get(u.grid());
  return kernels::omp::weighted_modal_inner(u.coeffs(), v.coeffs(), ctx->parseval_weight());
}

Spectrum dealias(const Spectrum& spec, bool enabled) {
  if (!enabled) return spec;
  return apply_table(spec, SpectralContext::get(spec.grid())->dealias_mask());
}

}  // namespace ravflow
