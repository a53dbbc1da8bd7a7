#pragma once

// Periodic rectangular grid, real <-> Fourier transforms and per-mode
// differential operators.
//
// Layout conventions (fixed, relied on by the snapshot format):
//   * Field values are row-major over [ny][nx]: value(i, j) sits at
//     index j * nx + i and at the point (i * hx, j * hy).
//   * Spectra use the half-complex layout of a real-to-complex transform:
//     ny rows of (nx / 2 + 1) coefficients. Column m in [0, nx/2] is the
//     x-mode m, row n is the y-mode n (n > ny/2 stands for n - ny).
//   * forward() divides by nx * ny, so mode (0,0) is the grid mean;
//     inverse() is unnormalised.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace ravflow {

using cplx = std::complex<double>;

class Grid2D {
 public:
  /// Throws ConfigError unless nx, ny >= 4 are even and Lx, Ly > 0.
  Grid2D(int nx, int ny, double lx, double ly);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double hx() const { return lx_ / nx_; }
  double hy() const { return ly_ / ny_; }
  double area() const { return lx_ * ly_; }
  double cell_area() const { return hx() * hy(); }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

  int spectral_nx() const { return nx_ / 2 + 1; }
  std::size_t spectral_size() const {
    return static_cast<std::size_t>(spectral_nx()) * ny_;
  }

  /// Signed y-mode for spectral row n.
  int signed_row(int n) const { return n <= ny_ / 2 ? n : n - ny_; }
  double kx(int m) const;
  double ky(int n_signed) const;

  bool operator==(const Grid2D&) const = default;

 private:
  int nx_;
  int ny_;
  double lx_;
  double ly_;
};

/// Real grid function.
class Field {
 public:
  explicit Field(const Grid2D& grid);
  Field(const Grid2D& grid, std::vector<double> values);

  static Field constant(const Grid2D& grid, double c);
  /// Samples f(x, y) at the grid points.
  static Field sample(const Grid2D& grid,
                      const std::function<double(double, double)>& f);

  const Grid2D& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator()(int i, int j) { return values_[index(i, j)]; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }

  bool all_finite() const;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * grid_.nx() + i;
  }

  Grid2D grid_;
  std::vector<double> values_;
};

/// Fourier coefficients of a real field (half-complex storage).
class Spectrum {
 public:
  explicit Spectrum(const Grid2D& grid);

  const Grid2D& grid() const { return grid_; }
  std::span<cplx> coeffs() { return coeffs_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  cplx& operator[](std::size_t k) { return coeffs_[k]; }
  cplx operator[](std::size_t k) const { return coeffs_[k]; }

  /// Coefficient of the signed mode (m, n); negative m is recovered from
  /// Hermitian symmetry.
  cplx at(int m, int n) const;

 private:
  Grid2D grid_;
  std::vector<cplx> coeffs_;
};

/// Per-mode symbol s(kx, ky).
using Symbol = std::function<double(double kx, double ky)>;

namespace symbols {
Symbol laplacian();   // -k^2
Symbol biharmonic();  // k^4
}  // namespace symbols

/// Per-grid tables and FFT plans, shared by every field on that grid.
/// Instances are immutable and safe to use from several threads.
class SpectralContext {
 public:
  static std::shared_ptr<const SpectralContext> get(const Grid2D& grid);

  explicit SpectralContext(const Grid2D& grid);
  ~SpectralContext();
  SpectralContext(const SpectralContext&) = delete;
  SpectralContext& operator=(const SpectralContext&) = delete;

  const Grid2D& grid() const { return grid_; }

  void forward(std::span<const double> in, std::span<cplx> out) const;
  void inverse(std::span<const cplx> in, std::span<double> out) const;

  /// k^2 per stored mode.
  std::span<const double> k2() const { return k2_; }
  /// Derivative wavenumbers with the Nyquist entry zeroed.
  std::span<const double> dx_symbol() const { return dx_; }
  std::span<const double> dy_symbol() const { return dy_; }
  /// |Omega| times the Hermitian multiplicity of each stored mode, so that
  /// sum_k w[k] Re(conj(u_k) v_k) is the L2 inner product.
  std::span<const double> parseval_weight() const { return parseval_; }
  /// 1 for modes kept by the two-thirds rule, 0 otherwise.
  std::span<const double> dealias_mask() const { return mask_; }

  std::vector<double> tabulate(const Symbol& s) const;

 private:
  Grid2D grid_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
  std::vector<double> kx_, ky_, k2_, dx_, dy_, parseval_, mask_;
};

Spectrum forward(const Field& field);
Field inverse(const Spectrum& spec);

Spectrum apply_symbol(const Spectrum& spec, const Symbol& s);
/// Multiplies by a precomputed per-mode table (see SpectralContext::tabulate).
Spectrum apply_table(const Spectrum& spec, std::span<const double> table);

std::pair<Field, Field> gradient(const Field& field);
/// Spectral divergence, built from the same derivative symbols as gradient()
/// so that div is exactly minus the adjoint of grad.
Field divergence(const Field& fx, const Field& fy);

/// hx hy sum f g.
double inner(const Field& f, const Field& g);
double mean(const Field& f);
/// L2 inner product evaluated from the spectra (Parseval).
double spectral_inner(const Spectrum& u, const Spectrum& v);

/// Two-thirds rule when enabled; a copy of the input otherwise.
Spectrum dealias(const Spectrum& spec, bool enabled = true);

void require_same_grid(const Field& a, const Field& b);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
/// alpha a + beta b
Field axpby(double alpha, const Field& a, double beta, const Field& b);

}  // namespace ravflow
