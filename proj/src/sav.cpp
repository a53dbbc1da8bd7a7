#include "ravflow/sav.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ravflow/errors.hpp"
#include "ravflow/kernels.hpp"

namespace ravflow {

namespace {

namespace kn = kernels::omp;

void require_single_field(const Model& model) {
  if (model.n_fields() != 1) throw ConfigError("SAV schemes support single-field models only");
}

double radicand_root(const Model& model, const Field& phi, long step) {
  const double q = sav_bulk_energy(model, phi) + model.c0();
  if (!(q > 0.0)) {
    throw ConfigError("step " + std::to_string(step) + ": int F + C0 = " + std::to_string(q) +
                      " is not positive; increase C0");
  }
  return std::sqrt(q);
}

// One SAV step. theta = 1 gives the first-order scheme, theta = 1/2 the
// midpoint one; `extrap` is where F' and the stabilisation are evaluated.
SavStepResult sav_step(const SavState& state, const Model& model, double dt, double theta,
                       const Field& extrap) {
  require_single_field(model);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
  const long step = state.n + 1;
  const Grid2D& grid = state.phi.grid();
  const auto ctx = SpectralContext::get(grid);
  const auto tables = model.mode_tables(0, grid);
  const auto& a = tables->implicit;
  const auto& g = tables->dissipation;
  const auto w = ctx->parseval_weight();
  const double ls = model.lambda_stab();

  if (!extrap.all_finite()) {
    throw NumericalError("step " + std::to_string(step) + ": non-finite field");
  }
  const double s = radicand_root(model, extrap, step);
  const Spectrum b_hat = dealias(forward((1.0 / s) * sav_bulk_force(model, extrap)),
                                 model.dealias());
  const Spectrum stab_hat = forward((-ls) * extrap);
  const Spectrum cur_hat = forward(state.phi);
  const std::size_t m = cur_hat.coeffs().size();

  Spectrum pa(grid), pb(grid), zero(grid);
  kn::theta_update(cur_hat.coeffs(), stab_hat.coeffs(), g, a, theta, dt, pa.coeffs());
  kn::theta_update(zero.coeffs(), b_hat.coeffs(), g, a, theta, dt, pb.coeffs());

  const auto bc = b_hat.coeffs();
  const auto ac = pa.coeffs();
  const auto bbc = pb.coeffs();
  const auto cc = cur_hat.coeffs();
  const double b_pb = kernels::parallel_sum(m, [&](std::size_t k) {
    return w[k] * std::real(std::conj(bc[k]) * bbc[k]);
  });
  const double b_da = kernels::parallel_sum(m, [&](std::size_t k) {
    return w[k] * std::real(std::conj(bc[k]) * (ac[k] - cc[k]));
  });

  // Coefficient s_c multiplying b in mu: r^{n+1} (theta = 1) or
  // (r^{n+1} + r^n)/2 (theta = 1/2). From r^{n+1} - r^n = 1/2 (b, dphi):
  //   s_c = r^n + theta/2 (b, phi_a - phi^n) + theta/2 s_c (b, phi_b).
  const double sc = (state.r + 0.5 * theta * b_da) / (1.0 - 0.5 * theta * b_pb);
  const double r_new = state.r + (sc - state.r) / theta;

  Spectrum next(grid), mu_hat(grid);
  auto nc = next.coeffs();
  kernels::parallel_for(m, [&](std::size_t k) { nc[k] = ac[k] + sc * bbc[k]; });
  // mu = a (theta next + (1 - theta) phi^n) - lambda_s extrap + s_c b
  Spectrum nl_hat(grid);
  auto nlc = nl_hat.coeffs();
  const auto sc_hat = stab_hat.coeffs();
  kernels::parallel_for(m, [&](std::size_t k) { nlc[k] = sc_hat[k] + sc * bc[k]; });
  kn::modal_potential(next.coeffs(), cur_hat.coeffs(), nl_hat.coeffs(), a, theta,
                      mu_hat.coeffs());

  Field phi = inverse(next);
  if (!phi.all_finite() || !std::isfinite(r_new)) {
    throw NumericalError("step " + std::to_string(step) + ": field diverged");
  }
  SavState out{state.t + dt, step, std::move(phi), state.phi, r_new};
  return {std::move(out), inverse(mu_hat)};
}

}  // namespace

double sav_bulk_energy(const Model& model, const Field& phi) {
  require_single_field(model);
  const Field f[] = {phi};
  return model.nonlinear_energy(f) + 0.5 * model.lambda_stab() * inner(phi, phi);
}

Field sav_bulk_force(const Model& model, const Field& phi) {
  require_single_field(model);
  const Field f[] = {phi};
  return axpby(1.0, model.nonlinear_force(f)[0], model.lambda_stab(), phi);
}

SavState sav_init(const Model& model, Field phi0, double t0) {
  require_single_field(model);
  if (!phi0.all_finite()) throw InvalidFieldError("initial field is not finite");
  SavState s{t0, 0, std::move(phi0), std::nullopt, 0.0};
  s.r = radicand_root(model, s.phi, 0);
  return s;
}

SavStepResult sav_step_first_order(const SavState& state, const Model& model, double dt) {
  return sav_step(state, model, dt, 1.0, state.phi);
}

SavStepResult sav_step_cn(const SavState& state, const Model& model, double dt) {
  if (!state.phi_prev) {
    throw StartupError("SAV midpoint step needs phi^{n-1}; start with sav_step_first_order");
  }
  return sav_step(state, model, dt, 0.5, axpby(1.5, state.phi, -0.5, *state.phi_prev));
}

double sav_drift(const SavState& state, const Model& model) {
  const double q = sav_bulk_energy(model, state.phi) + model.c0();
  return std::abs(state.r - std::sqrt(std::max(q, 0.0)));
}

double sav_modified_energy(const SavState& state, const Model& model) {
  // ell - lambda_s is the symbol of L.
  const Field f[] = {state.phi};
  const double quad =
      quadratic_energy(model, f) - 0.5 * model.lambda_stab() * inner(state.phi, state.phi);
  return quad + state.r * state.r - model.c0();
}

}  // namespace ravflow
