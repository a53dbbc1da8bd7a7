#include "ravflow/rav.hpp"

#include <array>
#include <cassert>
#include <cmath>
#include <string>

#include "ravflow/errors.hpp"
#include "ravflow/kernels.hpp"

namespace ravflow {

namespace {

namespace kn = kernels::omp;

struct BdfCoefficients {
  double alpha;
  std::array<double, 4> a;  // weights of phi^n, phi^{n-1}, ...
  std::array<double, 4> b;  // extrapolation weights of phibar^n, ...
};

BdfCoefficients bdf_coefficients(int k) {
  if (k == 3) return {11.0 / 6.0, {3.0, -1.5, 1.0 / 3.0, 0.0}, {3.0, -3.0, 1.0, 0.0}};
  if (k == 4) {
    return {25.0 / 12.0, {4.0, -3.0, 4.0 / 3.0, -0.25}, {4.0, -6.0, 4.0, -1.0}};
  }
  throw ConfigError("BDF order must be 3 or 4, got " + std::to_string(k));
}

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
}

std::string at_step(long n) { return "step " + std::to_string(n) + ": "; }

// Result of the per-mode linear solves for every field.
struct Solved {
  std::vector<Field> phi;
  double nl_increment = 0.0;  // sum_i (nl_i, phi_i^{n+1} - phi_i^n)
  double mu_increment = 0.0;  // sum_i (mu_i, phi_i^{n+1} - prev_i)
  double dissipation = 0.0;   // -dt sum_i (mu_i, G_i mu_i)
};

// Solves (phi^{n+1} - prev) / dt_eff = G (a (theta phi^{n+1} + (1 - theta) prev) + nl)
// mode by mode. `cur_hat` holds the spectra of phi^n, used for the nonlinear
// pairing (for one-step schemes it is the same as prev_hat).
Solved solve_linear(const Model& model, const std::vector<Spectrum>& cur_hat,
                    const std::vector<Spectrum>& prev_hat, const std::vector<Field>& extrap,
                    double theta, double dt_eff, double dt_diss, long step) {
  for (const Field& f : extrap) {
    if (!f.all_finite()) throw NumericalError(at_step(step) + "non-finite extrapolated field");
  }
  const std::vector<Field> nl = model.nonlinear_force(extrap);
  Solved out;
  for (std::size_t i = 0; i < cur_hat.size(); ++i) {
    const Grid2D& grid = cur_hat[i].grid();
    const auto ctx = SpectralContext::get(grid);
    const auto tables = model.mode_tables(i, grid);
    const auto w = ctx->parseval_weight();
    const auto& g = tables->dissipation;

    if (!nl[i].all_finite()) throw NumericalError(at_step(step) + "non-finite nonlinear term");
    const Spectrum nl_hat = dealias(forward(nl[i]), model.dealias());
    Spectrum next(grid), mu(grid);
    kn::theta_update(prev_hat[i].coeffs(), nl_hat.coeffs(), g, tables->implicit, theta, dt_eff,
                     next.coeffs());
    kn::modal_potential(next.coeffs(), prev_hat[i].coeffs(), nl_hat.coeffs(), tables->implicit,
                        theta, mu.coeffs());

    const auto nc = next.coeffs();
    const auto cc = cur_hat[i].coeffs();
    const auto pc = prev_hat[i].coeffs();
    const auto lc = nl_hat.coeffs();
    const auto mc = mu.coeffs();
    out.nl_increment += kernels::parallel_sum(nc.size(), [&](std::size_t k) {
      return w[k] * std::real(std::conj(lc[k]) * (nc[k] - cc[k]));
    });
    out.mu_increment += kernels::parallel_sum(nc.size(), [&](std::size_t k) {
      return w[k] * std::real(std::conj(mc[k]) * (nc[k] - pc[k]));
    });
    out.dissipation -= dt_diss * kernels::parallel_sum(nc.size(), [&](std::size_t k) {
      return w[k] * g[k] * std::norm(mc[k]);
    });

    Field phi = inverse(next);
    if (!phi.all_finite()) throw NumericalError(at_step(step) + "field diverged");
    out.phi.push_back(std::move(phi));
  }
  return out;
}

std::vector<Spectrum> spectra(const std::vector<Field>& fields) {
  std::vector<Spectrum> out;
  out.reserve(fields.size());
  for (const Field& f : fields) out.push_back(forward(f));
  return out;
}

// Builds the next state from phi^{n+1} and a Q-type functional that still
// lacks the "- E1[phi^{n+1}]" (or "- E[phi^{n+1}]") part; `finish_q` adds it.
template <typename FinishQ>
StepResult finalize(const RavState& state, const Model& model, std::vector<Field> phi,
                    double dt, double dissipation, double r_reference, FinishQ&& finish_q) {
  const long step = state.n + 1;
  RavState next;
  next.t = state.t + dt;
  next.n = step;
  next.E1 = model.nonlinear_energy(phi);
  next.E = quadratic_energy(model, phi) + next.E1;
  const double Q = finish_q(next.E1, next.E);
  if (!std::isfinite(Q) || !std::isfinite(next.E)) {
    throw NumericalError(at_step(step) + "non-finite energy");
  }
  next.r = correct_r(Q);
  const double etilde = next.E + model.c0();
  if (!(etilde > 0.0)) {
    throw NumericalError(at_step(step) + "E + C0 = " + std::to_string(etilde) +
                         " is not positive; increase C0");
  }
  if (!(etilde + next.r > 0.0)) {
    throw NumericalError(at_step(step) + "modified energy E + C0 + r lost positivity");
  }
  next.xi = (etilde + next.r) / etilde;
  next.phibar.reserve(phi.size());
  for (const Field& f : phi) next.phibar.push_back(next.xi * f);
  next.phi = std::move(phi);

  next.history = state.history;
  next.history.push_front(RavHistoryEntry{state.phi, state.phibar, state.r, state.E});
  while (next.history.size() > kRavHistoryDepth) next.history.pop_back();

  StepReport rep{Q, Q - r_reference, next.r, dissipation, next.E,
                 Q >= 0.0 ? Branch::Zeroed : Branch::Carried};
  return {std::move(next), rep};
}

void debug_check_cache([[maybe_unused]] const RavState& state,
                       [[maybe_unused]] const Model& model) {
#ifndef NDEBUG
  const double e = energy(model, state.phi);
  assert(std::abs(e - state.E) <= 1e-12 * (1.0 + std::abs(e)));
#endif
}

// Midpoint step with a caller-supplied extrapolation of phibar^{n+1/2}.
StepResult midpoint_step(const RavState& state, const Model& model, double dt,
                         const std::vector<Field>& extrap) {
  check_dt(dt);
  debug_check_cache(state, model);
  const std::vector<Spectrum> cur = spectra(state.phi);
  Solved s = solve_linear(model, cur, cur, extrap, 0.5, dt, dt, state.n + 1);
  const double base = state.r + s.nl_increment + state.E1 + s.dissipation;
  return finalize(state, model, std::move(s.phi), dt, s.dissipation, state.r,
                  [&](double e1_new, double) { return base - e1_new; });
}

}  // namespace

RavState initial_state(const Model& model, std::vector<Field> phi0, double t0) {
  if (phi0.size() != model.n_fields()) {
    throw ConfigError("initial condition has the wrong number of fields");
  }
  for (const Field& f : phi0) {
    if (!f.all_finite()) throw InvalidFieldError("initial field is not finite");
  }
  RavState s;
  s.t = t0;
  s.E1 = model.nonlinear_energy(phi0);
  s.E = quadratic_energy(model, phi0) + s.E1;
  if (!(s.E + model.c0() > 0.0)) {
    throw ConfigError("E[phi0] + C0 = " + std::to_string(s.E + model.c0()) +
                      " is not positive; increase C0");
  }
  s.phibar = phi0;
  s.phi = std::move(phi0);
  return s;
}

double correct_r(double Q) { return Q >= 0.0 ? 0.0 : Q; }

StepResult first_step(const RavState& state, const Model& model, double dt) {
  check_dt(dt);
  debug_check_cache(state, model);
  const std::vector<Spectrum> cur = spectra(state.phi);
  Solved s = solve_linear(model, cur, cur, state.phibar, 1.0, dt, dt, state.n + 1);
  // Backward Euler dissipates 1/2 ||phi^1 - phi^0||_l^2 on top of the
  // mobility term; counting it in Q keeps the energy identity exact.
  double numerical = 0.0;
  for (std::size_t i = 0; i < s.phi.size(); ++i) {
    const Spectrum inc = forward(s.phi[i] - state.phi[i]);
    const auto w = SpectralContext::get(inc.grid())->parseval_weight();
    const auto& a = model.mode_tables(i, inc.grid())->implicit;
    const auto c = inc.coeffs();
    numerical += 0.5 * kernels::parallel_sum(c.size(), [&](std::size_t k) {
      return w[k] * a[k] * std::norm(c[k]);
    });
  }
  const double base = state.r + s.nl_increment + state.E1 + s.dissipation + numerical;
  return finalize(state, model, std::move(s.phi), dt, s.dissipation, state.r,
                  [&](double e1_new, double) { return base - e1_new; });
}

StepResult step_cn(const RavState& state, const Model& model, double dt) {
  if (state.history.empty()) {
    throw StartupError("midpoint step needs one previous state; use first_step to start");
  }
  const auto& prev = state.history.front().phibar;
  std::vector<Field> extrap;
  extrap.reserve(prev.size());
  for (std::size_t i = 0; i < prev.size(); ++i) {
    extrap.push_back(axpby(1.5, state.phibar[i], -0.5, prev[i]));
  }
  return midpoint_step(state, model, dt, extrap);
}

StepResult step_multi(const RavState& state, const Model& model, double dt) {
  if (model.n_fields() < 2) throw ConfigError("step_multi needs a model with several fields");
  return step_cn(state, model, dt);
}

StepResult step_bdf(int k, const RavState& state, const Model& model, double dt) {
  const BdfCoefficients c = bdf_coefficients(k);
  check_dt(dt);
  const auto depth = static_cast<std::size_t>(k - 1);
  if (state.history.size() < depth) {
    throw StartupError("BDF-" + std::to_string(k) + " needs " + std::to_string(depth) +
                       " previous states; call startup_bdf first");
  }
  debug_check_cache(state, model);

  // Level j = 0 is the current state, j >= 1 the history.
  auto phi_at = [&](std::size_t j, std::size_t i) -> const Field& {
    return j == 0 ? state.phi[i] : state.history[j - 1].phi[i];
  };
  auto phibar_at = [&](std::size_t j, std::size_t i) -> const Field& {
    return j == 0 ? state.phibar[i] : state.history[j - 1].phibar[i];
  };
  double r_weighted = 0.0;
  double e_weighted = 0.0;
  for (std::size_t j = 0; j <= depth; ++j) {
    const double r = j == 0 ? state.r : state.history[j - 1].r;
    const double e = j == 0 ? state.E : state.history[j - 1].E;
    r_weighted += c.a[j] / c.alpha * r;
    e_weighted += c.a[j] / c.alpha * e;
  }

  std::vector<Spectrum> prev_hat;
  std::vector<Field> extrap;
  for (std::size_t i = 0; i < state.phi.size(); ++i) {
    Field a = (c.a[0] / c.alpha) * phi_at(0, i);
    Field b = c.b[0] * phibar_at(0, i);
    for (std::size_t j = 1; j <= depth; ++j) {
      a = axpby(1.0, a, c.a[j] / c.alpha, phi_at(j, i));
      b = axpby(1.0, b, c.b[j], phibar_at(j, i));
    }
    prev_hat.push_back(forward(a));
    extrap.push_back(std::move(b));
  }

  Solved s = solve_linear(model, spectra(state.phi), prev_hat, extrap, 1.0, dt / c.alpha, dt,
                          state.n + 1);
  const double base = r_weighted + s.mu_increment + e_weighted + s.dissipation / c.alpha;
  return finalize(state, model, std::move(s.phi), dt, s.dissipation, r_weighted,
                  [&](double, double e_new) { return base - e_new; });
}

RavState startup_bdf(int k, const RavState& state0, const Model& model, double dt) {
  bdf_coefficients(k);
  check_dt(dt);
  constexpr int kSub = 4;
  const double h = dt / kSub;
  const int macro_steps = k - 1;

  std::vector<RavState> macro{state0};
  // Predictor-corrector first substep: backward Euler predicts phi^1, the
  // midpoint step then uses (phibar^0 + phi~^1) / 2.
  const std::vector<Field> predicted = first_step(state0, model, h).state.phi;
  std::vector<Field> mid;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    mid.push_back(axpby(0.5, state0.phibar[i], 0.5, predicted[i]));
  }
  RavState cur = midpoint_step(state0, model, h, mid).state;
  for (int sub = 2; sub <= kSub * macro_steps; ++sub) {
    cur = step_cn(cur, model, h).state;
    if (sub % kSub == 0) macro.push_back(cur);
  }

  RavState out = macro.back();
  out.n = state0.n + macro_steps;
  out.t = state0.t + macro_steps * dt;
  out.history.clear();
  for (int j = macro_steps - 1; j >= 0; --j) {
    const RavState& m = macro[static_cast<std::size_t>(j)];
    out.history.push_back(RavHistoryEntry{m.phi, m.phibar, m.r, m.E});
  }
  for (const auto& e : state0.history) {
    if (out.history.size() >= kRavHistoryDepth) break;
    out.history.push_back(e);
  }
  return out;
}

}  // namespace ravflow
