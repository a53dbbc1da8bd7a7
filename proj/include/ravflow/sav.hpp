#pragma once

// Scalar auxiliary variable (SAV) baselines with the same stabilisation as
// the RAV runs. With b = F'(phi_e) / sqrt(int F(phi_e) + C0):
//
//   first order (phi_e = phi^n):
//     (phi^{n+1} - phi^n) / dt = G mu
//     mu = L phi^{n+1} + lambda_s (phi^{n+1} - phi^n) + r^{n+1} b
//     r^{n+1} - r^n = 1/2 (b, phi^{n+1} - phi^n)
//
//   midpoint (phi_e = phi* = 3/2 phi^n - 1/2 phi^{n-1}):
//     mu = L phi^{n+1/2} + lambda_s (phi^{n+1/2} - phi*) + (r^{n+1} + r^n)/2 b
//
// Writing phi^{n+1} = phi_a + s phi_b (s = r^{n+1} or the midpoint value)
// turns each step into two per-mode solves and one scalar equation.
// F is whatever the model leaves outside L: int F = E1 + lambda_s/2 ||phi||^2.

#include <optional>

#include "ravflow/grid.hpp"
#include "ravflow/models.hpp"

namespace ravflow {

struct SavState {
  double t = 0.0;
  long n = 0;
  Field phi;
  std::optional<Field> phi_prev;  // phi^{n-1}, for the midpoint extrapolation
  double r = 0.0;
};

struct SavStepResult {
  SavState state;
  Field mu;  // chemical potential used by the step (for residual checks)
};

/// int F(phi) over the grid, F as defined above. Single-field models.
double sav_bulk_energy(const Model& model, const Field& phi);
/// F'(phi) = N(phi) + lambda_s phi.
Field sav_bulk_force(const Model& model, const Field& phi);

/// r^0 = sqrt(int F(phi0) + C0). Throws ConfigError on a non-positive radicand.
SavState sav_init(const Model& model, Field phi0, double t0 = 0.0);

SavStepResult sav_step_first_order(const SavState& state, const Model& model, double dt);
SavStepResult sav_step_cn(const SavState& state, const Model& model, double dt);

/// |r - sqrt(int F(phi) + C0)|.
double sav_drift(const SavState& state, const Model& model);

/// 1/2 (phi, L phi) + r^2 - C0; equals E[phi] when r is exact.
double sav_modified_energy(const SavState& state, const Model& model);

}  // namespace ravflow
