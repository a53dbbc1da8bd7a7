#pragma once

// Relaxed auxiliary variable (RAV) integrators.
//
// The state carries the field(s) phi, the relaxed copies phibar = xi * phi
// used for the explicit nonlinear terms, and a scalar r <= 0 that absorbs
// the mismatch between the linearised update and the true energy. Each step
// computes a functional Q (U_k for BDF, V for several fields) with
//
//   E[phi^{n+1}] - (E[phi^n] + r^n) + Q = 0
//
// up to roundoff, then sets r^{n+1} = min(Q, 0) and
// xi^{n+1} = (E~ + r^{n+1}) / E~ with E~ = E[phi^{n+1}] + C0.

#include <deque>
#include <vector>

#include "ravflow/grid.hpp"
#include "ravflow/models.hpp"

namespace ravflow {

struct RavHistoryEntry {
  std::vector<Field> phi;
  std::vector<Field> phibar;
  double r;
  double E;
};

struct RavState {
  double t = 0.0;
  long n = 0;
  std::vector<Field> phi;
  std::vector<Field> phibar;
  double r = 0.0;
  double xi = 1.0;
  double E = 0.0;   // E[phi]
  double E1 = 0.0;  // nonlinear remainder E1[phi], reused by Q
  std::deque<RavHistoryEntry> history;  // front = previous step
};

inline constexpr std::size_t kRavHistoryDepth = 4;

enum class Branch { Zeroed, Carried };

struct StepReport {
  double Q;           // Q, U_k or V
  double q_minus_rn;  // Q - r^n (for BDF: U_k minus the weighted r history)
  double r_new;
  double dissipation;  // -dt (mu, G mu), summed over fields
  double E_new;
  Branch branch;
};

struct StepResult {
  RavState state;
  StepReport report;
};

/// r^0 = 0, xi^0 = 1, phibar^0 = phi^0. Throws ConfigError if E + C0 <= 0.
RavState initial_state(const Model& model, std::vector<Field> phi0, double t0 = 0.0);

/// 0 for Q >= 0, Q otherwise.
double correct_r(double Q);

/// Backward Euler start with the nonlinear term at phibar^0. Its Q also
/// carries the backward Euler dissipation 1/2 ||phi^1 - phi^0||_l^2.
StepResult first_step(const RavState& state, const Model& model, double dt);

/// Midpoint step with extrapolation 3/2 phibar^n - 1/2 phibar^{n-1}.
StepResult step_cn(const RavState& state, const Model& model, double dt);

/// Midpoint step for models with two or more fields (shared r and xi).
StepResult step_multi(const RavState& state, const Model& model, double dt);

/// BDF-k step, k = 3 or 4. Needs k-1 history entries (see startup_bdf).
StepResult step_bdf(int k, const RavState& state, const Model& model, double dt);

/// Produces the state at t0 + (k-1) dt with k-1 history entries, sampled from
/// a midpoint run with substep dt/4. The very first substep uses a
/// predictor-corrector midpoint step so the start values are third order.
RavState startup_bdf(int k, const RavState& state0, const Model& model, double dt);

}  // namespace ravflow
