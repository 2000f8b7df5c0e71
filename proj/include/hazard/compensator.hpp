#pragma once

#include "hazard/compensator_types.hpp"
#include "hazard/markov_models.hpp"

namespace hazard::engine {

// Floors. The theory only guarantees that dA does not charge {Z_- = 0};
// numerically a floor has to be chosen, and skipped mass is reported.
inline constexpr double kKernelFloor = 1e-12; // f below this is singular
inline constexpr double kZFloor = 1e-12;      // Z_- below this is skipped in the transform
inline constexpr double kSkippedMassWarn = 1e-9;

// Azema supermartingale on a window: Z_t = f(X_S, V_2, t - S) * P(tau > S | F_S)
// for S <= t < T.
double azema_z(const LocalJumpWindow& window, const SurvivalKernel& kernel, double t);

// Compensator density at offset u in (0, T - S]:
//   -f'(u)/f(u) + (h(u)/f(u)) * kappa(u) / P(T - S >= u).
double eq5_density(const LocalJumpWindow& window, const SurvivalKernel& kernel, double u);

// The general compensator of the window, sampled on n_knots equally spaced
// knots over [S, T], with one atom per law atom inside (0, T - S]. Throws
// singular_kernel_error when f sits below the floor on a subinterval.
CompensatorPath general_compensator_eq5(const LocalJumpWindow& window, const SurvivalKernel& kernel,
                                        int n_knots = 129);

// The extended Jeulin-Yor transform: scales the F-compensator increments of Z
// by 1/Z_- up to tau. Increments at floored Z_- are skipped and their mass is
// accumulated into skipped_mass (warning flag above kSkippedMassWarn).
CompensatorPath jeulin_yor_transform(const SupermartingalePath& zpath, double tau);

// Samples Z and its F-compensator over one window from the analytic kernel;
// feeding the result to jeulin_yor_transform reproduces general_compensator_eq5.
SupermartingalePath make_azema_path(const LocalJumpWindow& window, const SurvivalKernel& kernel,
                                    int n_knots = 129);

// Named intensities.

// Deterministic observation times only: -f'(x, u)/f(x, u) with f the GBM
// first-passage survival, u the time since the last observation.
double intensity_deterministic_obs(double state_at_obs, const markov::ModelSpec& model, double u);

// Regime-switching first passage: -psi_t/psi at the frozen regime's drift and
// log-distance. Equals eq5 with h == 0.
double intensity_regime_switching(const LocalJumpWindow& window, const markov::ModelSpec& model,
                                  double t);

// Jump diffusion: -psi_t/psi plus the jump-risk term
//   sum_{j != r} q_rj [ int_0^1 F_j(dz) phi(eta, u, y, y2(z)) ] / psi(eta, u, y).
double intensity_jump_diffusion(const LocalJumpWindow& window, const markov::ModelSpec& model,
                                double t);

// Grad-log intensity -Z'/Z for a continuous nonincreasing Z sampled with its
// derivative (da_density = -Z').
double intensity_grad_log(const SupermartingalePath& zpath, double t);

// Kill probability at a chain jump happening u after the window start,
// conditional on the jump: sum_j (q_rj / q_r) int F_j(dz) phi(...). The
// fixed-order route is the production path; the adaptive route is kept as an
// independent cross-check of the inner integral. de_nodes trades accuracy for
// speed on the fixed route (192 ~ 1e-11, 96 ~ 1e-6 in the worst corners).
double jump_kill_given_jump(const markov::ModelSpec& model, const LocalJumpWindow& window,
                            double u, bool adaptive_quadrature = false, int de_nodes = 192);

// Survival kernel implied by the model for one window.
SurvivalKernel kernel_for(const markov::ModelSpec& model, const LocalJumpWindow& window);

} // namespace hazard::engine
