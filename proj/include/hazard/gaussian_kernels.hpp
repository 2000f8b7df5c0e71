#pragma once

namespace hazard::kernels {

// Drift of the unit-volatility Brownian motion driving a regime's log price:
// eta = mu/sigma - sigma/2.
struct DriftParams {
    double eta = 0.0;
    static DriftParams from_regime(double mu, double sigma);
};

// Log-distance from the current state to the barrier, y = log(barrier/state)/sigma.
// The first-passage functionals below are defined for y < 0 only; callers must
// short-circuit states at or below the barrier themselves (gbm_survival does).
struct BarrierCoord {
    double y = 0.0;
    static BarrierCoord from_prices(double state, double barrier, double sigma);
};

double norm_cdf(double x);
double norm_pdf(double x);
double norm_inv(double p);

// P(inf_{s<=t} W_s + eta*s > y) for y < 0.
//
// psi_closed evaluates the reflection closed form
//   Phi((-y+eta t)/sqrt(t)) - exp(2 eta y) Phi((y+eta t)/sqrt(t));
// psi_quadrature integrates the first-passage density
//   1 - int_0^t |y|/sqrt(2 pi s^3) exp(-(y-eta s)^2/(2s)) ds
// adaptively to 1e-10 absolute. The two are each other's oracle.
double psi_closed(double eta, double t, double y);
double psi_quadrature(double eta, double t, double y);

// d/dt of psi: -|y|/sqrt(2 pi t^3) exp(-(y-eta t)^2/(2t)), always <= 0.
double psi_t(double eta, double t, double y);

// P(inf_{s<=t} W_s + eta*s > y1, W_t + eta*t <= y2) for y1 < 0, y1 <= y2.
double phi_joint(double eta, double t, double y1, double y2);

// P_state(first passage below barrier > t) for GBM with drift mu, volatility
// sigma; equals psi with eta = mu/sigma - sigma/2 and y = log(barrier/state)/sigma.
// Returns 0 when state <= barrier, 1 at t = 0 above the barrier.
double gbm_survival(double state, double barrier, double mu, double sigma, double t);
double gbm_survival_dt(double state, double barrier, double mu, double sigma, double t);

} // namespace hazard::kernels
