#include "hazard/gaussian_kernels.hpp"

#include "hazard/errors.hpp"
#include "hazard/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hazard::kernels {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2Pi = 2.5066282746310005024;

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) throw std::domain_error(std::string(name) + " must be finite");
}

void require_psi_domain(double eta, double t, double y) {
    require_finite(eta, "eta");
    require_finite(t, "t");
    require_finite(y, "y");
    if (!(t > 0.0)) throw std::domain_error("psi: t must be > 0");
    if (!(y < 0.0)) throw std::domain_error("psi: y must be < 0");
}

} // namespace

DriftParams DriftParams::from_regime(double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("sigma must be > 0");
    return {mu / sigma - sigma / 2.0};
}

BarrierCoord BarrierCoord::from_prices(double state, double barrier, double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("sigma must be > 0");
    if (!(state > 0.0) || !(barrier > 0.0)) throw std::domain_error("prices must be > 0");
    return {std::log(barrier / state) / sigma};
}

double norm_cdf(double x) {
    require_finite(x, "x");
    return 0.5 * std::erfc(-x / kSqrt2);
}

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double norm_inv(double p) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::domain_error("norm_inv: p must be in (0,1)");
    // Bisection, then Newton polish against norm_cdf.
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (norm_cdf(mid) < p ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const double d = norm_pdf(x);
        if (d <= 0.0) break;
        x -= (norm_cdf(x) - p) / d;
    }
    return x;
}

double psi_closed(double eta, double t, double y) {
    require_psi_domain(eta, t, y);
    const double st = std::sqrt(t);
    return norm_cdf((-y + eta * t) / st) - std::exp(2.0 * eta * y) * norm_cdf((y + eta * t) / st);
}

double psi_quadrature(double eta, double t, double y) {
    require_psi_domain(eta, t, y);
    // First-passage density of the drifted Brownian motion at level y.
    auto density = [eta, y](double s) {
        if (s <= 0.0) return 0.0; // vanishes at s = 0 for y != 0
        const double d = y - eta * s;
        const double e = -d * d / (2.0 * s);
        if (e < -745.0) return 0.0;
        return -y / (kSqrt2Pi * s * std::sqrt(s)) * std::exp(e);
    };
    // The integrand is unimodal; split at its peak region.
    const double peak = (eta != 0.0) ? std::abs(y / eta) : y * y / 3.0;
    const auto r = quad::integrate_adaptive(density, 0.0, t, 1e-10, {peak, y * y / 3.0});
    double p = 1.0 - r.value;
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    return p;
}

double psi_t(double eta, double t, double y) {
    require_psi_domain(eta, t, y);
    const double d = y - eta * t;
    const double e = -d * d / (2.0 * t);
    if (e < -745.0) return 0.0;
    return y / (kSqrt2Pi * t * std::sqrt(t)) * std::exp(e); // y < 0, so <= 0
}

namespace {

double norm_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

// Phi(hi) - Phi(lo) for hi >= lo, evaluated through whichever tail avoids
// cancellation of near-1 values (the difference is later scaled by exp(2 eta y1),
// which can be large).
double cdf_bracket(double hi, double lo) {
    if (hi + lo > 0.0) return norm_sf(lo) - norm_sf(hi);
    return norm_sf(-hi) - norm_sf(-lo);
}

} // namespace

double phi_joint(double eta, double t, double y1, double y2) {
    require_psi_domain(eta, t, y1);
    require_finite(y2, "y2");
    if (y2 < y1) throw std::domain_error("phi_joint: y2 must be >= y1");
    const double st = std::sqrt(t);
    return cdf_bracket((y2 - eta * t) / st, (y1 - eta * t) / st) -
           std::exp(2.0 * eta * y1) *
               cdf_bracket((y2 - 2.0 * y1 - eta * t) / st, (-y1 - eta * t) / st);
}

double gbm_survival(double state, double barrier, double mu, double sigma, double t) {
    if (!(sigma > 0.0)) throw std::domain_error("gbm_survival: sigma must be > 0");
    if (!(t >= 0.0)) throw std::domain_error("gbm_survival: t must be >= 0");
    if (state <= barrier) return 0.0;
    if (t == 0.0) return 1.0;
    const double eta = DriftParams::from_regime(mu, sigma).eta;
    const double y = BarrierCoord::from_prices(state, barrier, sigma).y;
    return psi_closed(eta, t, y);
}

double gbm_survival_dt(double state, double barrier, double mu, double sigma, double t) {
    if (!(sigma > 0.0)) throw std::domain_error("gbm_survival_dt: sigma must be > 0");
    if (state <= barrier) return 0.0;
    const double eta = DriftParams::from_regime(mu, sigma).eta;
    const double y = BarrierCoord::from_prices(state, barrier, sigma).y;
    return psi_t(eta, t, y);
}

} // namespace hazard::kernels
