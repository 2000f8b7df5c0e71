#include "hazard/compensator.hpp"

#include "hazard/errors.hpp"
#include "hazard/gaussian_kernels.hpp"
#include "hazard/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hazard::engine {

namespace {

using kernels::phi_joint;
using kernels::psi_closed;
using kernels::psi_t;

double kernel_f_or_throw(const SurvivalKernel& kernel, double u) {
    const double f = kernel.f(u);
    if (f < kKernelFloor)
        throw singular_kernel_error("survival kernel below floor", u, u);
    return f;
}

// int_0^1 F_j(dz) phi(eta, u, y, y2(z)) with y2(z) = y - log(z)/sigma clamped
// at y (a factor at or above the start state carries no kill risk).
double jump_kill_integral(const markov::JumpLaw& law, double eta, double u, double y, double sigma,
                          bool adaptive, int de_nodes) {
    auto phi_of_z = [&](double z) {
        if (z <= 0.0) return 0.0;
        double y2 = y - std::log(z) / sigma;
        if (y2 < y) y2 = y;
        return phi_joint(eta, u, y, y2);
    };
    if (law.type == markov::JumpLaw::Type::PointMass) return phi_of_z(law.z0);
    if (!adaptive) return quad::integrate_beta_weighted(phi_of_z, law.alpha, law.beta, de_nodes);

    // Adaptive route over the same singularity-removing substitutions.
    const double a = law.alpha, b = law.beta;
    const double lognorm = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    auto left = [&](double w) {
        const double z = std::pow(w, 1.0 / a);
        return std::pow(1.0 - z, b - 1.0) * phi_of_z(z);
    };
    auto right = [&](double w) {
        const double z = 1.0 - std::pow(w, 1.0 / b);
        return std::pow(z, a - 1.0) * phi_of_z(z);
    };
    const double s = quad::integrate_adaptive(left, 0.0, std::pow(0.5, a), 1e-11).value / a +
                     quad::integrate_adaptive(right, 0.0, std::pow(0.5, b), 1e-11).value / b;
    return s * std::exp(-lognorm);
}

SurvivalKernel gbm_kernel(double eta, double y) {
    SurvivalKernel k;
    k.f = [eta, y](double u) { return u <= 0.0 ? 1.0 : psi_closed(eta, u, y); };
    k.f_u = [eta, y](double u) { return u <= 0.0 ? 0.0 : psi_t(eta, u, y); };
    k.h = [](double) { return 0.0; };
    return k;
}

} // namespace

SurvivalKernel SurvivalKernel::gbm(double eta, double y) {
    if (!(y < 0.0)) throw std::domain_error("gbm kernel: y must be < 0");
    return gbm_kernel(eta, y);
}

double jump_kill_given_jump(const markov::ModelSpec& model, const LocalJumpWindow& window,
                            double u, bool adaptive_quadrature, int de_nodes) {
    const int r = window.regime;
    const double q = model.generator.exit_rate(r);
    if (q <= 0.0) return 0.0;
    const double sigma = model.sigma[static_cast<std::size_t>(r)];
    const double eta = model.eta(r);
    const double y = std::log(model.barrier / window.state) / sigma;
    double acc = 0.0;
    for (int j = 0; j < model.generator.states; ++j) {
        if (j == r) continue;
        const double qrj = model.generator.rate(r, j);
        if (qrj <= 0.0) continue;
        acc += qrj / q *
               jump_kill_integral(model.jump_laws[static_cast<std::size_t>(j)], eta, u, y, sigma,
                                  adaptive_quadrature, de_nodes);
    }
    return acc;
}

SurvivalKernel kernel_for(const markov::ModelSpec& model, const LocalJumpWindow& window) {
    if (model.kind == markov::ModelKind::ChainOnly)
        throw std::invalid_argument("kernel_for: chain-only models have no survival kernel");
    const int r = window.regime;
    const double sigma = model.sigma[static_cast<std::size_t>(r)];
    const double eta = model.eta(r);
    if (!(window.state > model.barrier))
        throw std::invalid_argument("kernel_for: window state must lie above the barrier");
    const double y = std::log(model.barrier / window.state) / sigma;
    SurvivalKernel k = gbm_kernel(eta, y);
    if (model.kind == markov::ModelKind::JumpDiffusion) {
        // Kill-at-jump gap: f(u-) - P(tau > u | window ends at u). It vanishes
        // at the deterministic endpoint v2, where ending the window carries no
        // jump.
        const double v2 = window.v2;
        const markov::ModelSpec* m = &model;
        LocalJumpWindow w = window;
        k.h = [m, w, v2](double u) {
            if (u <= 0.0 || u >= v2) return 0.0;
            return jump_kill_given_jump(*m, w, u, /*adaptive=*/true);
        };
    }
    return k;
}

double azema_z(const LocalJumpWindow& window, const SurvivalKernel& kernel, double t) {
    if (t < window.S || t >= window.T)
        throw std::invalid_argument("azema_z: t must lie in [S, T)");
    const double z = kernel.f(t - window.S) * window.survivor;
    return std::clamp(z, 0.0, 1.0);
}

double eq5_density(const LocalJumpWindow& window, const SurvivalKernel& kernel, double u) {
    if (!(u >= 0.0) || u > window.length() * (1.0 + 1e-12))
        throw std::invalid_argument("eq5_density: offset outside (0, T - S]");
    const double f = kernel_f_or_throw(kernel, u);
    double dens = -kernel.f_u(u) / f;
    const double kappa = window.law.density(u);
    if (kappa > 0.0) {
        const double surv = window.law.survival(u);
        if (surv <= 0.0)
            throw numerical_error("eq5_density: window law survival vanished before its density", 0.0);
        dens += kernel.h(u) / f * (kappa / surv);
    }
    return dens;
}

CompensatorPath general_compensator_eq5(const LocalJumpWindow& window, const SurvivalKernel& kernel,
                                        int n_knots) {
    window.validate();
    if (n_knots < 2) throw std::invalid_argument("general_compensator_eq5: need >= 2 knots");
    const double L = window.length();

    // Scan for a floored subinterval first so the error can report its extent.
    double bad_lo = -1.0, bad_hi = -1.0;
    for (int i = 0; i < n_knots; ++i) {
        const double u = L * i / (n_knots - 1);
        if (kernel.f(u) < kKernelFloor) {
            if (bad_lo < 0.0) bad_lo = u;
            bad_hi = u;
        }
    }
    if (bad_lo >= 0.0)
        throw singular_kernel_error("survival kernel below floor", window.S + bad_lo,
                                    window.S + bad_hi);

    CompensatorPath path;
    path.knots.reserve(static_cast<std::size_t>(n_knots));
    path.density.reserve(static_cast<std::size_t>(n_knots));
    for (int i = 0; i < n_knots; ++i) {
        const double u = L * i / (n_knots - 1);
        path.knots.push_back(window.S + u);
        path.density.push_back(eq5_density(window, kernel, u));
    }
    for (const auto& atom : window.law.atoms) {
        if (!(atom.u > 0.0) || atom.u > L * (1.0 + 1e-12)) continue;
        const double f = kernel_f_or_throw(kernel, atom.u);
        const double surv = window.law.survival(atom.u);
        if (surv <= 0.0) continue; // no conditioning mass left at the atom
        const double mass = kernel.h(atom.u) / f * (atom.p / surv);
        if (mass != 0.0) path.atoms.push_back({window.S + atom.u, mass});
    }
    return path;
}

SupermartingalePath make_azema_path(const LocalJumpWindow& window, const SurvivalKernel& kernel,
                                    int n_knots) {
    window.validate();
    if (n_knots < 2) throw std::invalid_argument("make_azema_path: need >= 2 knots");
    const double L = window.length();
    SupermartingalePath zp;
    zp.times.reserve(static_cast<std::size_t>(n_knots));
    for (int i = 0; i < n_knots; ++i) {
        const double u = L * i / (n_knots - 1);
        const double f = kernel.f(u);
        const double z = std::clamp(f * window.survivor, 0.0, 1.0);
        double da = -kernel.f_u(u) * window.survivor;
        const double kappa = window.law.density(u);
        if (kappa > 0.0) {
            const double surv = window.law.survival(u);
            if (surv > 0.0) da += window.survivor * kernel.h(u) * (kappa / surv);
        }
        zp.times.push_back(window.S + u);
        zp.z.push_back(z);
        zp.z_minus.push_back(z); // f is continuous on the window interior
        zp.da_density.push_back(da);
    }
    for (const auto& atom : window.law.atoms) {
        if (!(atom.u > 0.0) || atom.u > L * (1.0 + 1e-12)) continue;
        const double surv = window.law.survival(atom.u);
        if (surv <= 0.0) continue;
        const double mass = window.survivor * kernel.h(atom.u) * (atom.p / surv);
        if (mass != 0.0) zp.da_atoms.push_back({window.S + atom.u, mass});
    }
    return zp;
}

CompensatorPath jeulin_yor_transform(const SupermartingalePath& zpath, double tau) {
    zpath.validate();
    CompensatorPath out;
    const std::size_t n = zpath.times.size();

    // Scaled density on the input grid, ignoring the stop at tau.
    std::vector<double> scaled(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double zm = zpath.z_minus[i];
        const double da = zpath.da_density[i];
        if (zm <= kZFloor) {
            if (zpath.times[i] > tau) continue;
            // dA should not charge {Z_- = 0}; account for whatever mass sits here.
            double share = 0.0;
            if (i > 0) share += 0.5 * (zpath.times[i] - zpath.times[i - 1]);
            if (i + 1 < n) share += 0.5 * (zpath.times[i + 1] - zpath.times[i]);
            out.skipped_mass += da * share;
            continue;
        }
        scaled[i] = da / zm;
    }

    // Emit knots, freezing exactly at tau (a duplicated knot drops the density
    // to zero there).
    bool stopped = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = zpath.times[i];
        if (t <= tau) {
            out.knots.push_back(t);
            out.density.push_back(scaled[i]);
            continue;
        }
        if (!stopped) {
            if (i > 0 && zpath.times[i - 1] < tau) {
                const double a = zpath.times[i - 1], b = t;
                const double w = (b > a) ? (tau - a) / (b - a) : 0.0;
                out.knots.push_back(tau);
                out.density.push_back(scaled[i - 1] + w * (scaled[i] - scaled[i - 1]));
            }
            if (!out.knots.empty()) {
                out.knots.push_back(out.knots.back());
                out.density.push_back(0.0);
            }
            stopped = true;
        }
        out.knots.push_back(t);
        out.density.push_back(0.0);
    }
    for (const auto& atom : zpath.da_atoms) {
        if (atom.time > tau || atom.mass == 0.0) continue;
        // Z_- at the atom time from the sampled grid.
        const auto it = std::lower_bound(zpath.times.begin(), zpath.times.end(), atom.time);
        double zm;
        if (it == zpath.times.end())
            zm = zpath.z_minus.back();
        else {
            const std::size_t i = static_cast<std::size_t>(it - zpath.times.begin());
            zm = zpath.z_minus[i];
        }
        if (zm <= kZFloor) {
            out.skipped_mass += atom.mass;
            continue;
        }
        out.atoms.push_back({atom.time, atom.mass / zm});
    }
    out.integrity_warning = out.skipped_mass > kSkippedMassWarn;
    return out;
}

double intensity_deterministic_obs(double state_at_obs, const markov::ModelSpec& model, double u) {
    if (!(state_at_obs > model.barrier))
        throw std::invalid_argument("intensity_deterministic_obs: state must lie above the barrier");
    if (!(u > 0.0)) throw std::domain_error("intensity_deterministic_obs: u must be > 0");
    const double mu = model.mu.front();
    const double sigma = model.sigma.front();
    const double f = kernels::gbm_survival(state_at_obs, model.barrier, mu, sigma, u);
    if (f < kKernelFloor) throw singular_kernel_error("survival below floor", u, u);
    return -kernels::gbm_survival_dt(state_at_obs, model.barrier, mu, sigma, u) / f;
}

double intensity_regime_switching(const LocalJumpWindow& window, const markov::ModelSpec& model,
                                  double t) {
    if (!(t > window.S) || t > window.T + 1e-12 * std::max(1.0, std::abs(window.T)))
        throw std::invalid_argument("intensity_regime_switching: t must lie in (S, T]");
    const int r = window.regime;
    const double sigma = model.sigma[static_cast<std::size_t>(r)];
    const double eta = model.eta(r);
    if (!(window.state > model.barrier))
        throw std::invalid_argument("intensity_regime_switching: state must lie above the barrier");
    const double y = std::log(model.barrier / window.state) / sigma;
    const double u = t - window.S;
    const double f = psi_closed(eta, u, y);
    if (f < kKernelFloor) throw singular_kernel_error("survival below floor", u, u);
    return -psi_t(eta, u, y) / f;
}

double intensity_jump_diffusion(const LocalJumpWindow& window, const markov::ModelSpec& model,
                                double t) {
    if (!(t > window.S) || t > window.T + 1e-12 * std::max(1.0, std::abs(window.T)))
        throw std::invalid_argument("intensity_jump_diffusion: t must lie in (S, T]");
    const int r = window.regime;
    const double sigma = model.sigma[static_cast<std::size_t>(r)];
    const double eta = model.eta(r);
    if (!(window.state > model.barrier))
        throw std::invalid_argument("intensity_jump_diffusion: state must lie above the barrier");
    const double y = std::log(model.barrier / window.state) / sigma;
    const double u = t - window.S;
    const double psi = psi_closed(eta, u, y);
    if (psi < kKernelFloor) throw singular_kernel_error("survival below floor", u, u);
    const double diffusion = -psi_t(eta, u, y) / psi;
    const double q = model.generator.exit_rate(r);
    if (q <= 0.0) return diffusion;
    return diffusion + q * jump_kill_given_jump(model, window, u, /*adaptive=*/false) / psi;
}

double intensity_grad_log(const SupermartingalePath& zpath, double t) {
    zpath.validate();
    const std::size_t n = zpath.times.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (zpath.z[i + 1] > zpath.z[i] + 1e-15)
            throw std::invalid_argument("intensity_grad_log: Z must be nonincreasing");
    if (t < zpath.times.front() || t > zpath.times.back())
        throw std::invalid_argument("intensity_grad_log: t outside the sampled grid");
    // Interpolate -Z' (= da_density) and Z at t.
    auto interp = [&](const std::vector<double>& v) {
        auto it = std::upper_bound(zpath.times.begin(), zpath.times.end(), t);
        if (it == zpath.times.begin()) return v.front();
        if (it == zpath.times.end()) return v.back();
        const std::size_t i = static_cast<std::size_t>(it - zpath.times.begin()) - 1;
        const double a = zpath.times[i], b = zpath.times[i + 1];
        if (b <= a) return v[i + 1];
        const double w = (t - a) / (b - a);
        return v[i] + w * (v[i + 1] - v[i]);
    };
    const double z = interp(zpath.z);
    if (z <= kZFloor) throw singular_kernel_error("Z below floor", t, t);
    return interp(zpath.da_density) / z;
}

} // namespace hazard::engine
