#include "hazard/compensator_types.hpp"

#include "hazard/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hazard::engine {

WindowLaw WindowLaw::truncated_exponential(double rate, double v2) {
    if (!(rate >= 0.0)) throw std::domain_error("window law: rate must be >= 0");
    if (!(v2 > 0.0)) throw std::domain_error("window law: v2 must be > 0");
    WindowLaw law;
    law.density = [rate, v2](double u) {
        if (u <= 0.0 || u >= v2) return 0.0;
        return rate * std::exp(-rate * u);
    };
    law.survival = [rate, v2](double u) {
        if (u <= 0.0) return 1.0;
        if (u > v2) return 0.0;
        return std::exp(-rate * u);
    };
    law.atoms = {{v2, std::exp(-rate * v2)}};
    return law;
}

WindowLaw WindowLaw::deterministic(double v2) { return truncated_exponential(0.0, v2); }

void LocalJumpWindow::validate() const {
    if (!(T > S)) throw validation_error("window: T must exceed S");
    if (!(v2 > 0.0)) throw validation_error("window: v2 must be > 0");
    if (T - S > v2 * (1.0 + 1e-12) + 1e-12)
        throw validation_error("window: length exceeds the residual deterministic time v2");
    if (!(state > 0.0)) throw validation_error("window: state must be > 0");
    if (!(survivor > 0.0) || survivor > 1.0)
        throw validation_error("window: survivor must be in (0,1]");
    if (!law.density || !law.survival) throw validation_error("window: law is unset");
    for (const auto& a : law.atoms)
        if (!(a.p > 0.0) || a.p > 1.0) throw validation_error("window: atom mass outside (0,1]");
}

SurvivalKernel SurvivalKernel::exponential(double lambda) {
    SurvivalKernel k;
    k.f = [lambda](double u) { return u <= 0.0 ? 1.0 : std::exp(-lambda * u); };
    k.f_u = [lambda](double u) { return u <= 0.0 ? -lambda : -lambda * std::exp(-lambda * u); };
    k.h = [](double) { return 0.0; };
    return k;
}

double CompensatorPath::value_at(double t) const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = knots[i], b = knots[i + 1];
        if (a >= t) break;
        const double hi = std::min(b, t);
        if (hi <= a) continue;
        double db = density[i + 1];
        if (hi < b && b > a) { // partial interval: interpolate the right density
            const double w = (hi - a) / (b - a);
            db = density[i] + w * (density[i + 1] - density[i]);
        }
        acc += 0.5 * (density[i] + db) * (hi - a);
    }
    for (const auto& atom : atoms)
        if (atom.time <= t) acc += atom.mass;
    return acc;
}

double CompensatorPath::density_at(double t) const {
    if (knots.empty()) return 0.0;
    if (t <= knots.front()) return density.front();
    if (t >= knots.back()) return density.back();
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
    const double a = knots[i], b = knots[i + 1];
    if (b <= a) return density[i + 1];
    const double w = (t - a) / (b - a);
    return density[i] + w * (density[i + 1] - density[i]);
}

void SupermartingalePath::validate() const {
    const std::size_t n = times.size();
    if (n == 0) throw validation_error("supermartingale path: empty grid");
    if (z.size() != n || z_minus.size() != n || da_density.size() != n)
        throw validation_error("supermartingale path: mismatched array sizes");
    for (std::size_t i = 0; i < n; ++i) {
        if (z[i] < 0.0 || z[i] > 1.0 || z_minus[i] < 0.0 || z_minus[i] > 1.0)
            throw validation_error("supermartingale path: Z outside [0,1]");
        if (da_density[i] < 0.0) throw validation_error("supermartingale path: dA density < 0");
        if (i > 0 && times[i] < times[i - 1])
            throw validation_error("supermartingale path: times not sorted");
    }
    for (const auto& a : da_atoms)
        if (a.mass < 0.0) throw validation_error("supermartingale path: atom mass < 0");
}

} // namespace hazard::engine
