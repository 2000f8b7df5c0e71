#include "hazard/levy_system.hpp"

#include <algorithm>
#include <cmath>

namespace hazard::levy {

LevySystemSpec LevySystemSpec::for_chain(const markov::GeneratorMatrix& gen,
                                         const std::vector<int>& target_regimes) {
    LevySystemSpec spec;
    spec.generator = gen;
    auto targets = target_regimes;
    spec.in_target = [targets](double, int regime) {
        return std::find(targets.begin(), targets.end(), regime) != targets.end();
    };
    // A finite chain holds in every state for a positive time, so off-target
    // states never enter instantly.
    spec.boundary_entry = [](double, int) { return 0.0; };
    return spec;
}

LevySystemSpec LevySystemSpec::for_default_region(const markov::ModelSpec& model) {
    LevySystemSpec spec;
    spec.generator = model.generator;
    const double barrier = model.barrier;
    spec.in_target = [barrier](double x, int regime) { return regime == 0 && x < barrier; };
    // P_(y,0)(tau = 0) vanishes for y > barrier by path continuity; the
    // boundary set {X = barrier} is Lebesgue-null along paths and is dropped.
    spec.boundary_entry = [barrier](double x, int regime) {
        return (regime == 0 && x < barrier) ? 1.0 : 0.0;
    };
    return spec;
}

engine::CompensatorPath chain_hit_compensator(const LevySystemSpec& spec,
                                              const std::vector<markov::RegimeSegment>& segments,
                                              const std::vector<int>& target_regimes, double t_max) {
    engine::CompensatorPath path;
    auto in_set = [&](int r) {
        return std::find(target_regimes.begin(), target_regimes.end(), r) != target_regimes.end();
    };
    if (segments.empty() || in_set(segments.front().regime)) {
        // tau = 0 at the start is not a jump hit; the totally inaccessible part
        // is empty.
        path.knots = {0.0, t_max};
        path.density = {0.0, 0.0};
        return path;
    }
    double tau = t_max;
    for (std::size_t k = 1; k < segments.size(); ++k)
        if (in_set(segments[k].regime)) {
            tau = std::min(tau, segments[k].start);
            break;
        }

    for (const auto& seg : segments) {
        const double a = seg.start;
        if (a >= std::min(tau, t_max)) break;
        const double b = std::min({seg.end, tau, t_max});
        double rate = 0.0;
        for (int j : target_regimes)
            if (j != seg.regime) rate += spec.generator.rate(seg.regime, j);
        path.knots.push_back(a);
        path.density.push_back(rate);
        path.knots.push_back(b);
        path.density.push_back(rate);
    }
    if (!path.knots.empty() && path.knots.back() < t_max) {
        path.knots.push_back(path.knots.back());
        path.density.push_back(0.0);
        path.knots.push_back(t_max);
        path.density.push_back(0.0);
    }
    return path;
}

double intensity_default_region(const markov::ModelSpec& model, double x_t, int regime_t) {
    if (regime_t == 0) return 0.0;
    if (x_t > model.barrier) return 0.0;
    return model.generator.rate(regime_t, 0);
}

} // namespace hazard::levy
