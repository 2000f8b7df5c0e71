#pragma once

#include "hazard/compensator_types.hpp"
#include "hazard/markov_models.hpp"

#include <functional>
#include <vector>

namespace hazard::levy {

// Levy system of a finite-state-chain-driven process: identity clock U_t = t,
// jump kernel given by the generator rows with K(i, {i}) = 0, a target set D
// on the product state, and the boundary-entry probability p0(y) = P_y(tau = 0).
struct LevySystemSpec {
    markov::GeneratorMatrix generator;
    std::function<bool(double x, int regime)> in_target;
    std::function<double(double x, int regime)> boundary_entry; // {0,1}-valued here

    static LevySystemSpec for_chain(const markov::GeneratorMatrix& gen,
                                    const std::vector<int>& target_regimes);
    static LevySystemSpec for_default_region(const markov::ModelSpec& model);
};

// Compensator of the first chain entry into the regime set D along one
// realized pure-chain path: density sum_{j in D} q_{regime(t), j} up to the
// entry time, zero after. A start inside D is not a jump hit and yields the
// zero compensator.
engine::CompensatorPath chain_hit_compensator(const LevySystemSpec& spec,
                                              const std::vector<markov::RegimeSegment>& segments,
                                              const std::vector<int>& target_regimes, double t_max);

// Intensity of the first entry of (X, regime) into (-inf, barrier) x {0}:
// q_{regime,0} while the regime is nonzero and X_t <= barrier, else 0.
double intensity_default_region(const markov::ModelSpec& model, double x_t, int regime_t);

} // namespace hazard::levy
