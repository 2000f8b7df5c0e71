#pragma once

#include "hazard/run_config.hpp"
#include "hazard/verification.hpp"

#include <string>
#include <vector>

namespace hazard::run {

// Per-path martingale statistics for a verification config, parallel across
// paths with one RNG stream per (seed, path index). Results are identical for
// any thread count.
struct PathStatSet {
    std::vector<verify::PathStat> stats;
    std::vector<std::string> bucket_names;
    std::string engine;
};
// compensator_model, when given, replaces the model in the compensator
// accumulation only (paths are still simulated from config.model) - the
// negative-control hook for the orthogonality test.
PathStatSet collect_path_stats(const config::RunConfig& config, int threads = 0,
                               const markov::ModelSpec* compensator_model = nullptr);

struct VerifyResult {
    verify::MartingaleReport residual;
    std::vector<verify::OrthogonalityReport> orthogonality;
    std::string engine;
    bool pass = false;
};
VerifyResult run_verify(const config::RunConfig& config, int threads = 0);

struct IntensityCurve {
    std::vector<double> t;
    std::vector<double> lambda;
    std::vector<engine::PathAtom> atoms;
    std::string formula; // which formula produced the curve
};
IntensityCurve run_intensity(const config::RunConfig& config);

struct PathSummary {
    std::size_t index = 0;
    double tau = markov::kNever;
    bool tau_at_jump = false;
    std::size_t n_windows = 0;
    std::size_t n_observations = 0;
};
struct SimulateResult {
    std::vector<PathSummary> paths;
    double default_fraction = 0.0;
};
SimulateResult run_simulate(const config::RunConfig& config, int threads = 0);

// Deterministic writers ("%.17g" floats, fixed key order).
void write_verify_outputs(const VerifyResult& result, const config::RunConfig& config);
void write_intensity_outputs(const IntensityCurve& curve, const config::RunConfig& config);
void write_simulate_outputs(const SimulateResult& result, const config::RunConfig& config);

} // namespace hazard::run
