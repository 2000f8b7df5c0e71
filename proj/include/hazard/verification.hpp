#pragma once

#include "hazard/compensator.hpp"
#include "hazard/markov_models.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hazard::verify {

// Statistics of one simulated path, evaluated at the common test times:
// the (possibly infinite) event time, whether the counting process actually
// jumps there, and the stopped compensator A(t ^ tau) per test time.
struct PathStat {
    double event_time = markov::kNever;
    bool event_counted = true; // false when only the totally inaccessible part counts
    std::vector<double> compensator_at;
    int bucket = 0;
    double skipped_mass = 0.0;
};

struct TimePointResult {
    double t = 0.0;
    double mean = 0.0;
    double se = 0.0;
    double z = 0.0;
    bool pass = false;
};

struct MartingaleReport {
    std::vector<TimePointResult> rows;
    std::size_t n_paths = 0;
    double z_max = 3.5;
    double z_effective = 3.5; // after multiple-testing widening
    bool all_pass = false;
    bool inconclusive = false;
    double skipped_mass = 0.0;
};

struct BucketResult {
    std::string label;
    std::size_t count = 0;
    double mean = 0.0;
    double se = 0.0;
    double z = 0.0;
    bool pass = false;
    bool skipped = false; // empty bucket
};

struct OrthogonalityReport {
    double s = 0.0;
    double t = 0.0;
    std::vector<BucketResult> buckets;
    double z_effective = 3.5;
    bool all_pass = false;
};

// Two-sided z threshold after Bonferroni-style widening past 5 simultaneous
// tests, keeping the family error rate of the base threshold.
double widened_z(double z_max, std::size_t n_tests);

// Tests E[1_{tau <= t} - A(t ^ tau)] = 0 at each time. Requires >= 1000 paths.
MartingaleReport martingale_residual_test(const std::vector<PathStat>& paths,
                                          const std::vector<double>& times, double z_max);

// Tests E[(M_t - M_s) | bucket] = 0 per time-s information bucket; buckets are
// the integer labels carried by the paths, named by bucket_names.
OrthogonalityReport orthogonality_test(const std::vector<PathStat>& paths,
                                       const std::vector<double>& times, std::size_t s_index,
                                       std::size_t t_index,
                                       const std::vector<std::string>& bucket_names, double z_max);

// Finite-difference intensity estimator (1/h)(1 - f(u+h)/f(u)) with one
// Richardson step over h and h/2. The independent oracle for -f'/f.
double laplacian_intensity(const std::function<double(double)>& f, double u, double h);

// Finite-difference oracle for a named model intensity on a window: the
// Richardson Laplacian of the window's survival kernel plus, for the jump
// diffusion, the jump-risk term evaluated by adaptive quadrature (independent
// of the fixed-order route used by the production formula).
double fd_intensity_oracle(const markov::ModelSpec& model, const engine::LocalJumpWindow& window,
                           double u, double h);

struct SurvivalEstimate {
    double probability = 0.0;
    double se = 0.0;
    std::size_t n_paths = 0;
};

// Monte Carlo estimate of P_x0(tau > t) with binomial standard error.
// Requires >= 1000 paths; exact 0/1 short-circuits for an absorbed start and
// t = 0.
SurvivalEstimate mc_survival(const markov::ModelSpec& model, double t, std::size_t n_paths,
                             std::uint64_t seed, const markov::SimOptions& options = {},
                             int threads = 0);

} // namespace hazard::verify
