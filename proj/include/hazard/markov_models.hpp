#pragma once

#include "hazard/compensator_types.hpp"
#include "hazard/rng.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hazard::markov {

// Transition-rate matrix of the driving chain. Row i holds the rates out of
// state i; q_ii = -sum_{j != i} q_ij, so rows sum to zero.
struct GeneratorMatrix {
    int states = 0;
    std::vector<double> q; // row-major

    double rate(int i, int j) const { return q[static_cast<std::size_t>(i) * states + j]; }
    double exit_rate(int i) const { return -rate(i, i); }

    // Checks off-diagonal nonnegativity and zero row sums (1e-12); throws
    // validation_error naming the offending entry.
    static GeneratorMatrix validate(const std::vector<std::vector<double>>& rows);
    static GeneratorMatrix absorbing(); // 1x1 zero matrix
};

enum class ModelKind { PlainGbm, RegimeSwitching, JumpDiffusion, ChainOnly };

// Which stopping time the simulation monitors.
enum class TauKind {
    BarrierPassage, // first passage of the price below the barrier
    RegimeHit,      // first entry of the chain into a regime set (ChainOnly)
    DefaultRegion   // first entry of (X, regime) into (-inf, barrier) x {0}
};

// Distribution of one downward jump factor on (0, 1].
struct JumpLaw {
    enum class Type { PointMass, Beta };
    Type type = Type::PointMass;
    double z0 = 1.0;    // PointMass
    double alpha = 2.0; // Beta
    double beta = 2.0;

    double sample(Rng& rng) const; // PointMass consumes no randomness
    void validate() const;
};

struct ModelSpec {
    ModelKind kind = ModelKind::PlainGbm;
    GeneratorMatrix generator;
    std::vector<double> mu;    // per regime
    std::vector<double> sigma; // per regime, > 0
    double barrier = 1.0;
    double x0 = 2.0;
    int regime0 = 0;
    std::vector<JumpLaw> jump_laws; // per target regime (JumpDiffusion only)
    TauKind tau_kind = TauKind::BarrierPassage;
    std::vector<int> hit_regimes; // RegimeHit target set

    void validate() const;
    double eta(int regime) const;
    double log_barrier() const;
    bool in_hit_set(int regime) const;
};

struct ObservationSchedule {
    std::vector<double> times; // t_0 = 0, strictly increasing
    bool observe_regime_jumps = true;

    double horizon() const { return times.back(); }
    void validate() const;
    static ObservationSchedule uniform(double step, double horizon,
                                       bool observe_regime_jumps = true);
};

struct RegimeSegment {
    double start = 0.0;
    double end = 0.0;
    int regime = 0;
};

struct JumpMark {
    double time = 0.0;
    double factor = 1.0;
};

// One recorded information update: a deterministic observation time t_k or a
// regime-jump time T_n.
struct Observation {
    double time = 0.0;
    double log_price = 0.0;
    int regime = 0;
    bool deterministic = true;
};

constexpr double kNever = std::numeric_limits<double>::infinity();

struct SimPath {
    std::vector<RegimeSegment> segments;
    std::vector<Observation> observations;
    std::vector<JumpMark> jumps;
    std::vector<double> grid_times; // refined simulation grid up to tau/horizon
    std::vector<double> grid_log_price;
    std::vector<int> grid_regime; // regime over the step ending at grid_times[i]
    double tau = kNever;
    bool tau_at_jump = false; // tau realized at a chain-jump time
    double horizon = 0.0;
};

struct SimOptions {
    double max_step = 1.0 / 64.0;
    bool bridge_correction = true;
    // Sample the within-step crossing time from its exact conditional law
    // (default); false places crossings at the step midpoint, which leaves a
    // small systematic over-accrual of the compensator near the crossing.
    bool sample_crossing_time = true;
};

// Exact continuous-time chain simulation: holding time Exponential(q_i),
// next state j with probability q_ij / q_i. Segments tile [0, horizon].
std::vector<RegimeSegment> simulate_chain(const GeneratorMatrix& gen, int start, double horizon,
                                          Rng& rng);

// P(no barrier hit by step time s | step endpoints), for a log-price step of
// length dt with start/end log-distances a, b to the barrier (a > 0).
double bridge_nohit_survival(double s, double dt, double a, double b, double sigma);

// Within-step first-passage check for one exact GBM increment. Returns the
// crossing time if the step crossed the (log) barrier: certain when the
// endpoint is at or below it, otherwise with the Brownian-bridge probability
// exp(-2 a b / (sigma^2 dt)). Crossing times are sampled from the exact
// conditional hitting-time law (or placed at the step midpoint when
// sample_time is false). Uniform draws are consumed in a fixed pattern per
// alive step so runs sharing a seed stay coupled across barrier changes.
std::optional<double> first_passage_detect(double sigma, double t0, double dt, double log_start,
                                           double log_end, double log_barrier, Rng& rng,
                                           bool bridge_correction = true, bool sample_time = true);

// Simulates one trajectory: exact GBM increments within regime segments on a
// grid refined to max_step, jump factors at regime switches (JumpDiffusion),
// bridge-corrected first-passage detection, all observation times recorded.
SimPath simulate_price_path(const ModelSpec& model, const ObservationSchedule& schedule, Rng& rng,
                            const SimOptions& options = {});

// Splits a path into local jumping windows (S, T] tiling [0, tau ^ horizon],
// with frozen (X_S, regime_S, V_2) and the conditional law of T - S.
std::vector<engine::LocalJumpWindow> build_windows(const SimPath& path,
                                                   const ObservationSchedule& schedule,
                                                   const ModelSpec& model);

} // namespace hazard::markov
