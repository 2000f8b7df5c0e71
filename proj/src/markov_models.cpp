#include "hazard/markov_models.hpp"

#include "hazard/errors.hpp"
#include "hazard/gaussian_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hazard::markov {

namespace {

constexpr double kTie = 0.0; // deterministic times win exact ties with jump times

int find_regime(const std::vector<RegimeSegment>& segments, double t) {
    for (const auto& s : segments)
        if (t < s.end || &s == &segments.back()) {
            if (t >= s.start) return s.regime;
        }
    return segments.back().regime;
}

} // namespace

GeneratorMatrix GeneratorMatrix::validate(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    if (n == 0) throw validation_error("generator: empty matrix");
    GeneratorMatrix g;
    g.states = n;
    g.q.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw validation_error("generator: row " + std::to_string(i) + " is not length " +
                                   std::to_string(n));
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!std::isfinite(v))
                throw validation_error("generator: entry (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") is not finite");
            if (i != j && v < 0.0)
                throw validation_error("generator: off-diagonal entry (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") is negative");
            sum += v;
            g.q[static_cast<std::size_t>(i) * n + j] = v;
        }
        if (std::abs(sum) > 1e-12)
            throw validation_error("generator: row " + std::to_string(i) + " sums to " +
                                   std::to_string(sum) + ", expected 0");
    }
    return g;
}

GeneratorMatrix GeneratorMatrix::absorbing() {
    GeneratorMatrix g;
    g.states = 1;
    g.q = {0.0};
    return g;
}

double JumpLaw::sample(Rng& rng) const {
    if (type == Type::PointMass) return z0;
    const double z = rng.beta(alpha, beta);
    return std::max(z, 1e-300);
}

void JumpLaw::validate() const {
    if (type == Type::PointMass) {
        if (!(z0 > 0.0) || z0 > 1.0) throw validation_error("jump law: point mass outside (0,1]");
    } else {
        if (!(alpha > 0.0) || !(beta > 0.0))
            throw validation_error("jump law: beta parameters must be > 0");
    }
}

void ModelSpec::validate() const {
    const int n = generator.states;
    if (n == 0) throw validation_error("model: generator is unset");
    if (kind == ModelKind::PlainGbm && n != 1)
        throw validation_error("model: plain GBM requires a 1-state generator");
    if (regime0 < 0 || regime0 >= n) throw validation_error("model: regime0 out of range");
    if (kind != ModelKind::ChainOnly) {
        if (static_cast<int>(mu.size()) != n || static_cast<int>(sigma.size()) != n)
            throw validation_error("model: mu/sigma must have one entry per regime");
        for (double s : sigma)
            if (!(s > 0.0)) throw validation_error("model: sigma must be > 0");
        if (!(barrier > 0.0) || !(x0 > 0.0))
            throw validation_error("model: prices must be > 0");
        if (!(x0 > barrier)) throw validation_error("model: x0 must lie above the barrier");
    }
    if (kind == ModelKind::JumpDiffusion) {
        if (static_cast<int>(jump_laws.size()) != n)
            throw validation_error("model: jump diffusion needs one jump law per regime");
        for (const auto& law : jump_laws) law.validate();
        for (int i = 1; i < n; ++i)
            if (mu[static_cast<std::size_t>(i)] != mu[0] ||
                sigma[static_cast<std::size_t>(i)] != sigma[0])
                throw validation_error(
                    "model: the jump-diffusion price has regime-independent drift and volatility");
    }
    if (tau_kind == TauKind::RegimeHit) {
        if (kind != ModelKind::ChainOnly)
            throw validation_error("model: regime-hit stopping requires a chain-only model");
        if (hit_regimes.empty()) throw validation_error("model: regime-hit target set is empty");
        for (int r : hit_regimes)
            if (r < 0 || r >= n) throw validation_error("model: hit regime out of range");
    }
    if (tau_kind == TauKind::DefaultRegion) {
        if (kind != ModelKind::RegimeSwitching)
            throw validation_error("model: default-region stopping requires a regime-switching model");
        if (regime0 == 0 && x0 < barrier)
            throw validation_error("model: path starts inside the default region");
    }
}

double ModelSpec::eta(int regime) const {
    return kernels::DriftParams::from_regime(mu[static_cast<std::size_t>(regime)],
                                             sigma[static_cast<std::size_t>(regime)])
        .eta;
}

double ModelSpec::log_barrier() const { return std::log(barrier); }

bool ModelSpec::in_hit_set(int regime) const {
    return std::find(hit_regimes.begin(), hit_regimes.end(), regime) != hit_regimes.end();
}

void ObservationSchedule::validate() const {
    // A single time {0} is the degenerate zero-horizon schedule.
    if (times.empty()) throw validation_error("schedule: need at least t_0 = 0");
    if (times.front() != 0.0) throw validation_error("schedule: t_0 must be 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw validation_error("schedule: times must be increasing");
}

ObservationSchedule ObservationSchedule::uniform(double step, double horizon,
                                                 bool observe_regime_jumps) {
    if (!(step > 0.0) || !(horizon >= 0.0))
        throw validation_error("schedule: step must be > 0 and horizon >= 0");
    ObservationSchedule s;
    s.observe_regime_jumps = observe_regime_jumps;
    const int n = static_cast<int>(std::ceil(horizon / step - 1e-9));
    for (int k = 0; k <= n; ++k) s.times.push_back(std::min(step * k, horizon));
    if (s.times.back() < horizon) s.times.push_back(horizon);
    return s;
}

std::vector<RegimeSegment> simulate_chain(const GeneratorMatrix& gen, int start, double horizon,
                                          Rng& rng) {
    if (start < 0 || start >= gen.states) throw std::invalid_argument("simulate_chain: bad start");
    if (!(horizon > 0.0)) return {{0.0, 0.0, start}};
    std::vector<RegimeSegment> segments;
    double t = 0.0;
    int state = start;
    for (;;) {
        const double q = gen.exit_rate(state);
        if (q <= 0.0) { // absorbing
            segments.push_back({t, horizon, state});
            return segments;
        }
        const double hold = rng.exponential(q);
        if (t + hold >= horizon) {
            segments.push_back({t, horizon, state});
            return segments;
        }
        segments.push_back({t, t + hold, state});
        t += hold;
        // Next state j != state with probability q_ij / q.
        double u = rng.uniform() * q;
        int next = state;
        for (int j = 0; j < gen.states; ++j) {
            if (j == state) continue;
            u -= gen.rate(state, j);
            if (u < 0.0) {
                next = j;
                break;
            }
        }
        if (next == state) { // numerical leftover; take the last positive rate
            for (int j = gen.states - 1; j >= 0; --j)
                if (j != state && gen.rate(state, j) > 0.0) {
                    next = j;
                    break;
                }
        }
        state = next;
    }
}

double bridge_nohit_survival(double s, double dt, double a, double b, double sigma) {
    if (s <= 0.0) return 1.0;
    if (s >= dt) s = dt * (1.0 - 1e-14);
    const double v = sigma * std::sqrt(s * (dt - s) / dt);
    const double m = a + (b - a) * s / dt;
    const double n = -a + (a + b) * s / dt;
    return kernels::norm_cdf(m / v) -
           std::exp(-2.0 * a * b / (sigma * sigma * dt)) * kernels::norm_cdf(n / v);
}

namespace {

// Inverts P(hit by s | endpoints, hit by dt) = u.
double sample_crossing_offset(double dt, double a, double b, double sigma, double u) {
    const double q = 1.0 - bridge_nohit_survival(dt * (1.0 - 1e-12), dt, a, b, sigma);
    if (!(q > 0.0)) return 0.5 * dt;
    const double target = 1.0 - u * q; // S(s) is decreasing from 1 to 1-q
    double lo = 0.0, hi = dt;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bridge_nohit_survival(mid, dt, a, b, sigma) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::optional<double> first_passage_detect(double sigma, double t0, double dt, double log_start,
                                           double log_end, double log_barrier, Rng& rng,
                                           bool bridge_correction, bool sample_time) {
    if (!(log_start > log_barrier))
        throw std::invalid_argument("first_passage_detect: start must lie above the barrier");
    const double a = log_start - log_barrier;
    const double b = log_end - log_barrier;
    if (log_end <= log_barrier) {
        rng.uniform(); // keep the per-step draw pattern aligned across barriers
        if (!sample_time) return t0 + 0.5 * dt;
        return t0 + sample_crossing_offset(dt, a, b, sigma, rng.uniform());
    }
    if (!bridge_correction) return std::nullopt;
    const double p = std::exp(-2.0 * a * b / (sigma * sigma * dt));
    // The test uniform is consumed whenever both endpoints are alive, so paths
    // with different barriers stay coupled under a shared seed.
    const double u = rng.uniform();
    if (u >= p) return std::nullopt;
    if (!sample_time) return t0 + 0.5 * dt;
    return t0 + sample_crossing_offset(dt, a, b, sigma, rng.uniform());
}

namespace {

struct PriceState {
    double log_x;
    double tau = kNever;
    bool tau_at_jump = false;
};

} // namespace

SimPath simulate_price_path(const ModelSpec& model, const ObservationSchedule& schedule, Rng& rng,
                            const SimOptions& options) {
    schedule.validate();
    const double horizon = schedule.horizon();
    SimPath path;
    path.horizon = horizon;

    path.segments = (model.kind == ModelKind::PlainGbm)
                        ? std::vector<RegimeSegment>{{0.0, horizon, model.regime0}}
                        : simulate_chain(model.generator, model.regime0, horizon, rng);

    if (model.kind == ModelKind::ChainOnly) {
        // No price dynamics; tau only meaningful for regime hits.
        const double lx = std::log(model.x0);
        for (double tk : schedule.times)
            path.observations.push_back({tk, lx, find_regime(path.segments, tk), true});
        if (model.tau_kind == TauKind::RegimeHit) {
            if (model.in_hit_set(path.segments.front().regime)) {
                path.tau = 0.0; // started inside the target set; not a jump hit
                path.tau_at_jump = false;
            } else {
                for (std::size_t k = 1; k < path.segments.size(); ++k)
                    if (model.in_hit_set(path.segments[k].regime)) {
                        path.tau = path.segments[k].start;
                        path.tau_at_jump = true;
                        break;
                    }
            }
        }
        return path;
    }

    const double log_b = model.log_barrier();
    PriceState st{std::log(model.x0)};
    const bool barrier_watch_all = model.tau_kind == TauKind::BarrierPassage;

    if (barrier_watch_all && st.log_x <= log_b) {
        path.tau = 0.0;
        return path;
    }

    path.grid_times.push_back(0.0);
    path.grid_log_price.push_back(st.log_x);
    path.grid_regime.push_back(path.segments.front().regime);
    path.observations.push_back({0.0, st.log_x, path.segments.front().regime, true});

    std::size_t obs_idx = 1; // schedule.times[0] == 0 already recorded

    for (std::size_t k = 0; k < path.segments.size() && st.tau == kNever; ++k) {
        const RegimeSegment& seg = path.segments[k];
        const int r = seg.regime;
        const double mu = model.mu[static_cast<std::size_t>(r)];
        const double sigma = model.sigma[static_cast<std::size_t>(r)];
        const double drift = mu - 0.5 * sigma * sigma;
        const bool watch = barrier_watch_all || (model.tau_kind == TauKind::DefaultRegion && r == 0);

        if (k > 0) {
            // Regime switch into seg.regime at seg.start.
            if (model.kind == ModelKind::JumpDiffusion) {
                const double xi = model.jump_laws[static_cast<std::size_t>(r)].sample(rng);
                st.log_x += std::log(xi);
                path.jumps.push_back({seg.start, xi});
                path.grid_times.push_back(seg.start);
                path.grid_log_price.push_back(st.log_x);
                path.grid_regime.push_back(r);
                if (barrier_watch_all && st.log_x <= log_b) {
                    st.tau = seg.start; // absorbed exactly at the jump
                    st.tau_at_jump = true;
                }
            }
            if (model.tau_kind == TauKind::DefaultRegion && r == 0 && st.log_x < log_b &&
                st.tau == kNever) {
                st.tau = seg.start; // jumped into the default region
                st.tau_at_jump = true;
            }
            if (schedule.observe_regime_jumps && st.tau == kNever)
                path.observations.push_back({seg.start, st.log_x, r, false});
        }
        if (st.tau != kNever) break;

        // Deterministic observation times interior to this segment.
        std::vector<double> breaks;
        while (obs_idx < schedule.times.size() &&
               schedule.times[obs_idx] <= seg.end + kTie) {
            if (schedule.times[obs_idx] > seg.start) breaks.push_back(schedule.times[obs_idx]);
            ++obs_idx;
        }
        if (breaks.empty() || breaks.back() < seg.end) breaks.push_back(seg.end);

        double t_cur = seg.start;
        for (double t_next : breaks) {
            if (st.tau != kNever) break;
            const double span = t_next - t_cur;
            if (span <= 0.0) {
                t_cur = t_next;
                continue;
            }
            const int n_sub = std::max(1, static_cast<int>(std::ceil(span / options.max_step)));
            const double dt = span / n_sub;
            for (int s = 0; s < n_sub; ++s) {
                const double t0 = t_cur + dt * s;
                const double z = rng.normal();
                const double log_next = st.log_x + drift * dt + sigma * std::sqrt(dt) * z;
                if (watch) {
                    auto crossing = first_passage_detect(sigma, t0, dt, st.log_x, log_next, log_b,
                                                         rng, options.bridge_correction,
                                                         options.sample_crossing_time);
                    if (crossing) {
                        st.tau = *crossing;
                        st.tau_at_jump = false;
                        path.grid_times.push_back(st.tau);
                        path.grid_log_price.push_back(log_b);
                        path.grid_regime.push_back(r);
                        break;
                    }
                }
                st.log_x = log_next;
                path.grid_times.push_back(t0 + dt);
                path.grid_log_price.push_back(st.log_x);
                path.grid_regime.push_back(r);
            }
            if (st.tau != kNever) break;
            t_cur = t_next;
            // Record a deterministic observation landing here. A time that
            // exactly ties a jump resolves as deterministic first: the
            // pre-jump value is recorded now, the post-jump one by the jump
            // branch of the next segment.
            if (std::binary_search(schedule.times.begin(), schedule.times.end(), t_next))
                path.observations.push_back({t_next, st.log_x, r, true});
        }
    }

    path.tau = st.tau;
    path.tau_at_jump = st.tau_at_jump;
    return path;
}

std::vector<engine::LocalJumpWindow> build_windows(const SimPath& path,
                                                   const ObservationSchedule& schedule,
                                                   const ModelSpec& model) {
    if ((model.kind == ModelKind::RegimeSwitching || model.kind == ModelKind::JumpDiffusion) &&
        !schedule.observe_regime_jumps)
        throw validation_error(
            "build_windows: regime-driven models need the regime jumps in the filtration");

    const double t_stop = std::min(path.tau, path.horizon);
    if (!(t_stop > 0.0)) return {};

    std::vector<engine::LocalJumpWindow> windows;
    double survivor = 1.0;
    for (std::size_t i = 0; i < path.observations.size(); ++i) {
        const Observation& obs = path.observations[i];
        const double S = obs.time;
        if (S >= t_stop) break;
        const double T_next =
            (i + 1 < path.observations.size()) ? path.observations[i + 1].time : path.horizon;
        const double T = std::min(T_next, t_stop);
        if (T <= S) continue;

        // Residual time to the next deterministic observation.
        auto it = std::upper_bound(schedule.times.begin(), schedule.times.end(), S);
        const double next_tk = (it != schedule.times.end()) ? *it : path.horizon;

        engine::LocalJumpWindow w;
        w.S = S;
        w.T = T;
        w.state = std::exp(obs.log_price);
        w.regime = obs.regime;
        w.v2 = next_tk - S;
        const double rate =
            (model.kind == ModelKind::PlainGbm) ? 0.0 : model.generator.exit_rate(obs.regime);
        w.law = engine::WindowLaw::truncated_exponential(rate, w.v2);
        w.survivor = survivor;
        windows.push_back(w);

        // Update the running survivor with this window's no-crossing factor
        // (Brownian bridge between the endpoint log prices). For jump-ending
        // windows of the jump-diffusion model the pre-jump endpoint comes from
        // the recorded jump mark.
        if (i + 1 < path.observations.size() && T == T_next) {
            const Observation& nxt = path.observations[i + 1];
            double log_end = nxt.log_price;
            if (!nxt.deterministic && model.kind == ModelKind::JumpDiffusion) {
                for (const auto& jm : path.jumps)
                    if (jm.time == nxt.time) {
                        log_end -= std::log(jm.factor);
                        break;
                    }
            }
            const double sigma = model.sigma[static_cast<std::size_t>(obs.regime)];
            const double a = obs.log_price - model.log_barrier();
            const double b = log_end - model.log_barrier();
            if (a > 0.0 && b > 0.0) {
                const double p_cross = std::exp(-2.0 * a * b / (sigma * sigma * (T - S)));
                survivor *= std::max(1.0 - p_cross, 1e-300);
            }
        }
    }
    return windows;
}

} // namespace hazard::markov
