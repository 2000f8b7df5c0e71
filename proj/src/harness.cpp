#include "hazard/harness.hpp"

#include "hazard/compensator.hpp"
#include "hazard/errors.hpp"
#include "hazard/gaussian_kernels.hpp"
#include "hazard/levy_system.hpp"
#include "hazard/parallel.hpp"
#include "hazard/quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace hazard::run {

namespace {

using config::Engine;
using config::RunConfig;
using markov::ModelKind;
using verify::PathStat;

int regime_at(const std::vector<markov::RegimeSegment>& segments, double t) {
    for (const auto& s : segments)
        if (t < s.end) return t >= s.start ? s.regime : segments.front().regime;
    return segments.back().regime;
}

// A(t) along one path of a barrier-passage model: per window, the exact
// antiderivative of -f'/f is log f(u1) - log f(u2); the jump-diffusion
// jump-risk density is integrated by a fixed rule.
double window_compensator_at(const std::vector<engine::LocalJumpWindow>& windows,
                             const markov::ModelSpec& model, double tau, double t) {
    double acc = 0.0;
    const double stop = std::min(t, tau);
    for (const auto& w : windows) {
        if (w.S >= stop) break;
        const double u_end = std::min(w.T, stop) - w.S;
        if (u_end <= 0.0) continue;
        const int r = w.regime;
        const double sigma = model.sigma[static_cast<std::size_t>(r)];
        const double eta = model.eta(r);
        const double y = std::log(model.barrier / w.state) / sigma;
        const double f_end = kernels::psi_closed(eta, u_end, y);
        if (f_end < engine::kKernelFloor)
            throw singular_kernel_error("path survival kernel below floor", w.S, w.S + u_end);
        acc += -std::log(f_end);
        if (model.kind == ModelKind::JumpDiffusion) {
            const double q = model.generator.exit_rate(r);
            if (q > 0.0) {
                // The jump-risk density is smooth on the window; a fixed
                // 16-node rule with a coarse inner grid is accurate far below
                // the Monte Carlo noise this feeds into.
                auto jump_density = [&](double u) {
                    return q * engine::jump_kill_given_jump(model, w, u, false, 64) /
                           kernels::psi_closed(eta, std::max(u, 1e-14), y);
                };
                acc += quad::integrate_gauss_legendre(jump_density, 0.0, u_end, 12);
            }
        }
    }
    return acc;
}

PathStatSet collect_chain_hit(const RunConfig& config, int threads) {
    const auto& model = config.model;
    const double horizon = config.schedule.horizon();
    const auto spec = levy::LevySystemSpec::for_chain(model.generator, model.hit_regimes);
    const double s_bucket = config.times.front();

    std::vector<PathStat> stats(config.n_paths);
    parallel_for(config.n_paths, threads, [&](std::size_t i) {
        Rng rng = Rng::for_path(config.seed, i);
        const auto segments = markov::simulate_chain(model.generator, model.regime0, horizon, rng);
        const auto comp =
            levy::chain_hit_compensator(spec, segments, model.hit_regimes, horizon);
        PathStat st;
        st.event_time = markov::kNever;
        for (std::size_t k = 1; k < segments.size(); ++k)
            if (model.in_hit_set(segments[k].regime)) {
                st.event_time = segments[k].start;
                break;
            }
        if (model.in_hit_set(segments.front().regime)) {
            st.event_time = 0.0;
            st.event_counted = false; // a start inside D is not a jump hit
        }
        for (double t : config.times)
            st.compensator_at.push_back(comp.value_at(t) * config.bias_factor);
        st.bucket = (st.event_time <= s_bucket) ? model.generator.states
                                                : regime_at(segments, s_bucket);
        stats[i] = st;
    });

    PathStatSet out;
    out.stats = std::move(stats);
    for (int r = 0; r < model.generator.states; ++r)
        out.bucket_names.push_back("regime" + std::to_string(r));
    out.bucket_names.push_back("stopped");
    out.engine = "chain-hit";
    return out;
}

PathStatSet collect_barrier_passage(const RunConfig& config, int threads,
                                    const markov::ModelSpec* compensator_model) {
    const auto& model = config.model;
    const auto& a_model = compensator_model ? *compensator_model : config.model;
    const double s_bucket = config.times.front();

    struct Raw {
        PathStat st;
        double state_s = 0.0;
        int regime_s = 0;
    };
    std::vector<Raw> raw(config.n_paths);
    parallel_for(config.n_paths, threads, [&](std::size_t i) {
        Rng rng = Rng::for_path(config.seed, i);
        const auto path = markov::simulate_price_path(model, config.schedule, rng, config.sim_options);
        const auto windows = markov::build_windows(path, config.schedule, model);
        Raw r;
        r.st.event_time = path.tau;
        for (double t : config.times)
            r.st.compensator_at.push_back(window_compensator_at(windows, a_model, path.tau, t) *
                                          config.bias_factor);
        // Frozen information at the bucket time: the window containing it.
        for (const auto& w : windows)
            if (w.S <= s_bucket && s_bucket < w.T) {
                r.state_s = w.state;
                r.regime_s = w.regime;
                break;
            }
        raw[i] = r;
    });

    // Deciles of the frozen state among surviving paths (deterministic: fixed
    // path order, pooled sort).
    std::vector<double> states;
    for (const auto& r : raw)
        if (r.st.event_time > s_bucket && r.state_s > 0.0) states.push_back(r.state_s);
    std::sort(states.begin(), states.end());
    auto decile_of = [&](double x) {
        if (states.empty()) return 0;
        const auto pos = std::lower_bound(states.begin(), states.end(), x) - states.begin();
        int d = static_cast<int>(10.0 * static_cast<double>(pos) / static_cast<double>(states.size()));
        return std::min(d, 9);
    };

    const int J = model.generator.states;
    PathStatSet out;
    out.engine = config::engine_name(config::resolve_engine(config));
    for (int r = 0; r < J; ++r)
        for (int d = 0; d < 10; ++d)
            out.bucket_names.push_back("regime" + std::to_string(r) + "-d" + std::to_string(d));
    out.bucket_names.push_back("stopped");
    out.stats.reserve(config.n_paths);
    for (auto& r : raw) {
        if (r.st.event_time <= s_bucket || r.state_s <= 0.0)
            r.st.bucket = J * 10;
        else
            r.st.bucket = r.regime_s * 10 + decile_of(r.state_s);
        out.stats.push_back(std::move(r.st));
    }
    return out;
}

PathStatSet collect_default_region(const RunConfig& config, int threads) {
    const auto& model = config.model;
    const double s_bucket = config.times.front();

    std::vector<PathStat> stats(config.n_paths);
    std::vector<int> regime_s(config.n_paths, 0);
    parallel_for(config.n_paths, threads, [&](std::size_t i) {
        Rng rng = Rng::for_path(config.seed, i);
        const auto path = markov::simulate_price_path(model, config.schedule, rng, config.sim_options);
        PathStat st;
        st.event_time = path.tau;
        st.event_counted = path.tau_at_jump; // only the totally inaccessible part counts

        // A(t ^ tau) by walking the grid; the region intensity is constant on
        // each step up to the endpoint indicator, which is averaged.
        const std::size_t n = path.grid_times.size();
        std::vector<double> at(config.times.size(), 0.0);
        double acc = 0.0;
        std::size_t next_time = 0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double a = path.grid_times[k], b = path.grid_times[k + 1];
            if (b <= a) continue;
            const int r = path.grid_regime[k + 1]; // regime over (a, b]
            const double lam = levy::intensity_default_region(model, std::exp(path.grid_log_price[k]), r);
            const double lam_b =
                levy::intensity_default_region(model, std::exp(path.grid_log_price[k + 1]), r);
            const double rate = 0.5 * (lam + lam_b);
            while (next_time < config.times.size() && config.times[next_time] <= a + 1e-15) {
                at[next_time] = acc;
                ++next_time;
            }
            while (next_time < config.times.size() && config.times[next_time] < b) {
                at[next_time] = acc + rate * (config.times[next_time] - a);
                ++next_time;
            }
            acc += rate * (b - a);
        }
        for (std::size_t j = next_time; j < config.times.size(); ++j) at[j] = acc;
        for (double& v : at) v *= config.bias_factor;
        st.compensator_at = std::move(at);
        stats[i] = st;
        regime_s[i] = path.segments.empty() ? model.regime0 : regime_at(path.segments, s_bucket);
    });

    PathStatSet out;
    out.engine = "default-region";
    for (int r = 0; r < model.generator.states; ++r)
        out.bucket_names.push_back("regime" + std::to_string(r));
    out.bucket_names.push_back("stopped");
    for (std::size_t i = 0; i < stats.size(); ++i) {
        stats[i].bucket = (stats[i].event_time <= s_bucket) ? model.generator.states : regime_s[i];
        out.stats.push_back(std::move(stats[i]));
    }
    return out;
}

} // namespace

PathStatSet collect_path_stats(const RunConfig& config, int threads,
                               const markov::ModelSpec* compensator_model) {
    const Engine engine = config::resolve_engine(config);
    switch (engine) {
        case Engine::ChainHit: return collect_chain_hit(config, threads);
        case Engine::DefaultRegion: return collect_default_region(config, threads);
        case Engine::JumpDiffusion:
        case Engine::DeterministicObs:
        case Engine::RegimeSwitching:
        case Engine::Eq5Generic:
        case Engine::JyTransform:
            return collect_barrier_passage(config, threads, compensator_model);
        default: throw validation_error("collect_path_stats: unsupported engine");
    }
}

VerifyResult run_verify(const RunConfig& config, int threads) {
    config::validate_for_verify(config);
    PathStatSet set = collect_path_stats(config, threads);
    VerifyResult result;
    result.engine = set.engine;
    result.residual = verify::martingale_residual_test(set.stats, config.times, config.z_max);
    result.pass = result.residual.all_pass;
    if (config.orthogonality && config.times.size() >= 2) {
        auto orth = verify::orthogonality_test(set.stats, config.times, 0, config.times.size() - 1,
                                               set.bucket_names, config.z_max);
        result.pass = result.pass && orth.all_pass;
        result.orthogonality.push_back(std::move(orth));
    }
    return result;
}

IntensityCurve run_intensity(const RunConfig& config) {
    const auto& model = config.model;
    if (model.kind == ModelKind::ChainOnly)
        throw validation_error("run_intensity: chain-only models have no intensity curve; "
                               "use the verify command");
    config::WindowConfig wc = config.window;
    if (!config.window_set) {
        wc.s = config.schedule.times.front();
        wc.t_end = config.schedule.times[1];
    }
    engine::LocalJumpWindow w;
    w.S = wc.s;
    w.T = wc.t_end;
    w.state = wc.state > 0.0 ? wc.state : model.x0;
    w.regime = wc.regime >= 0 ? wc.regime : model.regime0;
    w.v2 = wc.v2 > 0.0 ? wc.v2 : wc.t_end - wc.s;
    w.survivor = wc.survivor;
    const double rate =
        model.kind == ModelKind::PlainGbm ? 0.0 : model.generator.exit_rate(w.regime);
    w.law = engine::WindowLaw::truncated_exponential(rate, w.v2);
    w.validate();

    const Engine engine = config::resolve_engine(config);
    // Survival-kernel engines need a state above the barrier; the region
    // intensity is defined either side of it.
    if (engine != Engine::DefaultRegion && !(w.state > model.barrier))
        throw validation_error("run_intensity: window state must lie above the barrier");
    IntensityCurve curve;
    const int n = wc.points;

    auto named_lambda = [&](double t) -> double {
        switch (engine) {
            case Engine::DeterministicObs:
                return engine::intensity_deterministic_obs(w.state, model, t - w.S);
            case Engine::RegimeSwitching: return engine::intensity_regime_switching(w, model, t);
            case Engine::JumpDiffusion: return engine::intensity_jump_diffusion(w, model, t);
            case Engine::DefaultRegion:
                return levy::intensity_default_region(model, w.state, w.regime);
            default: return 0.0;
        }
    };

    switch (engine) {
        case Engine::DeterministicObs: curve.formula = "-f'/f at the last observed state"; break;
        case Engine::RegimeSwitching: curve.formula = "-psi_t/psi at the frozen regime"; break;
        case Engine::JumpDiffusion:
            curve.formula = "-psi_t/psi plus the jump-risk phi integral";
            break;
        case Engine::DefaultRegion:
            curve.formula = "q_{regime,0} on {regime != 0, X <= barrier}";
            break;
        case Engine::Eq5Generic: curve.formula = "general compensator density"; break;
        case Engine::JyTransform:
            curve.formula = "Jeulin-Yor transform of the analytic Azema path";
            break;
        default: throw validation_error("run_intensity: unsupported engine");
    }

    if (engine == Engine::Eq5Generic || engine == Engine::JyTransform) {
        const auto kernel = engine::kernel_for(model, w);
        const auto path = (engine == Engine::Eq5Generic)
                              ? engine::general_compensator_eq5(w, kernel, n)
                              : engine::jeulin_yor_transform(engine::make_azema_path(w, kernel, n),
                                                             markov::kNever);
        curve.t = path.knots;
        curve.lambda = path.density;
        curve.atoms = path.atoms;
        return curve;
    }

    for (int i = 1; i < n; ++i) {
        const double t = w.S + (w.T - w.S) * i / (n - 1);
        curve.t.push_back(t);
        curve.lambda.push_back(named_lambda(t));
    }
    return curve;
}

SimulateResult run_simulate(const RunConfig& config, int threads) {
    if (!config.seed_set) throw validation_error("config: simulate runs need a 'seed'");
    SimulateResult result;
    result.paths.resize(config.n_paths);
    const auto& model = config.model;
    parallel_for(config.n_paths, threads, [&](std::size_t i) {
        Rng rng = Rng::for_path(config.seed, i);
        PathSummary s;
        s.index = i;
        if (model.kind == ModelKind::ChainOnly) {
            const auto path = markov::simulate_price_path(model, config.schedule, rng);
            s.tau = path.tau;
            s.tau_at_jump = path.tau_at_jump;
            s.n_observations = path.observations.size();
        } else {
            const auto path = markov::simulate_price_path(model, config.schedule, rng,
                                                          config.sim_options);
            s.tau = path.tau;
            s.tau_at_jump = path.tau_at_jump;
            s.n_observations = path.observations.size();
            s.n_windows = markov::build_windows(path, config.schedule, model).size();
        }
        result.paths[i] = s;
    });
    std::size_t defaults = 0;
    for (const auto& p : result.paths)
        if (p.tau <= config.schedule.horizon()) ++defaults;
    result.default_fraction =
        static_cast<double>(defaults) / static_cast<double>(std::max<std::size_t>(1, config.n_paths));
    return result;
}

// ---------------------------------------------------------------------------
// Writers

namespace {

std::string fmt(double v) {
    if (v == markov::kNever) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << content;
}

std::string out_path(const RunConfig& config, const std::string& name) {
    std::filesystem::create_directories(config.out_dir);
    return (std::filesystem::path(config.out_dir) / name).string();
}

nlohmann::ordered_json report_to_json(const verify::MartingaleReport& r) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"t", row.t},
                        {"mean", row.mean},
                        {"se", row.se},
                        {"z", row.z},
                        {"pass", row.pass}});
    return {{"n_paths", r.n_paths},      {"z_max", r.z_max},
            {"z_effective", r.z_effective}, {"all_pass", r.all_pass},
            {"inconclusive", r.inconclusive}, {"skipped_mass", r.skipped_mass},
            {"rows", rows}};
}

} // namespace

void write_verify_outputs(const VerifyResult& result, const RunConfig& config) {
    std::string csv = "format_version,1\nt,mean,se,z,pass\n";
    for (const auto& row : result.residual.rows)
        csv += fmt(row.t) + "," + fmt(row.mean) + "," + fmt(row.se) + "," + fmt(row.z) + "," +
               (row.pass ? "1" : "0") + "\n";
    write_file(out_path(config, "report.csv"), csv);

    nlohmann::ordered_json doc;
    doc["format_version"] = 1;
    doc["command"] = "verify";
    doc["engine"] = result.engine;
    doc["seed"] = config.seed;
    doc["pass"] = result.pass;
    doc["residual"] = report_to_json(result.residual);
    nlohmann::ordered_json orth = nlohmann::ordered_json::array();
    for (const auto& o : result.orthogonality) {
        nlohmann::ordered_json buckets = nlohmann::ordered_json::array();
        for (const auto& b : o.buckets)
            buckets.push_back({{"label", b.label},
                               {"count", b.count},
                               {"mean", b.mean},
                               {"se", b.se},
                               {"z", b.z},
                               {"pass", b.pass},
                               {"skipped", b.skipped}});
        orth.push_back({{"s", o.s},
                        {"t", o.t},
                        {"z_effective", o.z_effective},
                        {"all_pass", o.all_pass},
                        {"buckets", buckets}});
    }
    doc["orthogonality"] = orth;
    write_file(out_path(config, "report.json"), doc.dump(2) + "\n");
}

void write_intensity_outputs(const IntensityCurve& curve, const RunConfig& config) {
    if (config.format == "csv") {
        std::string csv = "format_version,1\nt,lambda\n";
        for (std::size_t i = 0; i < curve.t.size(); ++i)
            csv += fmt(curve.t[i]) + "," + fmt(curve.lambda[i]) + "\n";
        write_file(out_path(config, "intensity.csv"), csv);
        std::string atoms = "format_version,1\ntime,mass\n";
        for (const auto& a : curve.atoms) atoms += fmt(a.time) + "," + fmt(a.mass) + "\n";
        write_file(out_path(config, "atoms.csv"), atoms);
    } else {
        nlohmann::ordered_json doc;
        doc["format_version"] = 1;
        doc["command"] = "intensity";
        doc["formula"] = curve.formula;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < curve.t.size(); ++i)
            rows.push_back({{"t", curve.t[i]}, {"lambda", curve.lambda[i]}});
        doc["curve"] = rows;
        nlohmann::ordered_json atoms = nlohmann::ordered_json::array();
        for (const auto& a : curve.atoms) atoms.push_back({{"time", a.time}, {"mass", a.mass}});
        doc["atoms"] = atoms;
        write_file(out_path(config, "intensity.json"), doc.dump(2) + "\n");
    }
}

void write_simulate_outputs(const SimulateResult& result, const RunConfig& config) {
    if (config.format == "csv") {
        std::string csv = "format_version,1\npath,tau,tau_at_jump,n_windows,n_observations\n";
        for (const auto& p : result.paths)
            csv += std::to_string(p.index) + "," + fmt(p.tau) + "," + (p.tau_at_jump ? "1" : "0") +
                   "," + std::to_string(p.n_windows) + "," + std::to_string(p.n_observations) + "\n";
        write_file(out_path(config, "paths.csv"), csv);
    } else {
        nlohmann::ordered_json doc;
        doc["format_version"] = 1;
        doc["command"] = "simulate";
        doc["seed"] = config.seed;
        doc["n_paths"] = config.n_paths;
        doc["default_fraction"] = result.default_fraction;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& p : result.paths) {
            nlohmann::ordered_json row;
            row["path"] = p.index;
            if (p.tau == markov::kNever)
                row["tau"] = nullptr;
            else
                row["tau"] = p.tau;
            row["tau_at_jump"] = p.tau_at_jump;
            row["n_windows"] = p.n_windows;
            row["n_observations"] = p.n_observations;
            rows.push_back(row);
        }
        doc["paths"] = rows;
        write_file(out_path(config, "paths.json"), doc.dump(2) + "\n");
    }
}

} // namespace hazard::run
