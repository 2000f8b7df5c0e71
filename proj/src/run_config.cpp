#include "hazard/run_config.hpp"

#include "hazard/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace hazard::config {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw validation_error("config: " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) fail(where + "/" + key, "unknown key");
}

double number_at(const json& obj, const std::string& where, const std::string& key, double fallback,
                 bool required = false) {
    if (!obj.contains(key)) {
        if (required) fail(where, "missing required key '" + key + "'");
        return fallback;
    }
    if (!obj[key].is_number()) fail(where + "/" + key, "expected a number");
    return obj[key].get<double>();
}

std::vector<double> per_regime(const json& node, const std::string& where, int states) {
    std::vector<double> out;
    if (node.is_number()) {
        out.assign(static_cast<std::size_t>(states), node.get<double>());
    } else if (node.is_array()) {
        for (const auto& v : node) {
            if (!v.is_number()) fail(where, "expected numbers");
            out.push_back(v.get<double>());
        }
        if (static_cast<int>(out.size()) != states)
            fail(where, "expected one entry per regime (" + std::to_string(states) + ")");
    } else {
        fail(where, "expected a number or an array");
    }
    return out;
}

markov::JumpLaw parse_jump_law(const json& node, const std::string& where) {
    check_keys(node, where, {"type", "z", "alpha", "beta"});
    markov::JumpLaw law;
    if (!node.contains("type") || !node["type"].is_string()) fail(where, "missing law 'type'");
    const std::string type = node["type"].get<std::string>();
    if (type == "point") {
        law.type = markov::JumpLaw::Type::PointMass;
        law.z0 = number_at(node, where, "z", 1.0, true);
    } else if (type == "beta") {
        law.type = markov::JumpLaw::Type::Beta;
        law.alpha = number_at(node, where, "alpha", 2.0, true);
        law.beta = number_at(node, where, "beta", 2.0, true);
    } else {
        fail(where + "/type", "expected 'point' or 'beta'");
    }
    law.validate();
    return law;
}

markov::ModelSpec parse_model(const json& node) {
    const std::string where = "/model";
    check_keys(node, where,
               {"kind", "generator", "mu", "sigma", "barrier", "x0", "regime0", "jump_laws", "tau"});
    markov::ModelSpec model;

    if (!node.contains("kind") || !node["kind"].is_string()) fail(where, "missing model 'kind'");
    const std::string kind = node["kind"].get<std::string>();
    if (kind == "plain_gbm")
        model.kind = markov::ModelKind::PlainGbm;
    else if (kind == "regime_switching")
        model.kind = markov::ModelKind::RegimeSwitching;
    else if (kind == "jump_diffusion")
        model.kind = markov::ModelKind::JumpDiffusion;
    else if (kind == "chain_only")
        model.kind = markov::ModelKind::ChainOnly;
    else
        fail(where + "/kind", "unknown model kind '" + kind + "'");

    if (model.kind == markov::ModelKind::PlainGbm && !node.contains("generator")) {
        model.generator = markov::GeneratorMatrix::absorbing();
    } else {
        if (!node.contains("generator") || !node["generator"].is_array())
            fail(where, "missing 'generator' matrix");
        std::vector<std::vector<double>> rows;
        for (const auto& r : node["generator"]) {
            if (!r.is_array()) fail(where + "/generator", "expected an array of rows");
            rows.emplace_back();
            for (const auto& v : r) {
                if (!v.is_number()) fail(where + "/generator", "expected numbers");
                rows.back().push_back(v.get<double>());
            }
        }
        model.generator = markov::GeneratorMatrix::validate(rows);
    }

    const int states = model.generator.states;
    if (model.kind != markov::ModelKind::ChainOnly) {
        if (!node.contains("mu") || !node.contains("sigma"))
            fail(where, "missing 'mu' or 'sigma'");
        model.mu = per_regime(node["mu"], where + "/mu", states);
        model.sigma = per_regime(node["sigma"], where + "/sigma", states);
        model.barrier = number_at(node, where, "barrier", 1.0, true);
        model.x0 = number_at(node, where, "x0", 2.0, true);
    }
    model.regime0 = static_cast<int>(number_at(node, where, "regime0", 0.0));

    if (node.contains("jump_laws")) {
        if (model.kind != markov::ModelKind::JumpDiffusion)
            fail(where + "/jump_laws", "only valid for jump_diffusion models");
        if (!node["jump_laws"].is_array()) fail(where + "/jump_laws", "expected an array");
        int i = 0;
        for (const auto& j : node["jump_laws"])
            model.jump_laws.push_back(parse_jump_law(j, where + "/jump_laws/" + std::to_string(i++)));
    }

    if (node.contains("tau")) {
        const json& tau = node["tau"];
        check_keys(tau, where + "/tau", {"kind", "regimes"});
        if (!tau.contains("kind") || !tau["kind"].is_string())
            fail(where + "/tau", "missing stopping 'kind'");
        const std::string tk = tau["kind"].get<std::string>();
        if (tk == "barrier")
            model.tau_kind = markov::TauKind::BarrierPassage;
        else if (tk == "regime_hit")
            model.tau_kind = markov::TauKind::RegimeHit;
        else if (tk == "default_region")
            model.tau_kind = markov::TauKind::DefaultRegion;
        else
            fail(where + "/tau/kind", "unknown stopping kind '" + tk + "'");
        if (tau.contains("regimes")) {
            if (!tau["regimes"].is_array()) fail(where + "/tau/regimes", "expected an array");
            for (const auto& v : tau["regimes"]) {
                if (!v.is_number_integer()) fail(where + "/tau/regimes", "expected integers");
                model.hit_regimes.push_back(v.get<int>());
            }
        }
    } else if (model.kind == markov::ModelKind::ChainOnly) {
        fail(where, "chain_only models need a 'tau' section with kind 'regime_hit'");
    }

    model.validate();
    return model;
}

markov::ObservationSchedule parse_schedule(const json& node) {
    const std::string where = "/schedule";
    check_keys(node, where, {"times", "step", "horizon", "observe_regime_jumps"});
    markov::ObservationSchedule schedule;
    if (node.contains("times")) {
        if (!node["times"].is_array()) fail(where + "/times", "expected an array");
        for (const auto& v : node["times"]) {
            if (!v.is_number()) fail(where + "/times", "expected numbers");
            schedule.times.push_back(v.get<double>());
        }
    } else {
        const double step = number_at(node, where, "step", 0.0, true);
        const double horizon = number_at(node, where, "horizon", 0.0, true);
        if (!(step > 0.0) || !(horizon >= 0.0))
            fail(where, "step must be > 0 and horizon >= 0");
        schedule = markov::ObservationSchedule::uniform(step, horizon);
    }
    if (node.contains("observe_regime_jumps")) {
        if (!node["observe_regime_jumps"].is_boolean())
            fail(where + "/observe_regime_jumps", "expected a boolean");
        schedule.observe_regime_jumps = node["observe_regime_jumps"].get<bool>();
    }
    schedule.validate();
    return schedule;
}

Engine parse_engine(const json& node) {
    if (!node.is_string()) fail("/engine", "expected a string");
    const std::string name = node.get<std::string>();
    if (name == "auto") return Engine::Auto;
    if (name == "deterministic-obs") return Engine::DeterministicObs;
    if (name == "regime-switching") return Engine::RegimeSwitching;
    if (name == "jump-diffusion") return Engine::JumpDiffusion;
    if (name == "eq5-generic") return Engine::Eq5Generic;
    if (name == "jy-transform") return Engine::JyTransform;
    if (name == "chain-hit") return Engine::ChainHit;
    if (name == "default-region") return Engine::DefaultRegion;
    fail("/engine", "unknown engine '" + name + "'");
}

} // namespace

std::string engine_name(Engine e) {
    switch (e) {
        case Engine::Auto: return "auto";
        case Engine::DeterministicObs: return "deterministic-obs";
        case Engine::RegimeSwitching: return "regime-switching";
        case Engine::JumpDiffusion: return "jump-diffusion";
        case Engine::Eq5Generic: return "eq5-generic";
        case Engine::JyTransform: return "jy-transform";
        case Engine::ChainHit: return "chain-hit";
        case Engine::DefaultRegion: return "default-region";
    }
    return "?";
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw validation_error("config: " + origin + ": " + e.what());
    }
    check_keys(root, "/",
               {"seed", "model", "schedule", "engine", "simulation", "verification", "window",
                "output"});

    RunConfig cfg;
    if (root.contains("seed")) {
        if (!root["seed"].is_number_integer()) fail("/seed", "expected an integer");
        cfg.seed = root["seed"].get<std::uint64_t>();
        cfg.seed_set = true;
    }
    if (!root.contains("model")) fail("/", "missing 'model'");
    cfg.model = parse_model(root["model"]);
    if (!root.contains("schedule")) fail("/", "missing 'schedule'");
    cfg.schedule = parse_schedule(root["schedule"]);
    if (root.contains("engine")) cfg.engine = parse_engine(root["engine"]);

    if (root.contains("simulation")) {
        const json& sim = root["simulation"];
        check_keys(sim, "/simulation",
                   {"max_step", "bridge_correction", "sample_crossing_time", "bias_factor",
                    "n_paths"});
        cfg.sim_options.max_step = number_at(sim, "/simulation", "max_step", cfg.sim_options.max_step);
        if (!(cfg.sim_options.max_step > 0.0)) fail("/simulation/max_step", "must be > 0");
        if (sim.contains("bridge_correction")) {
            if (!sim["bridge_correction"].is_boolean())
                fail("/simulation/bridge_correction", "expected a boolean");
            cfg.sim_options.bridge_correction = sim["bridge_correction"].get<bool>();
        }
        if (sim.contains("sample_crossing_time")) {
            if (!sim["sample_crossing_time"].is_boolean())
                fail("/simulation/sample_crossing_time", "expected a boolean");
            cfg.sim_options.sample_crossing_time = sim["sample_crossing_time"].get<bool>();
        }
        cfg.bias_factor = number_at(sim, "/simulation", "bias_factor", 1.0);
        if (!(cfg.bias_factor > 0.0)) fail("/simulation/bias_factor", "must be > 0");
        if (sim.contains("n_paths")) {
            if (!sim["n_paths"].is_number_integer()) fail("/simulation/n_paths", "expected an integer");
            cfg.n_paths = sim["n_paths"].get<std::size_t>();
        }
    }

    if (root.contains("verification")) {
        const json& ver = root["verification"];
        check_keys(ver, "/verification", {"times", "z_max", "orthogonality"});
        if (ver.contains("times")) {
            if (!ver["times"].is_array()) fail("/verification/times", "expected an array");
            cfg.times.clear();
            for (const auto& v : ver["times"]) {
                if (!v.is_number()) fail("/verification/times", "expected numbers");
                cfg.times.push_back(v.get<double>());
            }
            if (cfg.times.empty()) fail("/verification/times", "must not be empty");
            for (std::size_t i = 1; i < cfg.times.size(); ++i)
                if (!(cfg.times[i] > cfg.times[i - 1]))
                    fail("/verification/times", "must be strictly increasing");
        }
        cfg.z_max = number_at(ver, "/verification", "z_max", cfg.z_max);
        if (!(cfg.z_max > 0.0)) fail("/verification/z_max", "must be > 0");
        if (ver.contains("orthogonality")) {
            if (!ver["orthogonality"].is_boolean())
                fail("/verification/orthogonality", "expected a boolean");
            cfg.orthogonality = ver["orthogonality"].get<bool>();
        }
    }

    if (root.contains("window")) {
        const json& win = root["window"];
        check_keys(win, "/window", {"s", "t_end", "state", "regime", "v2", "survivor", "points"});
        cfg.window.s = number_at(win, "/window", "s", 0.0);
        cfg.window.t_end = number_at(win, "/window", "t_end", 1.0, true);
        cfg.window.state = number_at(win, "/window", "state", 0.0);
        cfg.window.regime = static_cast<int>(number_at(win, "/window", "regime", -1.0));
        cfg.window.v2 = number_at(win, "/window", "v2", 0.0);
        cfg.window.survivor = number_at(win, "/window", "survivor", 1.0);
        cfg.window.points = static_cast<int>(number_at(win, "/window", "points", 101.0));
        if (!(cfg.window.t_end > cfg.window.s)) fail("/window", "t_end must exceed s");
        if (cfg.window.points < 2) fail("/window/points", "need at least 2 points");
        if (!(cfg.window.survivor > 0.0) || cfg.window.survivor > 1.0)
            fail("/window/survivor", "must be in (0,1]");
        cfg.window_set = true;
    }

    if (root.contains("output")) {
        const json& out = root["output"];
        check_keys(out, "/output", {"dir", "format"});
        if (out.contains("dir")) {
            if (!out["dir"].is_string()) fail("/output/dir", "expected a string");
            cfg.out_dir = out["dir"].get<std::string>();
        }
        if (out.contains("format")) {
            if (!out["format"].is_string()) fail("/output/format", "expected a string");
            cfg.format = out["format"].get<std::string>();
            if (cfg.format != "csv" && cfg.format != "json")
                fail("/output/format", "expected 'csv' or 'json'");
        }
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

Engine resolve_engine(const RunConfig& config) {
    const auto& m = config.model;
    Engine natural = Engine::Auto;
    switch (m.kind) {
        case markov::ModelKind::PlainGbm: natural = Engine::DeterministicObs; break;
        case markov::ModelKind::RegimeSwitching:
            natural = (m.tau_kind == markov::TauKind::DefaultRegion) ? Engine::DefaultRegion
                                                                     : Engine::RegimeSwitching;
            break;
        case markov::ModelKind::JumpDiffusion: natural = Engine::JumpDiffusion; break;
        case markov::ModelKind::ChainOnly: natural = Engine::ChainHit; break;
    }
    if (config.engine == Engine::Auto) return natural;
    // eq5-generic and jy-transform re-route the same model through the general
    // machinery; anything else must match the model.
    if (config.engine == Engine::Eq5Generic || config.engine == Engine::JyTransform) {
        if (m.kind == markov::ModelKind::ChainOnly)
            throw validation_error("config: engine '" + engine_name(config.engine) +
                                   "' needs a diffusion model");
        return config.engine;
    }
    if (config.engine != natural)
        throw validation_error("config: engine '" + engine_name(config.engine) +
                               "' does not match the model (expected '" + engine_name(natural) +
                               "')");
    return natural;
}

void validate_for_verify(const RunConfig& config) {
    if (!config.seed_set) throw validation_error("config: verification runs need a 'seed'");
    if (config.n_paths < 1000)
        throw validation_error("config: verification needs n_paths >= 1000");
    for (double t : config.times)
        if (t > config.schedule.horizon() + 1e-12)
            throw validation_error("config: test times must lie inside the schedule horizon");
}

} // namespace hazard::config
