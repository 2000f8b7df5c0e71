#pragma once

#include "hazard/markov_models.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hazard::config {

enum class Engine {
    Auto,
    DeterministicObs,
    RegimeSwitching,
    JumpDiffusion,
    Eq5Generic,
    JyTransform,
    ChainHit,
    DefaultRegion
};

std::string engine_name(Engine e);

// Window requested for intensity runs.
struct WindowConfig {
    double s = 0.0;
    double t_end = 1.0;
    double state = 0.0; // 0 means: use the model's x0
    int regime = -1;    // -1 means: use the model's regime0
    double v2 = 0.0;    // 0 means: t_end - s
    double survivor = 1.0;
    int points = 101;
};

struct RunConfig {
    std::uint64_t seed = 0;
    bool seed_set = false;

    markov::ModelSpec model;
    markov::ObservationSchedule schedule;
    Engine engine = Engine::Auto;

    markov::SimOptions sim_options;
    double bias_factor = 1.0; // negative-control knob; 1 = unbiased
    std::size_t n_paths = 10000;

    std::vector<double> times{0.5, 1.0, 2.0};
    double z_max = 3.5;
    bool orthogonality = true;

    WindowConfig window;
    bool window_set = false;

    std::string out_dir = ".";
    std::string format = "csv"; // csv | json
};

// Parses and schema-validates a config file. Unknown keys are rejected; all
// errors are validation_error with a JSON-pointer-style location (parse errors
// carry the byte position reported by the JSON parser).
RunConfig load_config_file(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin);

// Concrete engine for a config (resolves Auto from the model and stopping
// kind; rejects inconsistent explicit choices).
Engine resolve_engine(const RunConfig& config);

// Extra requirements for verification runs: mandatory seed, n_paths >= 1000,
// test times inside the horizon.
void validate_for_verify(const RunConfig& config);

} // namespace hazard::config
