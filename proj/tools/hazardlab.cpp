#include "hazard/errors.hpp"
#include "hazard/harness.hpp"
#include "hazard/parallel.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

namespace {

// Exit codes: 0 pass, 1 statistical fail, 2 usage/config error, 3 numerical error.
constexpr int kExitPass = 0;
constexpr int kExitStatFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string format;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

hazard::config::RunConfig load(const CommonArgs& args) {
    auto cfg = hazard::config::load_config_file(args.config_path);
    if (args.seed_given) {
        cfg.seed = args.seed;
        cfg.seed_set = true;
    }
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (!args.format.empty()) cfg.format = args.format;
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "config file (JSON)")->required();
    cmd->add_option("--seed", args.seed, "override the config seed")
        ->each([&args](const std::string&) { args.seed_given = true; });
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--format", args.format, "output format (csv|json)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hazardlab: default intensities and compensators of first-passage times "
                 "under partial observation"};
    app.require_subcommand(1);

    CommonArgs sim_args, int_args, ver_args;
    CLI::App* sim = app.add_subcommand("simulate", "simulate paths and write per-path summaries");
    add_common(sim, sim_args);
    CLI::App* intensity = app.add_subcommand("intensity", "evaluate an intensity curve on a window");
    add_common(intensity, int_args);
    CLI::App* ver = app.add_subcommand("verify", "run the martingale verification suite");
    add_common(ver, ver_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfig;
    }

    try {
        if (sim->parsed()) {
            const auto cfg = load(sim_args);
            const auto result = hazard::run::run_simulate(cfg);
            hazard::run::write_simulate_outputs(result, cfg);
            std::printf("simulated %zu paths, default fraction %.6f\n", cfg.n_paths,
                        result.default_fraction);
            return kExitPass;
        }
        if (intensity->parsed()) {
            const auto cfg = load(int_args);
            const auto curve = hazard::run::run_intensity(cfg);
            hazard::run::write_intensity_outputs(curve, cfg);
            std::printf("intensity curve via %s (%zu points, %zu atoms)\n", curve.formula.c_str(),
                        curve.t.size(), curve.atoms.size());
            return kExitPass;
        }
        const auto cfg = load(ver_args);
        const auto result = hazard::run::run_verify(cfg);
        hazard::run::write_verify_outputs(result, cfg);
        for (const auto& row : result.residual.rows)
            std::printf("t=%-8g mean=% .3e se=%.3e z=% .3f %s\n", row.t, row.mean, row.se, row.z,
                        row.pass ? "pass" : "FAIL");
        for (const auto& o : result.orthogonality)
            std::printf("orthogonality (%g, %g]: %s\n", o.s, o.t,
                        o.all_pass ? "pass" : "FAIL");
        std::printf("verify [%s]: %s\n", result.engine.c_str(), result.pass ? "PASS" : "FAIL");
        return result.pass ? kExitPass : kExitStatFail;
    } catch (const hazard::validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const hazard::numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumerical;
    } catch (const hazard::singular_kernel_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
}
