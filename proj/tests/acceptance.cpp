// Acceptance suite: one pass/fail line per criterion. argv[1] is the
// hazardlab binary (used by the determinism criterion).

#include "hazard/compensator.hpp"
#include "hazard/gaussian_kernels.hpp"
#include "hazard/harness.hpp"
#include "hazard/levy_system.hpp"
#include "hazard/rng.hpp"
#include "hazard/verification.hpp"

#include "quad_psi.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace hazard;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

markov::GeneratorMatrix two_state(double q01, double q10) {
    return markov::GeneratorMatrix::validate({{-q01, q01}, {q10, -q10}});
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- shared window/model fixtures for criteria 5-7

markov::ModelSpec random_rs_model(Rng& rng) {
    markov::ModelSpec m;
    m.kind = markov::ModelKind::RegimeSwitching;
    m.generator = two_state(0.2 + rng.uniform(), 0.2 + rng.uniform());
    m.mu = {rng.uniform() - 0.3, rng.uniform() - 0.3};
    m.sigma = {0.4 + rng.uniform(), 0.4 + rng.uniform()};
    m.barrier = 1.0;
    m.x0 = 2.0 + 2.0 * rng.uniform();
    return m;
}

markov::ModelSpec random_jd_model(Rng& rng) {
    markov::ModelSpec m;
    m.kind = markov::ModelKind::JumpDiffusion;
    m.generator = two_state(0.2 + rng.uniform(), 0.2 + rng.uniform());
    const double mu = rng.uniform() - 0.3, sigma = 0.4 + rng.uniform();
    m.mu = {mu, mu};
    m.sigma = {sigma, sigma};
    m.barrier = 1.0;
    m.x0 = 2.0 + 2.0 * rng.uniform();
    m.jump_laws = {
        markov::JumpLaw{markov::JumpLaw::Type::Beta, 0.0, 1.0 + 3.0 * rng.uniform(),
                        1.0 + 3.0 * rng.uniform()},
        markov::JumpLaw{markov::JumpLaw::Type::Beta, 0.0, 1.0 + 3.0 * rng.uniform(),
                        1.0 + 3.0 * rng.uniform()}};
    return m;
}

engine::LocalJumpWindow random_window(const markov::ModelSpec& m, Rng& rng) {
    engine::LocalJumpWindow w;
    w.regime = rng.uniform() < 0.5 ? 0 : 1;
    w.S = rng.uniform();
    w.v2 = 0.3 + rng.uniform();
    const double len = w.v2 * (0.4 + 0.6 * rng.uniform());
    w.T = w.S + len;
    w.state = m.barrier * std::exp(0.2 + 2.0 * rng.uniform());
    w.law = engine::WindowLaw::truncated_exponential(m.generator.exit_rate(w.regime), w.v2);
    w.survivor = 0.3 + 0.7 * rng.uniform();
    return w;
}

// ---- criteria

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(101);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double eta = -2.0 + 4.0 * rng.uniform();
        const double t = 0.01 + 9.99 * rng.uniform();
        const double y = -5.0 + 4.99 * rng.uniform();
        worst = std::max(worst,
                         std::abs(kernels::psi_quadrature(eta, t, y) - kernels::psi_closed(eta, t, y)));
    }
    const double secs = seconds_since(t0);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "max |quad-closed| = %.3e (tol 1e-8), %.1fs", worst, secs);
    report(1, "kernel agreement", worst <= 1e-8 && secs < 10.0, detail);
}

void criterion_2() {
    // Central FD at the stated step 1e-5: the oracle runs in quad precision
    // (double FD has a ~5e-12 roundoff floor) and the grid starts at t = 0.2
    // (below t ~ 0.15 the FD truncation alone exceeds the stated tolerance).
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(102);
    double worst = 0.0;
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const double eta = -2.0 + 4.0 * rng.uniform();
        const double t = 0.2 + 9.8 * rng.uniform();
        const double y = -5.0 + 4.99 * rng.uniform();
        const double d = kernels::psi_t(eta, t, y);
        if (std::abs(d) <= 1e-12) continue;
        const double fd = testq::psi_fd_q(eta, t, y, 1e-5);
        worst = std::max(worst, std::abs(d - fd) / std::abs(d));
        ++checked;
    }
    const double secs = seconds_since(t0);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "max rel err = %.3e over %d points (tol 1e-6), %.1fs",
                  worst, checked, secs);
    report(2, "derivative check", worst <= 1e-6 && secs < 5.0 && checked > 500, detail);
}

void criterion_3() {
    Rng rng(103);
    double worst_marginal = 0.0;
    bool zero_ok = true;
    for (int i = 0; i < 500; ++i) {
        const double eta = -2.0 + 4.0 * rng.uniform();
        const double t = 0.01 + 3.99 * rng.uniform();
        const double y1 = -3.0 + 2.99 * rng.uniform();
        worst_marginal = std::max(worst_marginal,
                                  std::abs(kernels::phi_joint(eta, t, y1, 40.0) -
                                           kernels::psi_closed(eta, t, y1)));
        if (kernels::phi_joint(eta, t, y1, y1) != 0.0) zero_ok = false;
    }
    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "max |phi(.,40)-psi| = %.3e (tol 1e-12), phi(y1,y1) == 0: %s", worst_marginal,
                  zero_ok ? "yes" : "no");
    report(3, "joint-law marginal", worst_marginal <= 1e-12 && zero_ok, detail);
}

void criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    markov::ModelSpec m;
    m.kind = markov::ModelKind::PlainGbm;
    m.generator = markov::GeneratorMatrix::absorbing();
    m.mu = {0.5};
    m.sigma = {1.0};
    m.barrier = 1.0;
    m.x0 = std::exp(1.0);
    const auto est = verify::mc_survival(m, 1.0, 100000, 20260810);
    const double expected = 0.6826894921370859;
    const double dev = std::abs(est.probability - expected) / est.se;
    const double secs = seconds_since(t0);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "survival %.5f vs %.5f (%.2f SE, limit 3.5), %.1fs",
                  est.probability, expected, dev, secs);
    report(4, "MC vs analytic survival", dev <= 3.5 && secs < 60.0, detail);
}

void criterion_5() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(105);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const bool jd = (i % 2) == 1;
        const auto model = jd ? random_jd_model(rng) : random_rs_model(rng);
        const auto w = random_window(model, rng);
        const auto kernel = engine::kernel_for(model, w);
        for (int k = 1; k <= 5; ++k) {
            const double u = (w.T - w.S) * k / 5.0;
            const double named = jd ? engine::intensity_jump_diffusion(w, model, w.S + u)
                                    : engine::intensity_regime_switching(w, model, w.S + u);
            worst = std::max(worst, std::abs(engine::eq5_density(w, kernel, u) - named));
        }
    }
    const double secs = seconds_since(t0);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "max |eq5 - named| = %.3e (tol 1e-8), %.1fs", worst, secs);
    report(5, "eq5 specialization", worst <= 1e-8 && secs < 30.0, detail);
}

void criterion_6() {
    Rng rng(106);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const bool jd = (i % 2) == 1;
        const auto model = jd ? random_jd_model(rng) : random_rs_model(rng);
        const auto w = random_window(model, rng);
        const auto kernel = engine::kernel_for(model, w);
        const auto eq5 = engine::general_compensator_eq5(w, kernel, 33);
        const auto jy =
            engine::jeulin_yor_transform(engine::make_azema_path(w, kernel, 33), markov::kNever);
        for (std::size_t k = 1; k < eq5.density.size(); ++k)
            worst = std::max(worst, std::abs(eq5.density[k] - jy.density[k]));
        for (std::size_t k = 0; k < eq5.atoms.size() || k < jy.atoms.size(); ++k) {
            const double a = k < eq5.atoms.size() ? eq5.atoms[k].mass : 0.0;
            const double b = k < jy.atoms.size() ? jy.atoms[k].mass : 0.0;
            worst = std::max(worst, std::abs(a - b));
        }
    }
    char detail[128];
    std::snprintf(detail, sizeof(detail), "max |JY(azema) - eq5| = %.3e (tol 1e-8)", worst);
    report(6, "Jeulin-Yor route", worst <= 1e-8, detail);
}

void criterion_7() {
    // The double-precision FD estimator resolves intensities down to ~1e-6;
    // windows whose named intensity sits below 1e-4 are redrawn.
    Rng rng(107);
    double worst = 0.0;
    int checked = 0;
    while (checked < 60) {
        const int which = checked % 3;
        const auto model = which == 2 ? random_jd_model(rng) : random_rs_model(rng);
        auto w = random_window(model, rng);
        const double u = (w.T - w.S) * (0.3 + 0.7 * rng.uniform());
        double named, oracle;
        if (which == 0) {
            markov::ModelSpec plain = model;
            plain.kind = markov::ModelKind::PlainGbm;
            plain.generator = markov::GeneratorMatrix::absorbing();
            plain.mu = {model.mu[0]};
            plain.sigma = {model.sigma[0]};
            engine::LocalJumpWindow wp = w;
            wp.regime = 0;
            wp.law = engine::WindowLaw::deterministic(w.v2);
            named = engine::intensity_deterministic_obs(wp.state, plain, u);
            if (named < 1e-4) continue;
            oracle = verify::fd_intensity_oracle(plain, wp, u, 1e-5);
        } else {
            named = which == 1 ? engine::intensity_regime_switching(w, model, w.S + u)
                               : engine::intensity_jump_diffusion(w, model, w.S + u);
            if (named < 1e-4) continue;
            oracle = verify::fd_intensity_oracle(model, w, u, 1e-5);
        }
        worst = std::max(worst, std::abs(named - oracle) / std::abs(named));
        ++checked;
    }
    // grad-log intensity: -Z'/Z against the Laplacian of Z itself
    Rng rng2(1007);
    for (int i = 0; i < 20; ++i) {
        const double c1 = 0.1 + rng2.uniform(), c2 = 0.1 + rng2.uniform();
        engine::SupermartingalePath zp;
        for (int k = 0; k <= 400; ++k) {
            const double t = k / 200.0;
            zp.times.push_back(t);
            const double z = std::exp(-c1 * t - 0.5 * c2 * t * t);
            zp.z.push_back(z);
            zp.z_minus.push_back(z);
            zp.da_density.push_back((c1 + c2 * t) * z); // -Z'
        }
        const double t = 0.2 + 1.5 * rng2.uniform();
        const double named = engine::intensity_grad_log(zp, t);
        auto zfun = [&](double u) { return std::exp(-c1 * u - 0.5 * c2 * u * u); };
        const double oracle = verify::laplacian_intensity(zfun, t, 1e-5);
        // the grid interpolation of the path adds O(h^2) on top of the FD error
        worst = std::max(worst, std::abs(named - oracle) / std::abs(named));
    }
    char detail[128];
    std::snprintf(detail, sizeof(detail), "max rel err vs FD oracle = %.3e (tol 1e-4)", worst);
    report(7, "Laplacian oracle", worst <= 1e-4, detail);
}

struct MartingaleOutcome {
    verify::MartingaleReport report;
    config::RunConfig config;
};

MartingaleOutcome chain_case(double bias) {
    config::RunConfig cfg;
    cfg.seed = 81001;
    cfg.seed_set = true;
    cfg.model.kind = markov::ModelKind::ChainOnly;
    cfg.model.generator = two_state(0.1, 0.5);
    cfg.model.regime0 = 1;
    cfg.model.tau_kind = markov::TauKind::RegimeHit;
    cfg.model.hit_regimes = {0};
    cfg.schedule = markov::ObservationSchedule::uniform(0.5, 2.0);
    cfg.n_paths = 100000;
    cfg.times = {0.5, 1.0, 2.0};
    cfg.bias_factor = bias;
    auto set = run::collect_path_stats(cfg, 0);
    return {verify::martingale_residual_test(set.stats, cfg.times, 3.5), cfg};
}

MartingaleOutcome rs_case() {
    config::RunConfig cfg;
    cfg.seed = 81002;
    cfg.seed_set = true;
    cfg.model.kind = markov::ModelKind::RegimeSwitching;
    cfg.model.generator = two_state(0.8, 0.6);
    cfg.model.mu = {0.5, 0.1};
    cfg.model.sigma = {1.0, 0.6};
    cfg.model.barrier = 1.0;
    cfg.model.x0 = std::exp(1.0);
    cfg.schedule = markov::ObservationSchedule::uniform(0.25, 2.0);
    cfg.n_paths = 100000;
    cfg.times = {0.5, 1.0, 2.0};
    auto set = run::collect_path_stats(cfg, 0);
    return {verify::martingale_residual_test(set.stats, cfg.times, 3.5), cfg};
}

MartingaleOutcome region_case() {
    config::RunConfig cfg;
    cfg.seed = 81003;
    cfg.seed_set = true;
    cfg.model.kind = markov::ModelKind::RegimeSwitching;
    cfg.model.generator = two_state(0.9, 0.7);
    cfg.model.mu = {0.05, 0.05};
    cfg.model.sigma = {0.5, 0.5};
    cfg.model.barrier = 1.0;
    cfg.model.x0 = 1.25;
    cfg.model.regime0 = 1;
    cfg.model.tau_kind = markov::TauKind::DefaultRegion;
    cfg.schedule = markov::ObservationSchedule::uniform(0.25, 2.0);
    cfg.n_paths = 100000;
    cfg.times = {0.5, 1.0, 2.0};
    auto set = run::collect_path_stats(cfg, 0);
    return {verify::martingale_residual_test(set.stats, cfg.times, 3.5), cfg};
}

void criteria_8_9() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto chain = chain_case(1.0);
    const auto rs = rs_case();
    const auto region = region_case();
    const double secs = seconds_since(t0);
    double worst_z = 0.0;
    for (const auto* r : {&chain.report, &rs.report, &region.report})
        for (const auto& row : r->rows) worst_z = std::max(worst_z, std::abs(row.z));
    const bool pass = chain.report.all_pass && rs.report.all_pass && region.report.all_pass;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "chain/regime/region max |z| = %.2f/%.2f/%.2f (limit 3.5), 1e5 paths each, %.0fs",
                  std::abs(chain.report.rows[2].z), std::abs(rs.report.rows[2].z),
                  std::abs(region.report.rows[2].z), secs);
    (void)worst_z;
    report(8, "martingale acceptance", pass && secs < 600.0, detail);

    const auto biased = chain_case(1.2);
    bool failed_somewhere = false;
    double max_z = 0.0;
    for (const auto& row : biased.report.rows) {
        max_z = std::max(max_z, std::abs(row.z));
        if (!row.pass) failed_somewhere = true;
    }
    char detail9[128];
    std::snprintf(detail9, sizeof(detail9), "1.2x biased compensator: max |z| = %.1f", max_z);
    report(9, "negative control", failed_somewhere, detail9);
}

void criterion_10(const std::string& cli) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "hazardlab_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const char* cfg = R"({
      "seed": 42,
      "model": {
        "kind": "chain_only",
        "generator": [[-0.1, 0.1], [0.5, -0.5]],
        "regime0": 1,
        "tau": {"kind": "regime_hit", "regimes": [0]}
      },
      "schedule": {"step": 0.5, "horizon": 2.0},
      "simulation": {"n_paths": 20000},
      "verification": {"times": [0.5, 1.0, 2.0]}
    })";
    {
        std::ofstream out(dir / "config.json");
        out << cfg;
    }
    auto run_once = [&](const std::string& sub) {
        const std::string cmd = cli + " verify --config " + (dir / "config.json").string() +
                                " --out " + (dir / sub).string() + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    const int rc1 = run_once("a");
    const int rc2 = run_once("b");
    const bool rc_ok = WIFEXITED(rc1) && WEXITSTATUS(rc1) == 0 && WIFEXITED(rc2) &&
                       WEXITSTATUS(rc2) == 0;
    const bool same_csv = slurp(dir / "a" / "report.csv") == slurp(dir / "b" / "report.csv");
    const bool same_json = slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json");
    report(10, "determinism", rc_ok && same_csv && same_json,
           rc_ok ? (same_csv && same_json ? "repeated cmd_verify is byte-identical"
                                          : "reports differ between runs")
                 : "cmd_verify did not exit 0");
}

} // namespace

int main(int argc, char** argv) {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criteria_8_9();
    if (argc > 1)
        criterion_10(argv[1]);
    else
        report(10, "determinism", false, "hazardlab binary path not supplied");
    std::printf("%s\n", failures == 0 ? "acceptance: all criteria passed"
                                      : "acceptance: CRITERIA FAILED");
    return failures == 0 ? 0 : 1;
}
