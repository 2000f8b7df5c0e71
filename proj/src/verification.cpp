#include "hazard/verification.hpp"

#include "hazard/errors.hpp"
#include "hazard/gaussian_kernels.hpp"
#include "hazard/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hazard::verify {

double widened_z(double z_max, std::size_t n_tests) {
    if (n_tests <= 5) return z_max;
    const double alpha = 2.0 * (1.0 - kernels::norm_cdf(z_max));
    const double alpha_each = alpha * 5.0 / static_cast<double>(n_tests);
    return kernels::norm_inv(1.0 - 0.5 * alpha_each);
}

MartingaleReport martingale_residual_test(const std::vector<PathStat>& paths,
                                          const std::vector<double>& times, double z_max) {
    const std::size_t n = paths.size();
    if (n < 1000) throw validation_error("martingale_residual_test: need >= 1000 paths");
    if (times.empty()) throw validation_error("martingale_residual_test: no test times");

    MartingaleReport report;
    report.n_paths = n;
    report.z_max = z_max;
    report.z_effective = widened_z(z_max, times.size());
    report.all_pass = true;

    bool any_compensator = false, any_distinct_tau = false;
    for (const auto& p : paths) {
        report.skipped_mass += p.skipped_mass;
        if (p.event_time != paths.front().event_time) any_distinct_tau = true;
        for (double a : p.compensator_at)
            if (a != 0.0) any_compensator = true;
    }
    report.inconclusive = !any_compensator && !any_distinct_tau;

    for (std::size_t j = 0; j < times.size(); ++j) {
        const double t = times[j];
        double sum = 0.0, sumsq = 0.0;
        for (const auto& p : paths) {
            const double ind = (p.event_counted && p.event_time <= t) ? 1.0 : 0.0;
            const double r = ind - p.compensator_at[j];
            sum += r;
            sumsq += r * r;
        }
        TimePointResult row;
        row.t = t;
        row.mean = sum / static_cast<double>(n);
        const double var =
            std::max(0.0, (sumsq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1));
        row.se = std::sqrt(var / static_cast<double>(n));
        if (row.se > 0.0)
            row.z = row.mean / row.se;
        else
            row.z = (row.mean == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
        row.pass = std::abs(row.z) <= report.z_effective;
        report.all_pass = report.all_pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

OrthogonalityReport orthogonality_test(const std::vector<PathStat>& paths,
                                       const std::vector<double>& times, std::size_t s_index,
                                       std::size_t t_index,
                                       const std::vector<std::string>& bucket_names, double z_max) {
    if (s_index >= t_index || t_index >= times.size())
        throw std::invalid_argument("orthogonality_test: need s < t within the test times");
    OrthogonalityReport report;
    report.s = times[s_index];
    report.t = times[t_index];

    const std::size_t nb = bucket_names.size();
    std::vector<double> sum(nb, 0.0), sumsq(nb, 0.0);
    std::vector<std::size_t> count(nb, 0);
    for (const auto& p : paths) {
        const std::size_t b = static_cast<std::size_t>(p.bucket);
        if (b >= nb) throw std::invalid_argument("orthogonality_test: bucket label out of range");
        auto m_at = [&](std::size_t j) {
            const double ind = (p.event_counted && p.event_time <= times[j]) ? 1.0 : 0.0;
            return ind - p.compensator_at[j];
        };
        const double d = m_at(t_index) - m_at(s_index);
        sum[b] += d;
        sumsq[b] += d * d;
        ++count[b];
    }

    std::size_t nonempty = 0;
    for (std::size_t b = 0; b < nb; ++b)
        if (count[b] > 1) ++nonempty;
    report.z_effective = widened_z(z_max, nonempty);
    report.all_pass = true;
    for (std::size_t b = 0; b < nb; ++b) {
        BucketResult r;
        r.label = bucket_names[b];
        r.count = count[b];
        if (count[b] < 2) {
            r.skipped = true;
            r.pass = true;
            report.buckets.push_back(r);
            continue;
        }
        const double n = static_cast<double>(count[b]);
        r.mean = sum[b] / n;
        const double var = std::max(0.0, (sumsq[b] - sum[b] * sum[b] / n) / (n - 1.0));
        r.se = std::sqrt(var / n);
        r.z = (r.se > 0.0) ? r.mean / r.se : (r.mean == 0.0 ? 0.0 : 1e300);
        r.pass = std::abs(r.z) <= report.z_effective;
        report.all_pass = report.all_pass && r.pass;
        report.buckets.push_back(r);
    }
    return report;
}

double laplacian_intensity(const std::function<double(double)>& f, double u, double h) {
    if (!(u > 0.0) || !(h > 0.0))
        throw std::domain_error("laplacian_intensity: u and h must be > 0");
    const double fu = f(u);
    if (fu < engine::kKernelFloor)
        throw singular_kernel_error("laplacian_intensity: survival below floor", u, u);
    const double est_h = (1.0 - f(u + h) / fu) / h;
    const double est_h2 = (1.0 - f(u + 0.5 * h) / fu) / (0.5 * h);
    return 2.0 * est_h2 - est_h;
}

double fd_intensity_oracle(const markov::ModelSpec& model, const engine::LocalJumpWindow& window,
                           double u, double h) {
    const auto kernel = engine::kernel_for(model, window);
    double value = laplacian_intensity(kernel.f, u, h);
    if (model.kind == markov::ModelKind::JumpDiffusion) {
        const double q = model.generator.exit_rate(window.regime);
        if (q > 0.0 && u < window.v2)
            value += q * engine::jump_kill_given_jump(model, window, u, /*adaptive=*/true) /
                     kernel.f(u);
    }
    return value;
}

SurvivalEstimate mc_survival(const markov::ModelSpec& model, double t, std::size_t n_paths,
                             std::uint64_t seed, const markov::SimOptions& options, int threads) {
    if (n_paths < 1000) throw validation_error("mc_survival: need >= 1000 paths");
    if (!(t >= 0.0)) throw std::domain_error("mc_survival: t must be >= 0");
    if (t == 0.0) return {1.0, 0.0, n_paths};
    if (model.kind != markov::ModelKind::ChainOnly && model.x0 <= model.barrier)
        return {0.0, 0.0, n_paths};

    const auto schedule = markov::ObservationSchedule::uniform(t, t);
    std::vector<char> alive(n_paths, 0);
    parallel_for(n_paths, threads, [&](std::size_t i) {
        Rng rng = Rng::for_path(seed, i);
        const auto path = markov::simulate_price_path(model, schedule, rng, options);
        alive[i] = path.tau > t ? 1 : 0;
    });
    std::size_t count = 0;
    for (char a : alive) count += static_cast<std::size_t>(a);
    const double p = static_cast<double>(count) / static_cast<double>(n_paths);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n_paths));
    return {p, se, n_paths};
}

} // namespace hazard::verify
