#include "hazard/quadrature.hpp"

#include "hazard/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace hazard::quad {

namespace {

// QUADPACK dqk15 abscissae/weights.
const double kXgk[8] = {0.991455371120812639206854697526329,
                        0.949107912342758524526189684047851,
                        0.864864423359769072789712788640926,
                        0.741531185599394439863864773280788,
                        0.586087235467691130294144838258730,
                        0.405845151377397166906606412076961,
                        0.207784955007898467600689403773245,
                        0.0};
const double kWgk[8] = {0.022935322010529224963732008058970,
                        0.063092092629978553290700663189204,
                        0.104790010322250183839876322541518,
                        0.140653259715525918745189590510238,
                        0.169004726639267902826583426598550,
                        0.190350578064785409913256402421014,
                        0.204432940075298892414161999234649,
                        0.209482141084727828012999174891714};
const double kWg[4] = {0.129484966168869693270611432679082,
                       0.279705391489276667901467771423780,
                       0.381830050505118944950369775488975,
                       0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        fv1[j] = f(c - dx);
        fv2[j] = f(c + dx);
        resk += kWgk[j] * (fv1[j] + fv2[j]);
        if (j % 2 == 1) resg += kWg[j / 2] * (fv1[j] + fv2[j]);
    }
    const double value = resk * h;
    // QUADPACK-style conservative estimate: scale |K - G| by the variation of
    // f over the panel so near-misses are not accepted prematurely.
    const double reskh = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
    resasc *= std::abs(h);
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    return {a, b, value, err};
}

} // namespace

Result integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, const std::vector<double>& breakpoints,
                          int max_panels) {
    if (!(b > a)) return {0.0, 0.0, 0};

    std::vector<double> edges{a};
    for (double p : breakpoints)
        if (p > a && p < b) edges.push_back(p);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());

    // Worklist of panels with per-panel tolerance budgets.
    struct Item {
        Panel p;
        double tol;
    };
    std::vector<Item> work;
    const double tol0 = abs_tol / static_cast<double>(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        work.push_back({gk15(f, edges[i], edges[i + 1]), tol0});

    Result out;
    int used = static_cast<int>(work.size());
    while (!work.empty()) {
        Item it = work.back();
        work.pop_back();
        if (it.p.error <= it.tol || (it.p.b - it.p.a) < 1e-300) {
            out.value += it.p.value;
            out.error_estimate += it.p.error;
            continue;
        }
        if (used >= max_panels) {
            // Flush what is left and report the tolerance actually reached.
            double rem = it.p.error;
            out.value += it.p.value;
            for (const Item& r : work) {
                out.value += r.p.value;
                rem += r.p.error;
            }
            throw numerical_error("adaptive quadrature did not converge", out.error_estimate + rem);
        }
        const double m = 0.5 * (it.p.a + it.p.b);
        work.push_back({gk15(f, it.p.a, m), 0.5 * it.tol});
        work.push_back({gk15(f, m, it.p.b), 0.5 * it.tol});
        used += 2;
    }
    out.panels = used;
    return out;
}

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_rule(int order) {
    static std::mutex mtx;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    // Newton iteration on P_n from the Chebyshev initial guess.
    std::vector<double> x(order), w(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(3.14159265358979323846 * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[order - 1 - i] = w[i];
    }
    return cache.emplace(order, std::make_pair(std::move(x), std::move(w))).first->second;
}

double integrate_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                int order) {
    const auto& [x, w] = gauss_legendre_rule(order);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += w[i] * f(c + h * x[i]);
    return s * h;
}

double integrate_beta_weighted(const std::function<double(double)>& g, double alpha, double beta,
                               int n) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::domain_error("integrate_beta_weighted: alpha and beta must be > 0");
    const double lognorm = std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
    constexpr double kHalfPi = 1.5707963267948966192;

    // Truncate where the remaining endpoint weight mass drops below ~1e-15:
    // (1 - z)^beta at the last node must underflow the tolerance, so the
    // s-range grows like 1/min(alpha, beta) in the exponent.
    const double m = std::min({alpha, beta, 1.0});
    const double s_max = std::log((36.0 / m) / kHalfPi) + 0.5;
    const double h = s_max / n;

    double acc = 0.0;
    for (int i = -n; i <= n; ++i) {
        const double s = h * i;
        const double c = kHalfPi * std::sinh(s);
        const double w = kHalfPi * std::cosh(s) / (std::cosh(c) * std::cosh(c)); // dz/ds * 2
        // z = (1 + tanh(c))/2; use exp forms to keep 1-z accurate near 1
        const double z = 1.0 / (1.0 + std::exp(-2.0 * c));
        const double one_minus_z = 1.0 / (1.0 + std::exp(2.0 * c));
        if (z <= 0.0 || one_minus_z <= 0.0) continue;
        const double logw = (alpha - 1.0) * std::log(z) + (beta - 1.0) * std::log(one_minus_z);
        if (logw - lognorm < -745.0) continue;
        acc += 0.5 * w * std::exp(logw - lognorm) * g(z);
    }
    return acc * h;
}

} // namespace hazard::quad
