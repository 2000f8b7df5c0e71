#include "hazard/errors.hpp"
#include "hazard/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace hazard;

TEST_CASE("adaptive quadrature on smooth integrands") {
    auto cube = [](double x) { return x * x * x; };
    CHECK(quad::integrate_adaptive(cube, 0.0, 2.0, 1e-12).value == doctest::Approx(4.0).epsilon(1e-13));
    auto bump = [](double x) { return std::exp(-x * x); };
    CHECK(quad::integrate_adaptive(bump, -8.0, 8.0, 1e-12).value ==
          doctest::Approx(1.7724538509055160273).epsilon(1e-12)); // sqrt(pi)
    // breakpoints outside the interval are ignored
    CHECK(quad::integrate_adaptive(cube, 0.0, 1.0, 1e-12, {-1.0, 5.0}).value ==
          doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("adaptive quadrature reports the achieved tolerance when the budget runs out") {
    auto nasty = [](double x) { return std::sin(1.0 / (x + 1e-8)) / std::sqrt(x + 1e-12); };
    try {
        quad::integrate_adaptive(nasty, 0.0, 1.0, 1e-14, {}, 60);
        FAIL("expected numerical_error");
    } catch (const numerical_error& e) {
        CHECK(e.achieved > 1e-14);
    }
}

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
    auto p10 = [](double x) { return std::pow(x, 10.0); };
    CHECK(quad::integrate_gauss_legendre(p10, 0.0, 1.0, 16) ==
          doctest::Approx(1.0 / 11.0).epsilon(1e-14));
    const auto& [x, w] = quad::gauss_legendre_rule(32);
    double wsum = 0.0;
    for (double v : w) wsum += v;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(x.front() == doctest::Approx(-x.back()).epsilon(1e-14));
}

TEST_CASE("beta-weighted integral reproduces beta moments") {
    for (auto [a, b] : {std::pair{2.0, 3.0}, {1.0, 1.0}, {0.5, 2.5}, {4.2, 0.7}, {0.3, 0.3}}) {
        auto one = [](double) { return 1.0; };
        CHECK(quad::integrate_beta_weighted(one, a, b) == doctest::Approx(1.0).epsilon(1e-11));
        auto id = [](double z) { return z; };
        CHECK(quad::integrate_beta_weighted(id, a, b) ==
              doctest::Approx(a / (a + b)).epsilon(1e-11));
        auto sq = [](double z) { return z * z; };
        CHECK(quad::integrate_beta_weighted(sq, a, b) ==
              doctest::Approx(a * (a + 1.0) / ((a + b) * (a + b + 1.0))).epsilon(1e-11));
    }
    CHECK_THROWS_AS(quad::integrate_beta_weighted([](double) { return 1.0; }, 0.0, 1.0),
                    std::domain_error);
}
