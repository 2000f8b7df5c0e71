#include "hazard/errors.hpp"
#include "hazard/gaussian_kernels.hpp"
#include "hazard/rng.hpp"

#include "quad_psi.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace hazard;
using namespace hazard::kernels;

// Expected values below were frozen from a 40-digit erf/quadrature evaluation
// before this module was written.

TEST_CASE("norm_cdf basics") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(norm_cdf(40.0) - 1.0) <= 1e-15);
    CHECK(norm_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
    CHECK_THROWS_AS(norm_cdf(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
    CHECK_THROWS_AS(norm_cdf(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("norm_cdf symmetry") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double x = (rng.uniform() - 0.5) * 16.0;
        CHECK(std::abs(norm_cdf(-x) - (1.0 - norm_cdf(x))) <= 1e-15);
        if (i > 0) {
            // monotone on a random pair
            const double x2 = x + rng.uniform();
            CHECK(norm_cdf(x2) >= norm_cdf(x));
        }
    }
}

TEST_CASE("norm_inv round trip") {
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const double p = 1e-6 + rng.uniform() * (1.0 - 2e-6);
        CHECK(norm_cdf(norm_inv(p)) == doctest::Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("psi closed form values") {
    CHECK(psi_closed(0.0, 1.0, -1.0) == doctest::Approx(0.6826894921370859).epsilon(1e-14));
    CHECK(psi_closed(0.0, 4.0, -1.0) == doctest::Approx(0.3829249225480262).epsilon(1e-14));
    CHECK(psi_closed(0.0, 1e-12, -1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(psi_closed(1.7, 1e-12, -1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("psi quadrature values") {
    CHECK(psi_quadrature(0.0, 1e-8, -1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(psi_quadrature(0.0, 1.0, -1.0) == doctest::Approx(0.6826894921370859).epsilon(1e-10));
    CHECK(std::abs(psi_quadrature(0.5, 2.0, -0.5) - psi_closed(0.5, 2.0, -0.5)) <= 1e-9);
}

TEST_CASE("psi domain errors") {
    CHECK_THROWS_AS(psi_quadrature(0.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(psi_quadrature(0.0, 1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(psi_quadrature(0.0, 0.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(psi_quadrature(0.0, -1.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(psi_closed(0.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(psi_t(0.0, 0.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(psi_closed(std::nan(""), 1.0, -1.0), std::domain_error);
}

TEST_CASE("psi quadrature vs closed form on a randomized grid") {
    Rng rng(42);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double eta = -2.0 + 4.0 * rng.uniform();
        const double t = 0.01 + 9.99 * rng.uniform();
        const double y = -5.0 + 4.99 * rng.uniform();
        worst = std::max(worst, std::abs(psi_quadrature(eta, t, y) - psi_closed(eta, t, y)));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("psi monotone and boundary behavior") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double eta = -2.0 + 4.0 * rng.uniform();
        const double t = 0.05 + 5.0 * rng.uniform();
        const double y = -4.0 + 3.9 * rng.uniform();
        CHECK(psi_closed(eta, t * 1.5, y) <= psi_closed(eta, t, y) + 1e-15);
        CHECK(psi_closed(eta, t, y * 0.5) <= psi_closed(eta, t, y) + 1e-15); // y closer to 0
    }
    CHECK(psi_closed(0.0, 1.0, -1e-4) < 1e-3);
}

TEST_CASE("psi_t values and derivative consistency") {
    // -phi(1) where phi is the standard normal density
    CHECK(psi_t(0.0, 1.0, -1.0) == doctest::Approx(-0.24197072451914337).epsilon(1e-13));
    CHECK(psi_t(0.0, 1.0, -5.0) == doctest::Approx(-7.433597573671489e-06).epsilon(1e-12));

    // Central FD at step 1e-5 needs t away from 0 (its truncation error alone
    // exceeds the tolerance below t ~ 0.15) and a quad-precision oracle to sit
    // under the double roundoff floor near the |psi_t| cutoff.
    Rng rng(9);
    for (int i = 0; i < 300; ++i) {
        const double eta = -2.0 + 4.0 * rng.uniform();
        const double t = 0.2 + 9.8 * rng.uniform();
        const double y = -5.0 + 4.99 * rng.uniform();
        const double d = psi_t(eta, t, y);
        CHECK(d <= 0.0);
        if (std::abs(d) > 1e-12) {
            const double fd = testq::psi_fd_q(eta, t, y, 1e-5);
            CHECK(std::abs(d - fd) <= 1e-6 * std::abs(d));
        }
    }
}

TEST_CASE("phi_joint values and bounds") {
    // zero-width event is exactly zero
    CHECK(phi_joint(0.3, 1.7, -1.2, -1.2) == 0.0);
    CHECK(phi_joint(0.0, 1.0, -1.0, 0.0) == doctest::Approx(0.20543962408526510).epsilon(1e-13));
    // marginal limit
    CHECK(std::abs(phi_joint(0.4, 2.0, -1.0, 40.0) - psi_closed(0.4, 2.0, -1.0)) <= 1e-12);

    Rng rng(13);
    for (int i = 0; i < 300; ++i) {
        const double eta = -2.0 + 4.0 * rng.uniform();
        const double t = 0.05 + 3.0 * rng.uniform();
        const double y1 = -3.0 + 2.9 * rng.uniform();
        const double y2 = y1 + 4.0 * rng.uniform();
        const double v = phi_joint(eta, t, y1, y2);
        CHECK(v >= -1e-15);
        CHECK(v <= psi_closed(eta, t, y1) + 1e-12);
        CHECK(phi_joint(eta, t, y1, y2 + 0.5) >= v - 1e-15); // nondecreasing in y2
    }

    CHECK_THROWS_AS(phi_joint(0.0, 1.0, 0.1, 0.2), std::domain_error);
    CHECK_THROWS_AS(phi_joint(0.0, 1.0, -1.0, -1.5), std::domain_error);
}

TEST_CASE("gbm_survival") {
    const double e = std::exp(1.0);
    // eta = mu/sigma - sigma/2 = 0 at mu = 0.5, sigma = 1; y = -1
    CHECK(gbm_survival(e, 1.0, 0.5, 1.0, 1.0) == doctest::Approx(0.6826894921370859).epsilon(1e-14));
    CHECK(gbm_survival(0.9, 1.0, 0.5, 1.0, 3.0) == 0.0);
    CHECK(gbm_survival(1.0, 1.0, 0.5, 1.0, 3.0) == 0.0);
    CHECK(gbm_survival(5.0, 1.0, 0.5, 1.0, 0.0) == 1.0);
    CHECK(gbm_survival_dt(e, 1.0, 0.5, 1.0, 1.0) ==
          doctest::Approx(-0.24197072451914337).epsilon(1e-13));
    CHECK_THROWS_AS(gbm_survival(2.0, 1.0, 0.5, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(gbm_survival(2.0, 1.0, 0.5, -1.0, 1.0), std::domain_error);
}
