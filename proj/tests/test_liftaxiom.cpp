#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reeblab/liftaxiom.hpp"

using namespace reeblab;

TEST_CASE("ramp profile: monotone, flat near the endpoints, smooth") {
    LiftBoxModel box;
    auto pert = build_lift(box, {0.01, 0.0}, 0.05);

    CHECK(pert.beta(0.0) == 0.0);
    CHECK(pert.beta(0.05) == 0.0);
    CHECK(pert.beta(0.95) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pert.beta(1.0) == 1.0);
    CHECK(pert.beta_d(0.05) == 0.0);
    CHECK(pert.beta_d(0.95) == 0.0);
    double prev = 0;
    for (int i = 0; i <= 100; ++i) {
        const double b = pert.beta(i / 100.0);
        CHECK(b >= prev - 1e-15);
        CHECK(pert.beta_d(i / 100.0) >= 0.0);
        prev = b;
    }
    // the table/Hermite beta is consistent with the analytic derivative
    for (double t : {0.3, 0.5, 0.77}) {
        const double fd = (pert.beta(t + 1e-5) - pert.beta(t - 1e-5)) / 2e-5;
        CHECK(fd == doctest::Approx(pert.beta_d(t)).epsilon(1e-8));
    }
}

TEST_CASE("perturbation invariants along the steering curve") {
    LiftBoxModel box;
    auto pert = build_lift(box, {0.007, 0.004}, 0.05);
    CHECK(pert.plateau_radius() == doctest::Approx(2 * std::hypot(0.007, 0.004)));
    CHECK(pert.support_radius() == doctest::Approx(std::hypot(0.007, 0.004) / 0.05));

    for (double t : {0.0, 0.2, 0.5, 0.8, 1.0}) {
        // V(t) annihilates the planar curve velocity
        CHECK(std::abs(pert.V(t).dot(pert.beta_d(t) * pert.z0)) < 1e-10);
        // h == 1 along the curve
        Vec g(3);
        g << pert.gamma_planar(t)(0), pert.gamma_planar(t)(1), t;
        CHECK(std::abs(pert.h(g) - 1.0) < 1e-10);
        // the contact Hamiltonian field is the curve velocity there
        Vec X = contact_hamiltonian_field(pert, g);
        Vec vel(3);
        vel << pert.beta_d(t) * pert.z0(0), pert.beta_d(t) * pert.z0(1), 1.0;
        CHECK((X - vel).norm() < 1e-8);
    }

    // analytic gradient agrees with central differences off the curve
    Vec p(3);
    p << 0.05, -0.03, 0.45;
    Vec g = pert.grad_h(p);
    for (int ax = 0; ax < 3; ++ax) {
        Vec q = p;
        q(ax) += 1e-6;
        double fp = pert.h(q);
        q(ax) = p(ax) - 1e-6;
        double fm = pert.h(q);
        CHECK((fp - fm) / 2e-6 == doctest::Approx(g(ax)).epsilon(1e-6));
    }
}

TEST_CASE("contact Hamiltonian field against the hand-solved 2x2 system") {
    // h = 1 + x: i_Y dlambda0 = dx forces Y = (0, -1, x/2)
    Vec p(3);
    p << 0.3, -0.2, 0.5;
    Vec grad(3);
    grad << 1, 0, 0;
    Vec X = contact_hamiltonian_field(1.0 + p(0), grad, p);
    CHECK(X(0) == doctest::Approx(0.0));
    CHECK(X(1) == doctest::Approx(-1.0));
    CHECK(X(2) == doctest::Approx(1.0 + p(0) + p(0) / 2));

    // h == 1 reproduces the Reeb field exactly
    Vec X1 = contact_hamiltonian_field(1.0, Vec::Zero(3), p);
    CHECK(X1(0) == 0.0);
    CHECK(X1(1) == 0.0);
    CHECK(X1(2) == 1.0);
}

TEST_CASE("build_lift validation and the trivial perturbation") {
    LiftBoxModel box;
    CHECK_THROWS_AS(build_lift(box, {0.01, 0.0}, 0.1), std::invalid_argument);  // eps = eps_*
    CHECK_THROWS_AS(build_lift(box, {0.01, 0.0}, 0.15), std::invalid_argument); // eps > eps_*
    CHECK_THROWS_AS(build_lift(box, {0.05, 0.0}, 0.05), std::invalid_argument); // |z0| >= eps

    auto triv = build_lift(box, {0.0, 0.0}, 0.05);
    CHECK(triv.trivial());
    Vec p(3);
    p << 0.4, 0.2, 0.3;
    CHECK(triv.h(p) == 1.0);
    CHECK(triv.grad_h(p).norm() == 0.0);
    auto rep = verify_lift(box, triv);
    CHECK(rep.endpoint_error < 1e-12);
    CHECK(rep.support_ok);
    CHECK(rep.norms[0] == 0.0);
    CHECK(rep.norms[2] == 0.0);
}

TEST_CASE("perturbed Reeb flow steers the origin to (z0, 1)") {
    LiftBoxModel box;
    auto pert = build_lift(box, {0.01, 0.0}, 0.05);
    CHECK(pert.support_radius() == doctest::Approx(0.2));
    CHECK(pert.plateau_radius() == doctest::Approx(0.02));

    auto rep = verify_lift(box, pert);
    CHECK(rep.endpoint_error < 1e-6);
    CHECK(rep.support_ok);
    CHECK(rep.stayed_in_box);
    CHECK(rep.norms[0] > 0);

    auto j = lift_report_json(pert, rep);
    CHECK(j.at("endpoint_error").get<double>() < 1e-6);
    CHECK(j.at("support_ok").get<bool>());
    CHECK(j.at("K_measured").at("C2").get<double>() > 0);
}

TEST_CASE("norm scaling in |z0| at fixed eps") {
    LiftBoxModel box;
    // exact self-similarity h - 1 = s^2 g(z / s): halving |z0| quarters the
    // C0 norm, halves the C1 norm, and leaves C2 (hence K) unchanged
    auto big = verify_lift(box, build_lift(box, {0.01, 0.0}, 0.05));
    auto half = verify_lift(box, build_lift(box, {0.005, 0.0}, 0.05));
    CHECK(big.norms[0] / half.norms[0] == doctest::Approx(4.0).epsilon(0.1));
    CHECK(big.norms[1] / half.norms[1] == doctest::Approx(2.0).epsilon(0.1));

    auto tiny = verify_lift(box, build_lift(box, {0.001, 0.0}, 0.05));
    const double kmax = std::max({big.K_measured[2], half.K_measured[2], tiny.K_measured[2]});
    const double kmin = std::min({big.K_measured[2], half.K_measured[2], tiny.K_measured[2]});
    CHECK(kmax / kmin < 2.0);
}
