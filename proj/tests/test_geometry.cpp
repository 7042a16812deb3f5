#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reeblab/geometry.hpp"

using namespace reeblab;

namespace {
const double PI = std::acos(-1.0);
}

TEST_CASE("round sphere: contact form, Reeb field, flow period") {
    EllipsoidModel S(1.0, 1.0, true);
    Vec p(4);
    p << 1, 0, 0, 0;

    Vec X = S.reeb(p);
    CHECK(X(0) == doctest::Approx(0.0));
    CHECK(X(1) == doctest::Approx(2.0));
    CHECK(X(2) == doctest::Approx(0.0));
    CHECK(X(3) == doctest::Approx(2.0 * 0.0));
    CHECK(S.lambda(p, X) == doctest::Approx(1.0));

    // Hopf flow: every point is periodic with period pi.
    auto rng = make_rng(derive_seed(7, 0));
    for (int i = 0; i < 10; ++i) {
        Vec q = S.random_point(rng);
        CHECK((S.exact_flow(q, PI) - q).norm() < 1e-12);
        CHECK((S.exact_flow(q, PI / 2) - q).norm() > 0.5); // primitive
    }
}

TEST_CASE("ellipsoid: constraint, exact flow, parameter validation") {
    const double b = std::sqrt(2.0);
    EllipsoidModel E(1.0, b);

    auto rng = make_rng(derive_seed(7, 1));
    for (int i = 0; i < 10; ++i) {
        Vec q = E.random_point(rng);
        CHECK(std::abs(*E.constraint(q)) < 1e-12);
        Vec qt = E.exact_flow(q, 0.37);
        CHECK(std::abs(*E.constraint(qt)) < 1e-12);
        // exact flow solves the Reeb ODE
        double h = 1e-6;
        Vec fd = (E.exact_flow(q, h) - E.exact_flow(q, -h)) / (2 * h);
        CHECK((fd - E.reeb(q)).norm() < 1e-8);
    }
    CHECK_THROWS_AS(EllipsoidModel(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(EllipsoidModel(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("contact axiom residuals pass on all models") {
    auto rng_seed = derive_seed(7, 2);
    for (auto spec : {ModelSpec{ModelId::round_sphere, 1, 1, 0},
                      ModelSpec{ModelId::ellipsoid, 1.0, std::sqrt(2.0), 0},
                      ModelSpec{ModelId::lift_box, 1, 1, 0}}) {
        auto M = make_model(spec);
        ContactReport rep = verify_contact(*M, 200, 1e-9, rng_seed);
        INFO("model ", to_string(spec.model));
        CHECK(rep.pass);
        CHECK(rep.max_reeb_normalization < 1e-12);
        CHECK(rep.max_reeb_kernel < 1e-12);
        CHECK(rep.min_positivity > 1e-3);
    }
}

TEST_CASE("oriented frame gives positive contact volume (normal-first sign)") {
    // At p = (1,0,0,0): lambda ^ dlambda evaluated on an oriented orthonormal
    // tangent frame must be +1/2 (ties the orientation to Stokes on the
    // 4-ball, which gives total volume +pi^2).
    EllipsoidModel S(1.0, 1.0, true);
    Vec p(4);
    p << 1, 0, 0, 0;
    Mat f = S.oriented_tangent_frame(p);
    const Vec u1 = f.col(0), u2 = f.col(1), u3 = f.col(2);
    double vol3 = S.lambda(p, u1) * S.dlambda(p, u2, u3) -
                  S.lambda(p, u2) * S.dlambda(p, u1, u3) +
                  S.lambda(p, u3) * S.dlambda(p, u1, u2);
    CHECK(vol3 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("helicity: pi^2 on the round sphere, pi^2 ab on ellipsoids") {
    EllipsoidModel S(1.0, 1.0, true);
    auto est = helicity(S, 2000, derive_seed(7, 3));
    // Density is constant on the round sphere: zero-variance estimator.
    CHECK(est.value == doctest::Approx(PI * PI).epsilon(1e-10));
    CHECK(est.std_error < 1e-10);

    const double b = std::sqrt(2.0);
    EllipsoidModel E(1.0, b);
    auto est2 = helicity(E, 200000, derive_seed(7, 4));
    CHECK(std::abs(est2.value - PI * PI * b) < 5 * est2.std_error + 1e-6);
    CHECK(std::abs(est2.value - PI * PI * b) < 0.02);

    LiftBoxModel box;
    CHECK_THROWS_AS(helicity(box, 10, 0), std::invalid_argument);
}

TEST_CASE("lift box: flat contact structure") {
    LiftBoxModel B;
    Vec p(3), R = B.reeb(p);
    p << 0.3, -0.2, 0.5;
    CHECK(R(2) == doctest::Approx(1.0));
    CHECK(B.lambda(p, R) == doctest::Approx(1.0));
    Vec ex(3), ey(3);
    ex << 1, 0, 0;
    ey << 0, 1, 0;
    CHECK(B.dlambda(p, ex, ey) == doctest::Approx(1.0));
    CHECK(B.inside(p));
    Vec q(3);
    q << 1.2, 0, 0.5;
    CHECK(!B.inside(q));
}

TEST_CASE("model spec parsing") {
    nlohmann::json j = {{"model", "ellipsoid"}, {"a", 1.0}, {"b", 2.0}, {"seed", 42}};
    ModelSpec s = parse_model_spec(j);
    CHECK(s.model == ModelId::ellipsoid);
    CHECK(s.a == 1.0);
    CHECK(s.b == 2.0);
    CHECK(s.seed == 42);

    nlohmann::json bad = {{"model", "torus"}};
    CHECK_THROWS_AS(parse_model_spec(bad), std::invalid_argument);
    nlohmann::json missing = {{"model", "ellipsoid"}, {"a", 1.0}};
    CHECK_THROWS(parse_model_spec(missing));

    auto M = make_model(parse_model_spec(nlohmann::json{{"model", "round_sphere"}}));
    CHECK(M->model_id() == ModelId::round_sphere);
}
