#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reeblab/entropy.hpp"

using namespace reeblab;

namespace {
std::vector<Vec> random_cloud(const FlowSystem& F, int n, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::vector<Vec> cloud;
    for (int i = 0; i < n; ++i) cloud.push_back(F.random_point(rng));
    return cloud;
}
} // namespace

TEST_CASE("suspension flow of the hyperbolic torus map") {
    CatMapSuspension F;
    Vec p(3);
    p << 0.2, 0.3, 0.9;

    // one wrap applies the map once
    Vec q = F.flow(p, 0.2);
    CHECK(q(0) == doctest::Approx(0.7));
    CHECK(q(1) == doctest::Approx(0.5));
    CHECK(q(2) == doctest::Approx(0.1));

    // flow property and invertibility
    Vec a = F.flow(p, 3.7);
    Vec b = F.flow(F.flow(p, 1.4), 2.3);
    CHECK(F.distance(a, b) < 1e-12);
    CHECK(F.distance(F.flow(a, -3.7), p) < 1e-12);

    // torus metric wraps around
    Vec u(3), v(3);
    u << 0.99, 0.5, 0.0;
    v << 0.01, 0.5, 0.0;
    CHECK(F.distance(u, v) == doctest::Approx(0.02));
    CHECK(F.distance(u, v) == F.distance(v, u));

    CHECK(CatMapSuspension::exact_entropy() ==
          doctest::Approx(std::log((3 + std::sqrt(5.0)) / 2)));
}

TEST_CASE("dT distance grows with the horizon") {
    CatMapSuspension F;
    Vec p(3), q(3);
    p << 0.10, 0.20, 0.0;
    q << 0.11, 0.20, 0.0;
    const double d0 = F.distance(p, q);
    double prev = 0;
    for (double T : {0.5, 2.0, 4.0, 6.0}) {
        const double d = dT_distance(F, p, q, T, 0.05);
        CHECK(d >= d0);
        CHECK(d >= prev);
        prev = d;
    }
    // nearby points on the expanding direction do separate
    CHECK(dT_distance(F, p, q, 8.0, 0.05) > 0.3);
}

TEST_CASE("greedy separation never beats the exact oracle") {
    CatMapSuspension F;

    // hand case: two close points and one far one
    std::vector<Vec> tiny(3, Vec(3));
    tiny[0] << 0.0, 0.0, 0.0;
    tiny[1] << 0.01, 0.0, 0.0;
    tiny[2] << 0.5, 0.5, 0.5;
    CHECK(max_separated_count(F, tiny, 0.1, 0.1) == 2);
    CHECK(separated_count(F, tiny, 0.1, 0.1, 1) == 2);

    auto cloud = random_cloud(F, 48, derive_seed(31, 1));
    const double T = 2.0, eps = 0.5;
    const int exact = max_separated_count(F, cloud, T, eps);
    CHECK(exact >= 1);
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const int greedy = separated_count(F, cloud, T, eps, seed);
        CHECK(greedy <= exact);
        CHECK(greedy >= 1);
    }

    auto big = random_cloud(F, 300, derive_seed(31, 2));
    CHECK_THROWS_AS(max_separated_count(F, big, T, eps), std::invalid_argument);
}

TEST_CASE("zero-entropy flow: round-sphere Reeb flow has flat growth") {
    EllipsoidModel S(1, 1, true);
    ReebFlowAdapter F(S, 2.0, [&S](const Vec& p, double t) { return S.exact_flow(p, t); });

    // the adapter's ODE path agrees with the analytic flow
    ReebFlowAdapter Fode(S, 2.0);
    auto rng = make_rng(derive_seed(31, 3));
    Vec p = S.random_point(rng);
    CHECK((F.flow(p, 1.3) - Fode.flow(p, 1.3)).norm() < 1e-8);

    auto cloud = random_cloud(F, 1500, derive_seed(31, 4));
    auto tab = entropy_estimate(F, cloud, {1, 2, 3, 4, 5}, {0.4}, derive_seed(31, 5));
    CHECK(std::abs(tab.h_estimate) <= 0.05);
    // counts are flat in T up to greedy shuffle noise (fresh seed per cell)
    for (int t = 1; t < 5; ++t)
        CHECK(std::abs(tab.counts(0, t) - tab.counts(0, t - 1)) <=
              0.05 * tab.counts(0, 0) + 2);
}

TEST_CASE("cat-map suspension entropy estimate approaches the closed form") {
    CatMapSuspension F;
    auto cloud = random_cloud(F, 20000, derive_seed(31, 6));
    auto tab = entropy_estimate(F, cloud, {1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5}, {0.4},
                                derive_seed(31, 7));
    const double h = CatMapSuspension::exact_entropy();
    CHECK(tab.h_estimate == doctest::Approx(h).epsilon(0.15));
    CHECK(tab.residuals[0] < 0.25);

    CHECK_THROWS_AS(entropy_estimate(F, cloud, {1.0}, {0.4}, 0), std::invalid_argument);
}
