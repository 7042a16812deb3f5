// End-to-end acceptance runner: one self-contained check per shipped
// guarantee, each printing a pass/fail line with its wall time. Exits
// nonzero if any check fails. All tolerances are pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "reeblab/entropy.hpp"
#include "reeblab/liftaxiom.hpp"
#include "reeblab/sfs.hpp"

using namespace reeblab;

namespace {

const double PI = std::acos(-1.0);
const double SQRT2 = std::sqrt(2.0);

int g_failures = 0;

void criterion(int k, const char* what, const std::function<bool()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string note;
    try {
        ok = body();
    } catch (const std::exception& e) {
        note = std::string(" (exception: ") + e.what() + ")";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d: %s (%.1fs)%s\n", ok ? "[PASS]" : "[FAIL]", k, what,
                secs, note.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

bool close(double a, double b, double tol) { return std::abs(a - b) < tol; }

PeriodicOrbit exact_fiber(const EllipsoidModel& S, const Vec& p, int n_samples = 256) {
    PeriodicOrbit orb;
    orb.base_point = p;
    orb.period = PI * S.a();
    for (int k = 0; k < n_samples; ++k)
        orb.samples.push_back(S.exact_flow(p, orb.period * k / n_samples));
    return orb;
}

Eigen::Matrix2d rotation_generator(double c) {
    Eigen::Matrix2d j;
    j << 0, -c, c, 0;
    return j;
}

// shared round-sphere link/class fixture with rejection-sampled measures
struct RoundFixture {
    EllipsoidModel S{1, 1, true};
    std::shared_ptr<std::vector<LinkComponent>> link;
    CohomologyClass y;
    std::vector<WeightedOrbitMeasure> measures;
    std::vector<BirkhoffSegment> segments;

    RoundFixture(int n_measures, int n_segments, std::uint64_t seed) {
        Vec h0(4);
        h0 << 1, 0, 0, 0;
        link = std::make_shared<std::vector<LinkComponent>>();
        link->push_back(make_link_component(S, exact_fiber(S, h0)));
        y = make_linking_class(S, link, Vec::Ones(1));

        auto rng = make_rng(seed);
        while (static_cast<int>(measures.size()) < n_measures) {
            Vec p = S.random_point(rng);
            if (y.distance_to_link(p) < 0.1) continue;
            WeightedOrbitMeasure mu;
            mu.atoms.emplace_back(exact_fiber(S, p), 1.0);
            measures.push_back(std::move(mu));
        }
        while (static_cast<int>(segments.size()) < n_segments) {
            Vec p = S.random_point(rng);
            if (y.distance_to_link(p) < 0.1) continue;
            segments.push_back(make_birkhoff_segment(S, p, 5 * PI));
        }
    }
};

// ---------------------------------------------------------------------------

bool c1_orbit_census() {
    EllipsoidModel E(1.0, SQRT2);
    auto rng = make_rng(derive_seed(1001, 0));
    std::vector<Vec> seeds;
    for (int i = 0; i < 200; ++i) seeds.push_back(E.random_point(rng));
    auto orbits = find_periodic_orbits(E, seeds, 5.0);
    if (orbits.size() != 2) return false;
    bool ok = close(orbits[0].period, PI, 1e-6) && close(orbits[1].period, PI * SQRT2, 1e-6);
    for (const auto& o : orbits)
        ok = ok && o.orbit_type == OrbitType::elliptic && o.nondegenerate_up_to == 20;
    return ok;
}

bool c2_rotation_closed_form() {
    auto rng = make_rng(derive_seed(1002, 0));
    std::uniform_real_distribution<double> unif(-2.0, 2.0), unifT(0.5, 3.0);
    for (int i = 0; i < 10; ++i) {
        const double p = unif(rng), q = unif(rng), c = unif(rng), T = unifT(rng);
        auto F = synthetic_frame(T, [c](double) { return rotation_generator(c); });
        auto res = rotation_number(F, p, q, 20 * T, 1e-9);
        if (!res.converged) return false;
        if (!close(res.rho, (T / (2 * PI)) * (p + q * c), 1e-9)) return false;
    }
    return true;
}

bool c3_action_linking() {
    EllipsoidModel S(1, 1, true);
    Vec h0(4);
    h0 << 1, 0, 0, 0;
    std::vector<LinkComponent> link{make_link_component(S, exact_fiber(S, h0))};
    SeifertMesh mesh = make_hopf_disk_mesh(256, 16);
    validate_mesh(mesh, link);

    // independent volume oracle: seeded Monte-Carlo helicity near pi^2
    auto hel = helicity(S, 200000, derive_seed(1003, 0));
    if (!close(hel.value, PI * PI, 0.05)) return false;

    std::vector<WeightedOrbitMeasure> mu_seq;
    for (int n : {10, 100, 1000})
        mu_seq.push_back(uniform_fiber_measure(S, n, derive_seed(1003, n)));

    CrossingOptions opts;
    opts.base_segments = 64;
    auto rep = action_linking_report(S, mu_seq, mesh, link, PI * PI, opts);
    return close(rep.target, PI, 1e-12) && rep.final_gap < 1e-3 &&
           close(rep.surface_integral, rep.target, 1e-3);
}

bool c4_boundary_measure_identity() {
    EllipsoidModel E(1.0, SQRT2);
    Vec p0(4);
    p0 << 1, 0, 0, 0;
    TubularFrame F = build_tubular_frame(E, make_orbit(E, p0, PI));
    auto rng = make_rng(derive_seed(1004, 0));
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int i = 0; i < 5; ++i) {
        const double p = unif(rng), q = unif(rng);
        const double lhs = torus_measure_intersection(F, p, q, 200 * F.period);
        const double rho = rotation_number(F, p, q, 20 * F.period, 1e-9).rho;
        if (!close(lhs, (2 * PI / F.period) * rho, 1e-6)) return false;
    }
    return true;
}

bool c5_section_criterion() {
    RoundFixture fx(50, 20, derive_seed(1005, 0));
    auto rep = check_criterion(fx.S, *fx.link, fx.y, fx.measures, fx.segments);
    if (rep.verdict != Verdict::SATISFIED) return false;
    if (rep.min_measure_value < 1.0 / PI - 1e-3) return false;
    if (rep.rotation_rows.empty() || rep.rotation_rows[0].rho <= 0) return false;

    auto neg = check_criterion(fx.S, *fx.link, fx.y.scaled(-1.0), fx.measures, fx.segments);
    if (neg.verdict != Verdict::VIOLATED) return false;

    std::vector<CohomologyClass> basis{fx.y, fx.y.scaled(-1.0)};
    auto lp = search_positive_class(fx.S, *fx.link, basis, fx.measures, fx.segments);
    return lp.feasible && lp.t_star > 0 && lp.certified_min_slack >= lp.t_star - 1e-8;
}

bool c6_pr_map_diagnostics() {
    RoundFixture fx(0, 0, derive_seed(1006, 0));
    Vec bp(4);
    bp << 0, 0, 1, 0;
    auto cand = build_pr_map(fx.S, fx.y, bp);

    auto rng = make_rng(derive_seed(1006, 1));
    std::vector<Vec> pts;
    while (pts.size() < 100) {
        Vec p = fx.S.random_point(rng);
        if (fx.y.distance_to_link(p) >= 0.1) pts.push_back(p);
    }
    for (double level : {0.0, 1.0 / 3.0, 0.62}) {
        auto diag = section_diagnostics(fx.S, cand, level, pts, 20.0);
        if (diag.failures != 0 || diag.min_eta_X <= 0) return false;
        if (diag.max_forward_hit >= 4.0 || diag.max_backward_hit >= 4.0) return false;
    }

    // path independence of pr mod 1: direct chord vs a random relay point
    int trials = 0;
    while (trials < 10) {
        Vec p = fx.S.random_point(rng), q = fx.S.random_point(rng);
        if (fx.y.distance_to_link(p) < 0.1 || fx.y.distance_to_link(q) < 0.1) continue;
        const double direct = cand.eta.segment_integral_refined(fx.S, bp, p);
        const double relayed = cand.eta.segment_integral_refined(fx.S, bp, q) +
                               cand.eta.segment_integral_refined(fx.S, q, p);
        if (std::abs(std::remainder(direct - relayed, 1.0)) >= 1e-6) return false;
        ++trials;
    }
    return true;
}

bool c7_lift_axiom() {
    LiftBoxModel box;
    auto rep = verify_lift(box, build_lift(box, {0.01, 0.0}, 0.05));
    if (rep.endpoint_error >= 1e-6 || !rep.support_ok || !rep.stayed_in_box) return false;

    // z0 = 0 reproduces the unperturbed form exactly
    auto triv = verify_lift(box, build_lift(box, {0.0, 0.0}, 0.05));
    if (triv.endpoint_error >= 1e-12 || triv.norms[0] != 0.0 || triv.norms[2] != 0.0)
        return false;

    double kmin = 1e300, kmax = 0;
    for (double s : {0.001, 0.005, 0.01}) {
        auto r = verify_lift(box, build_lift(box, {s, 0.0}, 0.05));
        if (r.endpoint_error >= 1e-6 || !r.support_ok) return false;
        kmin = std::min(kmin, r.K_measured[2]);
        kmax = std::max(kmax, r.K_measured[2]);
    }
    return kmax / kmin < 2.0;
}

bool c8_entropy_estimator() {
    // flat benchmark: the isometric round-sphere flow separates nothing
    EllipsoidModel S(1, 1, true);
    ReebFlowAdapter F(S, 2.0, [&S](const Vec& p, double t) { return S.exact_flow(p, t); });
    auto rng = make_rng(derive_seed(1008, 0));
    std::vector<Vec> cloud;
    for (int i = 0; i < 1500; ++i) cloud.push_back(S.random_point(rng));
    auto flat = entropy_estimate(F, cloud, {1, 2, 3, 4, 5}, {0.4}, derive_seed(1008, 1));
    if (std::abs(flat.h_estimate) > 0.05) return false;

    // positive benchmark with a closed-form value, 64^2 seeded cloud, T <= 3
    CatMapSuspension C;
    auto rng2 = make_rng(derive_seed(1008, 2));
    std::vector<Vec> cloud2;
    for (int i = 0; i < 64 * 64; ++i) cloud2.push_back(C.random_point(rng2));
    auto tab = entropy_estimate(C, cloud2, {1, 2, 3}, {0.3}, derive_seed(1008, 3));
    const double exact = CatMapSuspension::exact_entropy();
    if (std::abs(tab.h_estimate - exact) > 0.10 * exact) return false;

    // greedy counts never exceed the exact brute-force maximum
    std::vector<Vec> small(cloud2.begin(), cloud2.begin() + 48);
    const int brute = max_separated_count(C, small, 2.0, 0.5);
    for (std::uint64_t seed = 0; seed < 5; ++seed)
        if (separated_count(C, small, 2.0, 0.5, seed) > brute) return false;
    return true;
}

bool c9_weakstar_harness() {
    EllipsoidModel S(1, 1, true);
    // smooth test functions with closed-form Liouville integrals (sphere
    // moments; cos(x1) via the Bessel identity)
    std::vector<std::function<double(const Vec&)>> fs;
    std::vector<double> targets;
    for (int i = 0; i < 4; ++i) {
        fs.push_back([i](const Vec& p) { return p(i) * p(i); });
        targets.push_back(0.25);
    }
    fs.push_back([](const Vec& p) { return std::pow(p(0), 4); });
    targets.push_back(0.125);
    fs.push_back([](const Vec& p) { return std::pow(p(2), 4); });
    targets.push_back(0.125);
    fs.push_back([](const Vec& p) { return p(0) * p(0) * p(1) * p(1); });
    targets.push_back(1.0 / 24);
    fs.push_back([](const Vec& p) { return p(0) * p(0) * p(2) * p(2); });
    targets.push_back(1.0 / 24);
    fs.push_back([](const Vec& p) { return p(0) * p(0) + p(1) * p(1); });
    targets.push_back(0.5);
    fs.push_back([](const Vec& p) { return std::cos(p(0)); });
    targets.push_back(2 * std::cyl_bessel_j(1, 1.0));

    // open-set variant: {|z1|^2 > 1/2} has Liouville measure 1/2 and
    // Liouville-null boundary (|z1|^2 is uniform on [0, 1])
    auto indicator = [](const Vec& p) {
        return (p(0) * p(0) + p(1) * p(1)) > 0.5 ? 1.0 : 0.0;
    };

    double prev_smooth = 1e300, prev_open = 1e300, last_smooth = 0, last_open = 0;
    for (int n : {10, 100, 1000}) {
        auto mu = uniform_fiber_measure(S, n, derive_seed(1, n));
        double smooth_err = 0;
        for (std::size_t i = 0; i < fs.size(); ++i)
            smooth_err = std::max(smooth_err,
                                  std::abs(measure_integral(mu, fs[i]) - targets[i]));
        const double open_err = std::abs(measure_integral(mu, indicator) - 0.5);
        if (smooth_err > prev_smooth || open_err > prev_open) return false;
        prev_smooth = smooth_err;
        prev_open = open_err;
        last_smooth = smooth_err;
        last_open = open_err;
    }
    return last_smooth < 0.05 && last_open < 0.05;
}

bool c10_invariant_suites() {
    EllipsoidModel E(1.0, SQRT2);
    EllipsoidModel S(1, 1, true);

    // symplectic transverse monodromy on both short closed orbits
    for (auto [axis, T] : std::vector<std::pair<int, double>>{{0, PI}, {2, PI * SQRT2}}) {
        Vec p0 = Vec::Zero(4);
        p0(axis) = (axis == 0) ? 1.0 : std::sqrt(SQRT2); // |z_j|^2 = a_j on axis orbits
        auto M2 = transverse_monodromy(E, p0, T);
        if (!close(M2.determinant(), 1.0, 1e-6)) return false;
    }

    auto rng = make_rng(derive_seed(1010, 0));
    for (int i = 0; i < 5; ++i) {
        // flow reversibility
        Vec x = E.random_point(rng);
        if ((flow(E, flow(E, x, 1.7), -1.7) - x).norm() >= 1e-7) return false;

        // cocycle identity of the linearized transport
        const double t = 0.9, s = 1.3;
        auto [y, Dt] = transport_linearized(E, x, t);
        auto [z1, Ds] = transport_linearized(E, y, s);
        auto [z2, Dts] = transport_linearized(E, x, t + s);
        if ((z1 - z2).norm() >= 1e-7) return false;
        if ((Ds * Dt - Dts).norm() >= 1e-6) return false;
    }

    // crossing counts are exactly invariant under midpoint mesh refinement
    Vec h0(4);
    h0 << 1, 0, 0, 0;
    std::vector<LinkComponent> link{make_link_component(S, exact_fiber(S, h0))};
    SeifertMesh mesh = make_hopf_disk_mesh(64, 8);
    SeifertMesh fine = midpoint_subdivision(mesh);
    CrossingOptions opts;
    opts.base_segments = 64;
    auto mu = uniform_fiber_measure(S, 20, derive_seed(1010, 1));
    for (const auto& [orb, w] : mu.atoms) {
        const int a = orbit_surface_intersection(S, orb, mesh, opts);
        const int b = orbit_surface_intersection(S, orb, fine, opts);
        if (a != b || a != 1) return false;
    }

    // determinism of seeded reports
    auto h1 = helicity(S, 50000, 7), h2 = helicity(S, 50000, 7);
    if (h1.value != h2.value || h1.std_error != h2.std_error) return false;
    auto m1 = uniform_fiber_measure(S, 5, 11), m2 = uniform_fiber_measure(S, 5, 11);
    for (int i = 0; i < 5; ++i)
        if (m1.atoms[i].first.base_point != m2.atoms[i].first.base_point) return false;
    CatMapSuspension C;
    auto rng2 = make_rng(3);
    std::vector<Vec> cloud;
    for (int i = 0; i < 200; ++i) cloud.push_back(C.random_point(rng2));
    if (separated_count(C, cloud, 2.0, 0.3, 5) != separated_count(C, cloud, 2.0, 0.3, 5))
        return false;
    return true;
}

} // namespace

int main() {
    criterion(1, "ellipsoid orbit census: 2 orbits, analytic periods, elliptic",
              c1_orbit_census);
    criterion(2, "rotation-number closed form on constant-rate frames",
              c2_rotation_closed_form);
    criterion(3, "action-linking identity on the Hopf spanning disk", c3_action_linking);
    criterion(4, "blow-up torus measure pairing matches the rotation number",
              c4_boundary_measure_identity);
    criterion(5, "section criterion verdicts and positive-class LP certificate",
              c5_section_criterion);
    criterion(6, "pr-map diagnostics: eta(X) > 0, bounded hits, path independence",
              c6_pr_map_diagnostics);
    criterion(7, "flow-box steering perturbation: endpoint, support, K stability",
              c7_lift_axiom);
    criterion(8, "entropy estimator: flat flow, suspension benchmark, greedy <= exact",
              c8_entropy_estimator);
    criterion(9, "weak-star convergence of fiber measures, smooth and open-set",
              c9_weakstar_harness);
    criterion(10, "invariant suites: symplectic, reversibility, cocycle, refinement,"
                  " determinism",
              c10_invariant_suites);

    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return 1;
}
