#include "reeblab/sfs.hpp"

#include <cmath>
#include <numeric>

namespace reeblab {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::SATISFIED: return "SATISFIED";
        case Verdict::VIOLATED: return "VIOLATED";
        case Verdict::INCONCLUSIVE: return "INCONCLUSIVE";
    }
    return "?";
}

SectionCriterionReport check_criterion(const ContactManifold& M,
                                       const std::vector<LinkComponent>& link,
                                       const CohomologyClass& y,
                                       const std::vector<WeightedOrbitMeasure>& orbit_samples,
                                       const std::vector<BirkhoffSegment>& segment_samples,
                                       double margin, double rot_tol) {
    SectionCriterionReport rep;
    rep.margin = margin;

    const double norm = y.coeffs.lpNorm<1>();
    const CohomologyClass yn = norm > 0 ? y.scaled(1.0 / norm) : y;

    for (const auto& mu : orbit_samples)
        rep.measure_rows.push_back(measure_intersection(M, mu, yn));
    for (const auto& seg : segment_samples)
        rep.measure_rows.push_back(measure_intersection(M, seg, yn));
    rep.min_measure_value = rep.measure_rows.empty()
                                ? 0.0
                                : *std::min_element(rep.measure_rows.begin(),
                                                    rep.measure_rows.end());

    for (std::size_t k = 0; k < link.size(); ++k) {
        const auto [p, q] = yn.per_component[k];
        auto rot = rotation_number(link[k].frame, p, q, 64 * link[k].frame.period, rot_tol);
        rep.rotation_rows.push_back({static_cast<int>(k), rot.rho, rot.converged,
                                     rot.window_gap});
    }

    bool violated = false, all_positive = !rep.measure_rows.empty();
    for (double v : rep.measure_rows) {
        if (v < -margin) violated = true;
        if (!(v > margin)) all_positive = false;
    }
    for (const auto& r : rep.rotation_rows) {
        if (r.converged && r.rho < -margin) violated = true;
        if (!(r.converged && r.rho > margin)) all_positive = false;
    }
    rep.verdict = violated ? Verdict::VIOLATED
                           : (all_positive ? Verdict::SATISFIED : Verdict::INCONCLUSIVE);
    return rep;
}

ClassSearchResult solve_positive_class_lp(const Mat& rows) {
    const int m = static_cast<int>(rows.rows());
    const int nb = static_cast<int>(rows.cols());
    if (m < 1) throw std::invalid_argument("positive-class LP needs at least one row");

    // variables: y+ (nb), y- (nb), t+, t-
    Mat A = Mat::Zero(m + 1, 2 * nb + 2);
    Vec b = Vec::Zero(m + 1), c = Vec::Zero(2 * nb + 2);
    A.block(0, 0, m, nb) = -rows;
    A.block(0, nb, m, nb) = rows;
    A.col(2 * nb).head(m).setOnes();   // + t+
    A.col(2 * nb + 1).head(m) = -Vec::Ones(m);
    A.row(m).head(2 * nb).setOnes();   // |y|_1 <= 1
    b(m) = 1.0;
    c(2 * nb) = 1.0;
    c(2 * nb + 1) = -1.0;

    LpResult lp = simplex_maximize(A, b, c);
    if (!lp.optimal) throw std::runtime_error("positive-class LP: solver iteration cap");

    ClassSearchResult res;
    res.rows = rows;
    res.coefficients = lp.x.head(nb) - lp.x.segment(nb, nb);
    res.t_star = lp.value;
    res.certified_min_slack = (rows * res.coefficients).minCoeff();
    res.feasible = res.t_star > 0;
    return res;
}

nlohmann::json lp_instance_json(const Mat& rows) {
    nlohmann::json j;
    j["objective"] = "max t : rows . y >= t, l1_norm(y) <= norm_cap";
    j["norm_cap"] = 1.0;
    j["rows"] = nlohmann::json::array();
    for (int i = 0; i < rows.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (int k = 0; k < rows.cols(); ++k) r.push_back(rows(i, k));
        j["rows"].push_back(std::move(r));
    }
    return j;
}

ClassSearchResult search_positive_class(const ContactManifold& M,
                                        const std::vector<LinkComponent>& link,
                                        const std::vector<CohomologyClass>& basis,
                                        const std::vector<WeightedOrbitMeasure>& measure_samples,
                                        const std::vector<BirkhoffSegment>& segment_samples,
                                        double margin) {
    (void)margin;
    const int nb = static_cast<int>(basis.size());
    if (nb < 1) throw std::invalid_argument("empty class basis");

    const int m = static_cast<int>(measure_samples.size() + segment_samples.size() + link.size());
    Mat rows(m, nb);
    int r = 0;
    for (const auto& mu : measure_samples) {
        for (int j = 0; j < nb; ++j) rows(r, j) = measure_intersection(M, mu, basis[j]);
        ++r;
    }
    for (const auto& seg : segment_samples) {
        for (int j = 0; j < nb; ++j) rows(r, j) = measure_intersection(M, seg, basis[j]);
        ++r;
    }
    for (std::size_t k = 0; k < link.size(); ++k) {
        for (int j = 0; j < nb; ++j) {
            const auto [p, q] = basis[j].per_component[k];
            auto rot = rotation_number(link[k].frame, p, q, 64 * link[k].frame.period, 1e-8);
            if (!rot.converged)
                throw std::runtime_error("rotation row did not converge for the LP");
            rows(r, j) = rot.rho;
        }
        ++r;
    }
    return solve_positive_class_lp(rows);
}

long integerize_scale(const std::vector<double>& v, double tol, long max_denominator) {
    for (long mlt = 1; mlt <= max_denominator; ++mlt) {
        bool ok = true;
        for (double x : v)
            if (std::abs(mlt * x - std::round(mlt * x)) > tol) {
                ok = false;
                break;
            }
        if (ok) return mlt;
    }
    double worst = v.empty() ? 0.0 : v[0];
    for (double x : v)
        if (std::abs(x - std::round(x)) > std::abs(worst - std::round(worst))) worst = x;
    throw std::invalid_argument("period not rational within tolerance: " + std::to_string(worst));
}

SectionCandidate build_pr_map(const ContactManifold& M, const CohomologyClass& y,
                              const Vec& basepoint, double tol) {
    (void)M;
    std::vector<double> meridian_periods;
    for (const auto& [p, q] : y.per_component) {
        (void)p;
        meridian_periods.push_back(2.0 * M_PI * q);
    }
    const long mlt = integerize_scale(meridian_periods, tol, 1000);

    SectionCandidate cand;
    cand.eta = y.scaled(static_cast<double>(mlt));
    long g = 0;
    for (double P : meridian_periods) {
        const long n = std::lround(mlt * P);
        cand.periods.push_back(n);
        g = std::gcd(g, std::labs(n));
    }
    if (g == 0) throw std::invalid_argument("pr map: all class periods vanish");
    cand.N = g;
    cand.basepoint = basepoint;
    return cand;
}

double pr_eval(const ContactManifold& M, const SectionCandidate& cand, const Vec& p) {
    const double raw =
        cand.eta.segment_integral_refined(M, cand.basepoint, p) / static_cast<double>(cand.N);
    double f = std::fmod(raw, 1.0);
    if (f < 0) f += 1.0;
    return f;
}

double pr_loop_degree(const SectionCandidate& cand, const std::vector<Vec>& loop) {
    return cand.eta.loop_integral(loop) / static_cast<double>(cand.N);
}

SectionDiagnostics section_diagnostics(const ContactManifold& M, const SectionCandidate& cand,
                                       double level, const std::vector<Vec>& test_points,
                                       double t_cap) {
    SectionDiagnostics diag;
    diag.min_eta_X = std::numeric_limits<double>::infinity();
    const int n = M.ambient_dim();

    auto rhs = [&](double, const Vec& s) {
        Vec d(n + 1);
        Vec p = s.head(n);
        d.head(n) = M.reeb(p);
        d(n) = cand.eta.iota_X(M, p) / static_cast<double>(cand.N);
        return d;
    };
    OdeOptions opts;
    opts.post_step = [&](Vec& s) { s.head(n) = M.project(s.head(n)); };

    for (const Vec& p : test_points) {
        diag.min_eta_X = std::min(diag.min_eta_X, cand.eta.iota_X(M, p));
        const double c0 = pr_eval(M, cand, p);

        for (int dir : {+1, -1}) {
            double target = dir > 0 ? std::fmod(level - c0, 1.0) : std::fmod(c0 - level, 1.0);
            if (target < 0) target += 1.0;
            if (target < 1e-12) target = 1.0; // starting on the level: next wrap

            Vec s(n + 1);
            s.head(n) = p;
            s(n) = 0;
            const double dt = 0.05;
            double t = 0, u_prev = 0;
            bool hit = false;
            while (t < t_cap && !hit) {
                const double step = std::min(dt, t_cap - t);
                s = integrate_dopri5(rhs, s, dir * t, dir * (t + step), opts);
                t += step;
                const double u = dir * s(n); // unwrapped pr progress toward the level
                if (u >= target) {
                    const double frac = (target - u_prev) / (u - u_prev);
                    const double t_hit = t - step + frac * step;
                    hit = true;
                    if (dir > 0) {
                        diag.forward_hits.push_back(t_hit);
                        diag.max_forward_hit = std::max(diag.max_forward_hit, t_hit);
                    } else {
                        diag.backward_hits.push_back(t_hit);
                        diag.max_backward_hit = std::max(diag.max_backward_hit, t_hit);
                    }
                }
                u_prev = u;
            }
            if (!hit) ++diag.failures;
        }
    }
    return diag;
}

} // namespace reeblab
