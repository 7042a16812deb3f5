#ifndef REEBLAB_SFS_HPP
#define REEBLAB_SFS_HPP

#include "reeblab/measures.hpp"
#include "reeblab/simplex.hpp"

namespace reeblab {

enum class Verdict { SATISFIED, VIOLATED, INCONCLUSIVE };

std::string to_string(Verdict v);

struct RotationRow {
    int component = 0;
    double rho = 0;
    bool converged = false;
    double window_gap = 0;
};

// Evidence report for the section criterion: rotation numbers on the link
// and intersection numbers of sampled invariant measures, all against a
// single class. Margins are applied after normalizing the class to unit
// l1 coefficients, making the verdict scale-invariant.
struct SectionCriterionReport {
    std::vector<RotationRow> rotation_rows;
    std::vector<double> measure_rows;
    double min_measure_value = 0;
    double margin = 0;
    Verdict verdict = Verdict::INCONCLUSIVE;
};

SectionCriterionReport check_criterion(const ContactManifold& M,
                                       const std::vector<LinkComponent>& link,
                                       const CohomologyClass& y,
                                       const std::vector<WeightedOrbitMeasure>& orbit_samples,
                                       const std::vector<BirkhoffSegment>& segment_samples,
                                       double margin = 1e-4, double rot_tol = 1e-6);

// Finite feasibility surrogate: max t with row(mu_i, y) >= t,
// rho^y(gamma_k) >= t, |coefficients|_1 <= 1, over the span of the basis
// classes. Feasible evidence iff t* > 0.
struct ClassSearchResult {
    bool feasible = false;
    Vec coefficients;    // in the basis
    double t_star = 0;
    double certified_min_slack = 0; // constraints re-evaluated at the optimizer
    Mat rows;            // one constraint row per sample / link component
};

ClassSearchResult search_positive_class(const ContactManifold& M,
                                        const std::vector<LinkComponent>& link,
                                        const std::vector<CohomologyClass>& basis,
                                        const std::vector<WeightedOrbitMeasure>& measure_samples,
                                        const std::vector<BirkhoffSegment>& segment_samples,
                                        double margin = 1e-4);

// Same LP but from a precomputed row matrix (one column per basis element);
// also the hook for dumping instances.
ClassSearchResult solve_positive_class_lp(const Mat& rows);
nlohmann::json lp_instance_json(const Mat& rows);

// Scale factor m such that m * v is integral within tol, searching
// denominators up to max_denominator. Throws naming the offending value.
long integerize_scale(const std::vector<double>& v, double tol = 1e-6,
                      long max_denominator = 100000);

// Circle-valued map pr(p) = (1/N) int_{p0}^p eta mod 1, where eta = m * y
// has integer periods n_k = m * 2 pi q_k over the link meridians and
// N = gcd(n_k).
struct SectionCandidate {
    CohomologyClass eta; // scaled class with integer meridian periods
    std::vector<long> periods;
    long N = 1;
    Vec basepoint;
};

SectionCandidate build_pr_map(const ContactManifold& M, const CohomologyClass& y,
                              const Vec& basepoint, double tol = 1e-6);

// pr by path integration along the projected great-circle path from the
// basepoint, with adaptive subdivision of large angle steps.
double pr_eval(const ContactManifold& M, const SectionCandidate& cand, const Vec& p);

// (1/N) . winding of eta along a closed polyline: the degree of pr o c.
double pr_loop_degree(const SectionCandidate& cand, const std::vector<Vec>& loop);

struct SectionDiagnostics {
    double min_eta_X = 0;
    double max_forward_hit = 0;
    double max_backward_hit = 0; // |t_-|
    int failures = 0;            // points that exhausted t_cap
    std::vector<double> forward_hits, backward_hits;
};

// For each test point, flow forward/backward until pr crosses the level;
// also reports the minimum of eta(X) over the test points.
SectionDiagnostics section_diagnostics(const ContactManifold& M, const SectionCandidate& cand,
                                       double level, const std::vector<Vec>& test_points,
                                       double t_cap);

} // namespace reeblab

#endif
