#ifndef REEBLAB_ENTROPY_HPP
#define REEBLAB_ENTROPY_HPP

#include <functional>

#include "reeblab/geometry.hpp"
#include "reeblab/rng.hpp"

namespace reeblab {

// Minimal flow interface for (T, eps)-separation counts: a point space with
// a metric, a flow map, and a speed bound used to pick the time resolution.
class FlowSystem {
public:
    virtual ~FlowSystem() = default;
    virtual int dim() const = 0;
    virtual Vec flow(const Vec& p, double t) const = 0;
    virtual double distance(const Vec& p, const Vec& q) const = 0;
    virtual Vec random_point(Rng& rng) const = 0;
    virtual double max_speed() const = 0;
};

// Reeb flow of a contact model under the ambient chordal metric. An analytic
// flow map can be supplied to bypass the ODE integrator.
class ReebFlowAdapter final : public FlowSystem {
public:
    ReebFlowAdapter(const ContactManifold& M, double max_speed,
                    std::function<Vec(const Vec&, double)> exact = {});

    int dim() const override { return M_.ambient_dim(); }
    Vec flow(const Vec& p, double t) const override;
    double distance(const Vec& p, const Vec& q) const override { return (p - q).norm(); }
    Vec random_point(Rng& rng) const override { return M_.random_point(rng); }
    double max_speed() const override { return max_speed_; }

private:
    const ContactManifold& M_;
    double max_speed_;
    std::function<Vec(const Vec&, double)> exact_;
};

// Suspension of the hyperbolic torus map (x, y) -> (2x + y, x + y) mod 1
// with unit roof: state (x, y, s) with s in [0, 1), flowing in s and applying
// the map on each wrap. Its topological entropy is log((3 + sqrt 5) / 2),
// the closed-form benchmark for the estimator.
class CatMapSuspension final : public FlowSystem {
public:
    int dim() const override { return 3; }
    Vec flow(const Vec& p, double t) const override;
    double distance(const Vec& p, const Vec& q) const override;
    Vec random_point(Rng& rng) const override;
    double max_speed() const override { return 1.0; }

    static double exact_entropy() { return std::log((3.0 + std::sqrt(5.0)) / 2.0); }
};

// Maximum over t in [0, T] (sampled at resolution dt) of d(phi^t p, phi^t q).
double dT_distance(const FlowSystem& F, const Vec& p, const Vec& q, double T, double dt);

// Greedy (T, eps)-separated subset of the cloud in seeded-shuffle order;
// returns its size. dt defaults to eps / (4 * max_speed) when <= 0.
int separated_count(const FlowSystem& F, const std::vector<Vec>& cloud, double T, double eps,
                    std::uint64_t seed, double dt = 0.0);

// Exact maximum (T, eps)-separated subset size by branch-and-bound maximum
// independent set on the proximity graph. Cloud size is capped at 256.
int max_separated_count(const FlowSystem& F, const std::vector<Vec>& cloud, double T,
                        double eps, double dt = 0.0);

struct EntropyTable {
    std::vector<double> T_list, eps_list;
    Mat counts;                    // eps x T
    std::vector<double> slopes;    // per eps: d log N / d T on the largest-T half
    std::vector<double> residuals; // per eps: max abs log-residual of the fit
    double h_estimate = 0;         // slope at the smallest eps
};

// Separation-growth entropy estimate: N(T, eps) table over the cloud, slope
// of log N in T fitted on the largest-T half of each row.
EntropyTable entropy_estimate(const FlowSystem& F, const std::vector<Vec>& cloud,
                              const std::vector<double>& T_list,
                              const std::vector<double>& eps_list, std::uint64_t seed);

} // namespace reeblab

#endif
