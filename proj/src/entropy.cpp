#include "reeblab/entropy.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "reeblab/integrate.hpp"

namespace reeblab {

namespace {

double frac01(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0; // guard against rounding at the top end
    return f;
}

double circle_dist(double a, double b) {
    const double d = std::abs(frac01(a) - frac01(b));
    return std::min(d, 1.0 - d);
}

// Sampled trajectories of the whole cloud at resolution dt up to T.
std::vector<Mat> sample_trajectories(const FlowSystem& F, const std::vector<Vec>& cloud,
                                     double T, double dt) {
    const int m = std::max(1, static_cast<int>(std::ceil(T / dt)));
    std::vector<Mat> traj(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        traj[i].resize(F.dim(), m + 1);
        for (int k = 0; k <= m; ++k)
            traj[i].col(k) = F.flow(cloud[i], std::min(k * dt, T));
    }
    return traj;
}

bool pair_separated(const FlowSystem& F, const Mat& a, const Mat& b, double eps) {
    for (int k = 0; k < a.cols(); ++k)
        if (F.distance(a.col(k), b.col(k)) >= eps) return true;
    return false;
}

double resolve_dt(const FlowSystem& F, double eps, double dt) {
    return dt > 0 ? dt : eps / (4.0 * F.max_speed());
}

} // namespace

ReebFlowAdapter::ReebFlowAdapter(const ContactManifold& M, double max_speed,
                                 std::function<Vec(const Vec&, double)> exact)
    : M_(M), max_speed_(max_speed), exact_(std::move(exact)) {}

Vec ReebFlowAdapter::flow(const Vec& p, double t) const {
    if (exact_) return exact_(p, t);
    if (t == 0) return p;
    OdeOptions opts;
    opts.post_step = [this](Vec& s) { s = M_.project(s); };
    return integrate_dopri5([this](double, const Vec& s) { return M_.reeb(s); }, p, 0.0, t,
                            opts);
}

Vec CatMapSuspension::flow(const Vec& p, double t) const {
    const double tau = p(2) + t;
    const long k = static_cast<long>(std::floor(tau));
    double x = frac01(p(0)), y = frac01(p(1));
    for (long i = 0; i < k; ++i) {
        const double nx = frac01(2 * x + y), ny = frac01(x + y);
        x = nx;
        y = ny;
    }
    for (long i = 0; i > k; --i) { // inverse map (x, y) -> (x - y, -x + 2y)
        const double nx = frac01(x - y), ny = frac01(-x + 2 * y);
        x = nx;
        y = ny;
    }
    Vec out(3);
    out << x, y, frac01(tau);
    return out;
}

double CatMapSuspension::distance(const Vec& p, const Vec& q) const {
    const double dx = circle_dist(p(0), q(0));
    const double dy = circle_dist(p(1), q(1));
    const double ds = circle_dist(p(2), q(2));
    return std::sqrt(dx * dx + dy * dy + ds * ds);
}

Vec CatMapSuspension::random_point(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec p(3);
    p << u(rng), u(rng), u(rng);
    return p;
}

double dT_distance(const FlowSystem& F, const Vec& p, const Vec& q, double T, double dt) {
    const int m = std::max(1, static_cast<int>(std::ceil(T / dt)));
    double best = 0;
    for (int k = 0; k <= m; ++k) {
        const double t = std::min(k * dt, T);
        best = std::max(best, F.distance(F.flow(p, t), F.flow(q, t)));
    }
    return best;
}

int separated_count(const FlowSystem& F, const std::vector<Vec>& cloud, double T, double eps,
                    std::uint64_t seed, double dt) {
    dt = resolve_dt(F, eps, dt);
    const auto traj = sample_trajectories(F, cloud, T, dt);

    std::vector<int> order(cloud.size());
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<int> accepted;
    for (int i : order) {
        bool ok = true;
        for (int a : accepted)
            if (!pair_separated(F, traj[i], traj[a], eps)) {
                ok = false;
                break;
            }
        if (ok) accepted.push_back(i);
    }
    return static_cast<int>(accepted.size());
}

namespace {

constexpr int MIS_CAP = 256;
using Bits = std::bitset<MIS_CAP>;

void mis_recurse(const std::vector<Bits>& adj, Bits rem, int current, int& best) {
    const int n_rem = static_cast<int>(rem.count());
    if (current + n_rem <= best) return;
    if (n_rem == 0) {
        best = std::max(best, current);
        return;
    }
    int v = -1;
    std::size_t max_deg = 0;
    for (int i = 0; i < MIS_CAP; ++i)
        if (rem[i]) {
            const std::size_t deg = (adj[i] & rem).count();
            if (v < 0 || deg > max_deg) {
                v = i;
                max_deg = deg;
            }
        }
    if (max_deg == 0) { // remaining vertices are mutually separated
        best = std::max(best, current + n_rem);
        return;
    }
    Bits without = rem;
    without.reset(v);
    mis_recurse(adj, without & ~adj[v], current + 1, best); // take v
    mis_recurse(adj, without, current, best);               // skip v
}

} // namespace

int max_separated_count(const FlowSystem& F, const std::vector<Vec>& cloud, double T,
                        double eps, double dt) {
    const int n = static_cast<int>(cloud.size());
    if (n > MIS_CAP)
        throw std::invalid_argument("max_separated_count: cloud exceeds the exact-oracle cap");
    dt = resolve_dt(F, eps, dt);
    const auto traj = sample_trajectories(F, cloud, T, dt);

    std::vector<Bits> adj(MIS_CAP);
    Bits all;
    for (int i = 0; i < n; ++i) {
        all.set(i);
        for (int j = i + 1; j < n; ++j)
            if (!pair_separated(F, traj[i], traj[j], eps)) {
                adj[i].set(j);
                adj[j].set(i);
            }
    }
    int best = 0;
    mis_recurse(adj, all, 0, best);
    return best;
}

EntropyTable entropy_estimate(const FlowSystem& F, const std::vector<Vec>& cloud,
                              const std::vector<double>& T_list,
                              const std::vector<double>& eps_list, std::uint64_t seed) {
    if (T_list.size() < 2 || eps_list.empty())
        throw std::invalid_argument("entropy_estimate needs >= 2 horizons and >= 1 scale");

    EntropyTable tab;
    tab.T_list = T_list;
    tab.eps_list = eps_list;
    const int nT = static_cast<int>(T_list.size());
    const int nE = static_cast<int>(eps_list.size());
    tab.counts.resize(nE, nT);

    for (int e = 0; e < nE; ++e)
        for (int t = 0; t < nT; ++t)
            tab.counts(e, t) = separated_count(F, cloud, T_list[t], eps_list[e],
                                               derive_seed(seed, e * nT + t));

    // per scale: least-squares slope of log N over the largest-T half
    const int lo = nT / 2;
    for (int e = 0; e < nE; ++e) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int m = nT - lo;
        for (int t = lo; t < nT; ++t) {
            const double x = T_list[t], y = std::log(std::max(1.0, tab.counts(e, t)));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double icpt = (sy - slope * sx) / m;
        double resid = 0;
        for (int t = lo; t < nT; ++t)
            resid = std::max(resid, std::abs(std::log(std::max(1.0, tab.counts(e, t))) -
                                             (slope * T_list[t] + icpt)));
        tab.slopes.push_back(slope);
        tab.residuals.push_back(resid);
    }
    const auto smallest =
        std::min_element(eps_list.begin(), eps_list.end()) - eps_list.begin();
    tab.h_estimate = tab.slopes[smallest];
    return tab;
}

} // namespace reeblab
