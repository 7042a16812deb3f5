#include "reeblab/liftaxiom.hpp"

#include <cmath>
#include <stdexcept>

#include "reeblab/integrate.hpp"

namespace reeblab {

namespace {

// exp(-1/u) extended by 0: the standard C-infinity gluing kernel
double smooth_kernel(double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; }
double smooth_kernel_d(double u) { return u > 0 ? std::exp(-1.0 / u) / (u * u) : 0.0; }

// ramp profile density: a bump supported on (0.1, 0.9)
double ramp_density(double s) {
    if (s <= 0.1 || s >= 0.9) return 0.0;
    return std::exp(-1.0 / ((s - 0.1) * (0.9 - s)));
}

double ramp_density_d(double s) {
    if (s <= 0.1 || s >= 0.9) return 0.0;
    const double u = (s - 0.1) * (0.9 - s);
    const double du = 1.0 - 2.0 * s;
    return ramp_density(s) * du / (u * u);
}

// cumulative table of the normalized ramp at 2048+1 nodes, filled once by
// per-interval Simpson quadrature of the density
struct RampTable {
    static constexpr int N = 2048;
    std::array<double, N + 1> cum{};
    double total = 0;

    RampTable() {
        cum[0] = 0;
        const double dt = 1.0 / N;
        for (int i = 0; i < N; ++i) {
            // composite Simpson with 8 panels inside the interval
            const double a = i * dt;
            double s = 0;
            const int panels = 8;
            const double h = dt / panels;
            for (int k = 0; k < panels; ++k) {
                const double x0 = a + k * h;
                s += (h / 6.0) * (ramp_density(x0) + 4.0 * ramp_density(x0 + 0.5 * h) +
                                  ramp_density(x0 + h));
            }
            cum[i + 1] = cum[i] + s;
        }
        total = cum[N];
    }
};

const RampTable& ramp_table() {
    static const RampTable tab;
    return tab;
}

} // namespace

double LiftPerturbation::beta(double t) const {
    const auto& tab = ramp_table();
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    const double x = t * RampTable::N;
    const int i = std::min(static_cast<int>(x), RampTable::N - 1);
    const double dt = 1.0 / RampTable::N;
    const double u = x - i; // local coordinate in [0, 1]
    // cubic Hermite with the exact density as the derivative at the nodes
    const double y0 = tab.cum[i], y1 = tab.cum[i + 1];
    const double m0 = ramp_density(i * dt) * dt, m1 = ramp_density((i + 1) * dt) * dt;
    const double u2 = u * u, u3 = u2 * u;
    const double val = (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 +
                       (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * m1;
    return val / tab.total;
}

double LiftPerturbation::beta_d(double t) const {
    return ramp_density(t) / ramp_table().total;
}

double LiftPerturbation::beta_dd(double t) const {
    return ramp_density_d(t) / ramp_table().total;
}

Eigen::Vector2d LiftPerturbation::V(double t) const {
    return beta_d(t) * Eigen::Vector2d(-z0(1), z0(0));
}

// The transition is parametrized by w = (r - a) / (b - a) in [0, 1], so the
// cutoff profile is exactly self-similar under rescaling of |z0| at fixed
// eps; its gradient is O(1 / (b - a)) = O(eps / |z0|).
double LiftPerturbation::bump(double r) const {
    const double a = plateau_radius(), b = support_radius();
    if (trivial() || r >= b) return 0.0;
    if (r <= a) return 1.0;
    const double w = (r - a) / (b - a);
    const double A = smooth_kernel(1.0 - w), B = smooth_kernel(w);
    return A / (A + B);
}

double LiftPerturbation::bump_d(double r) const {
    const double a = plateau_radius(), b = support_radius();
    if (trivial() || r >= b || r <= a) return 0.0;
    const double w = (r - a) / (b - a);
    const double A = smooth_kernel(1.0 - w), B = smooth_kernel(w);
    const double Ad = -smooth_kernel_d(1.0 - w), Bd = smooth_kernel_d(w);
    const double den = A + B;
    return (Ad * B - A * Bd) / (den * den * (b - a));
}

double LiftPerturbation::h(const Vec& p) const {
    if (trivial()) return 1.0;
    const Eigen::Vector2d z(p(0), p(1));
    const double r = z.norm();
    if (r >= support_radius()) return 1.0;
    const Eigen::Vector2d d = z - gamma_planar(p(2));
    return 1.0 + bump(r) * V(p(2)).dot(d);
}

Vec LiftPerturbation::grad_h(const Vec& p) const {
    Vec g = Vec::Zero(3);
    if (trivial()) return g;
    const Eigen::Vector2d z(p(0), p(1));
    const double r = z.norm();
    if (r >= support_radius()) return g;
    const double t = p(2);
    const Eigen::Vector2d d = z - gamma_planar(t);
    const Eigen::Vector2d v = V(t);
    const double hat = v.dot(d);
    const double phi = bump(r), dphi = bump_d(r);

    Eigen::Vector2d gz = phi * v;
    if (r > 0) gz += dphi * hat / r * z;
    g(0) = gz(0);
    g(1) = gz(1);
    // V'(t) . d - beta'(t) V(t) . z0; the second term vanishes (V // i z0)
    const Eigen::Vector2d vp = beta_dd(t) * Eigen::Vector2d(-z0(1), z0(0));
    g(2) = phi * (vp.dot(d) - beta_d(t) * v.dot(z0));
    return g;
}

LiftPerturbation build_lift(const LiftBoxModel&, const Eigen::Vector2d& z0, double eps,
                            double eps_star) {
    LiftPerturbation pert;
    pert.z0 = z0;
    pert.eps = eps;
    pert.eps_star = eps_star;
    if (pert.trivial()) return pert; // h == 1, lambda' = lambda exactly
    if (!(eps > 0 && eps < eps_star))
        throw std::invalid_argument("lift: eps must lie in (0, eps_star)");
    if (!(z0.norm() < eps))
        throw std::invalid_argument("lift: |z0| must be smaller than eps");
    return pert;
}

Vec contact_hamiltonian_field(double h, const Vec& grad_h, const Vec& p) {
    // X = h R + Y with i_Y lambda0 = 0 and i_Y dlambda0 = dh - (i_R dh) lambda0
    const double x = p(0), y = p(1);
    const double Yx = grad_h(1) - 0.5 * x * grad_h(2);
    const double Yy = -grad_h(0) - 0.5 * y * grad_h(2);
    const double Yt = -0.5 * (x * Yy - y * Yx);
    Vec X(3);
    X << Yx, Yy, h + Yt;
    return X;
}

Vec contact_hamiltonian_field(const LiftPerturbation& pert, const Vec& p) {
    return contact_hamiltonian_field(pert.h(p), pert.grad_h(p), p);
}

LiftReport verify_lift(const LiftBoxModel& box, const LiftPerturbation& pert, double tol) {
    LiftReport rep;

    // Reeb field of lambda' = h lambda0 is X_h / h^2
    auto rhs = [&pert](double, const Vec& p) {
        const double h = pert.h(p);
        return (contact_hamiltonian_field(pert, p) / (h * h)).eval();
    };
    bool in_box = true;
    OdeOptions opts;
    opts.tol = tol;
    opts.observer = [&](double, const Vec& p) {
        if (!box.inside(p) || p(2) < -1e-9 || p(2) > 1.0 + 1e-9) in_box = false;
    };
    Vec start = Vec::Zero(3);
    rep.endpoint = integrate_dopri5(rhs, start, 0.0, 1.0, opts);
    rep.stayed_in_box = in_box;
    Vec target(3);
    target << pert.z0(0), pert.z0(1), 1.0;
    rep.endpoint_error = (rep.endpoint - target).norm();

    // support exactness on a grid of the whole box
    rep.support_ok = true;
    const double R_supp = pert.support_radius();
    for (int i = 0; i <= 20 && rep.support_ok; ++i)
        for (int j = 0; j <= 20 && rep.support_ok; ++j)
            for (int k = 0; k <= 10; ++k) {
                Vec p(3);
                p << -1.0 + 0.1 * i, -1.0 + 0.1 * j, 0.1 * k;
                if (Eigen::Vector2d(p(0), p(1)).norm() < R_supp) continue;
                if (std::abs(pert.h(p) - 1.0) > 1e-15) {
                    rep.support_ok = false;
                    break;
                }
            }

    // C0/C1/C2 sup norms of h - 1 by 5-point central differences on a 41^3
    // grid over the support cylinder
    const double R = pert.trivial() ? 0.05 : R_supp;
    const int n = 41;
    const double dx = 2 * R / (n - 1), dtau = 1.0 / (n - 1);
    const double delta[3] = {dx, dx, dtau};
    double c0 = 0, c1 = 0, c2 = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Vec p(3);
                p << -R + i * dx, -R + j * dx, k * dtau;
                const double f0 = pert.h(p) - 1.0;
                c0 = std::max(c0, std::abs(f0));
                for (int ax = 0; ax < 3; ++ax) {
                    Vec q = p;
                    double f[5]; // stencil at -2d .. +2d
                    for (int s = -2; s <= 2; ++s) {
                        q(ax) = p(ax) + s * delta[ax];
                        f[s + 2] = pert.h(q) - 1.0;
                    }
                    const double d1 =
                        (-f[4] + 8 * f[3] - 8 * f[1] + f[0]) / (12 * delta[ax]);
                    const double d2 = (-f[4] + 16 * f[3] - 30 * f[2] + 16 * f[1] - f[0]) /
                                      (12 * delta[ax] * delta[ax]);
                    c1 = std::max(c1, std::abs(d1));
                    c2 = std::max(c2, std::abs(d2));
                }
            }
    rep.norms = {c0, c1, c2};
    const double e = pert.eps > 0 ? pert.eps : 1.0;
    rep.K_measured = {c0 / e, c1 / e, c2 / e};
    return rep;
}

nlohmann::json lift_report_json(const LiftPerturbation& pert, const LiftReport& rep) {
    nlohmann::json j;
    j["z0"] = {pert.z0(0), pert.z0(1)};
    j["eps"] = pert.eps;
    j["endpoint_error"] = rep.endpoint_error;
    j["support_ok"] = rep.support_ok;
    j["stayed_in_box"] = rep.stayed_in_box;
    j["norms"] = {{"C0", rep.norms[0]}, {"C1", rep.norms[1]}, {"C2", rep.norms[2]}};
    j["K_measured"] = {{"C0", rep.K_measured[0]},
                       {"C1", rep.K_measured[1]},
                       {"C2", rep.K_measured[2]}};
    return j;
}

} // namespace reeblab
