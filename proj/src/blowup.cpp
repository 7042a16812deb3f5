#include "reeblab/blowup.hpp"

#include <cmath>

namespace reeblab {

namespace {

Eigen::Matrix2d rot2(double a) {
    Eigen::Matrix2d r;
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
}

// log of a 2x2 matrix near the identity (power series in M - I).
Eigen::Matrix2d log2x2(const Eigen::Matrix2d& m) {
    Eigen::Matrix2d e = m - Eigen::Matrix2d::Identity();
    if (e.norm() > 0.7)
        throw std::runtime_error("tubular frame: transfer matrix too far from identity");
    Eigen::Matrix2d term = e, acc = Eigen::Matrix2d::Zero();
    for (int i = 1; i <= 16; ++i) {
        acc += term * ((i % 2 == 1) ? 1.0 : -1.0) / i;
        term = term * e;
    }
    return acc;
}

} // namespace

Eigen::Matrix2d TubularFrame::A2_at(double t) const {
    if (A2_fn) return A2_fn(t);
    const int n = n_grid;
    double s = std::fmod(t, period);
    if (s < 0) s += period;
    // samples live at midpoints (k + 1/2) dt; periodic linear interpolation
    const double dt = period / n;
    double u = s / dt - 0.5;
    double k = std::floor(u);
    double w = u - k;
    int k0 = (static_cast<int>(k) % n + n) % n;
    int k1 = (k0 + 1) % n;
    return (1.0 - w) * A2_grid[k0] + w * A2_grid[k1];
}

double TubularFrame::b(double t, double theta) const {
    theta = std::remainder(theta, 2.0 * M_PI);
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Vector2d dir(c, s), normal(-s, c);
    return normal.dot(A2_at(t) * dir);
}

Vec TubularFrame::point_at(double t) const {
    if (synthetic()) throw std::logic_error("synthetic frame has no ambient points");
    const int n = n_grid;
    double s = std::fmod(t, period);
    if (s < 0) s += period;
    double u = s * n / period;
    int k = static_cast<int>(u) % n;
    double w = u - std::floor(u);
    return (1.0 - w) * points[k] + w * points[(k + 1) % n];
}

std::pair<Vec, Vec> TubularFrame::frame_at(double t) const {
    if (synthetic()) throw std::logic_error("synthetic frame has no ambient frame");
    const int n = n_grid;
    double s = std::fmod(t, period);
    if (s < 0) s += period;
    double u = s * n / period;
    int k = static_cast<int>(u) % n;
    double w = u - std::floor(u);
    int k1 = (k + 1) % n;
    Vec f1 = ((1.0 - w) * e1[k] + w * e1[k1]);
    Vec f2 = ((1.0 - w) * e2[k] + w * e2[k1]);
    f1.normalize();
    f2 = (f2 - f1.dot(f2) * f1).normalized();
    return {f1, f2};
}

TubularFrame build_tubular_frame(const ContactManifold& M, const PeriodicOrbit& orbit,
                                 int n_grid, double tol) {
    TubularFrame F;
    F.period = orbit.period;
    F.n_grid = n_grid;
    const double dt = orbit.period / n_grid;
    const int dim = M.ambient_dim();

    auto clean = [&](const Vec& p, Vec v) {
        v = M.tangent_project(p, v);
        v -= M.lambda(p, v) * M.reeb(p);
        return v;
    };

    // Transport an orthonormal contact-plane frame along the orbit.
    auto [b1, b2] = contact_plane_basis(M, orbit.base_point);
    std::vector<Vec> f1{b1.normalized()}, f2{(b2 - b1.normalized().dot(b2) * b1.normalized()).normalized()};
    F.points.assign(1, orbit.base_point);
    std::vector<Eigen::Matrix2d> raw(n_grid); // transfer in the transported frame

    for (int k = 0; k < n_grid; ++k) {
        auto [pn, J] = transport_linearized(M, F.points[k], dt, tol);
        pn = M.project(pn);
        Vec v1 = clean(pn, J * f1[k]);
        Vec v2 = clean(pn, J * f2[k]);
        if (v1.norm() < 1e-8 || v2.norm() < 1e-8)
            throw std::runtime_error("tubular frame degeneracy along the orbit");
        Vec g1 = v1.normalized();
        Vec g2 = (v2 - g1.dot(v2) * g1);
        if (g2.norm() < 1e-8)
            throw std::runtime_error("tubular frame degeneracy along the orbit");
        g2.normalize();
        raw[k] << g1.dot(v1), g1.dot(v2), g2.dot(v1), g2.dot(v2);
        f1.push_back(g1);
        f2.push_back(g2);
        F.points.push_back(pn);
    }

    // Holonomy: angle of the returned frame inside the initial contact plane.
    Vec h1 = clean(orbit.base_point, f1[n_grid]);
    const double alpha = std::atan2(f2[0].dot(h1), f1[0].dot(h1));
    F.holonomy = alpha;
    {
        Vec c1 = std::cos(alpha) * f1[0] + std::sin(alpha) * f2[0];
        F.closure_error = (h1.normalized() - c1).norm();
    }

    // Close the frame by unwinding alpha linearly in t, and express the
    // per-step transfers in the closed frame.
    F.e1.resize(n_grid);
    F.e2.resize(n_grid);
    F.A2_grid.resize(n_grid);
    for (int k = 0; k < n_grid; ++k) {
        const double phi = -alpha * k / n_grid;
        F.e1[k] = std::cos(phi) * f1[k] + std::sin(phi) * f2[k];
        F.e2[k] = -std::sin(phi) * f1[k] + std::cos(phi) * f2[k];
        const double phi1 = -alpha * (k + 1) / n_grid;
        Eigen::Matrix2d E = rot2(-phi1) * raw[k] * rot2(phi);
        F.A2_grid[k] = log2x2(E) / dt;
    }
    F.points.resize(n_grid);
    (void)dim;
    return F;
}

TubularFrame synthetic_frame(double period, std::function<Eigen::Matrix2d(double)> A2) {
    if (!(period > 0)) throw std::invalid_argument("synthetic_frame: period must be > 0");
    TubularFrame F;
    F.period = period;
    F.A2_fn = std::move(A2);
    return F;
}

RotationResult rotation_number(const TubularFrame& frame, double p, double q,
                               double horizon, double tol, double theta0) {
    const double T = frame.period;
    if (horizon < 10 * T)
        throw std::invalid_argument("rotation_number: horizon must be >= 10 periods");
    const double cap = 512.0 * T;

    auto rhs = [&frame](double t, const Vec& y) {
        Vec d(1);
        d(0) = frame.b(t, y(0));
        return d;
    };
    OdeOptions opts;
    opts.tol = 1e-10;
    opts.h_max = 0.1;

    Vec y(1);
    y(0) = theta0;
    double t_now = 0;
    auto advance = [&](double t_target) {
        if (t_target > t_now) {
            y = integrate_dopri5(rhs, y, t_now, t_target, opts);
            t_now = t_target;
        }
        return y(0);
    };

    RotationResult res;
    double H = std::min(horizon, cap);
    double th_q = advance(H / 4);
    double th_h = advance(H / 2);
    double th_f = advance(H);
    while (true) {
        const double m1 = (th_h - th_q) / (H / 4);
        const double m2 = (th_f - th_h) / (H / 2);
        res.limit = m2;
        res.window_gap = std::abs(m1 - m2);
        res.horizon = H;
        res.rho = (T / (2.0 * M_PI)) * (p + q * res.limit);
        if (res.window_gap <= tol) {
            res.converged = true;
            return res;
        }
        if (2 * H > cap) return res; // not converged; both windows surfaced
        H = 2 * H;
        th_q = th_h; // old H/2 is the new H/4
        th_h = th_f;
        th_f = advance(H);
    }
}

} // namespace reeblab
