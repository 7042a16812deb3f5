#include "reeblab/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace reeblab {

std::string to_string(OrbitType t) {
    switch (t) {
        case OrbitType::elliptic: return "elliptic";
        case OrbitType::positive_hyperbolic: return "positive_hyperbolic";
        case OrbitType::negative_hyperbolic: return "negative_hyperbolic";
        case OrbitType::parabolic: return "parabolic";
    }
    return "?";
}

Vec PeriodicOrbit::sample_at(double t) const {
    const int n = static_cast<int>(samples.size());
    double s = std::fmod(t / period, 1.0);
    if (s < 0) s += 1.0;
    double u = s * n;
    int i = static_cast<int>(u) % n;
    double frac = u - std::floor(u);
    return samples[i] * (1.0 - frac) + samples[(i + 1) % n] * frac;
}

namespace {

OdeOptions flow_options(const ContactManifold& M, double tol) {
    OdeOptions o;
    o.tol = tol;
    o.post_step = [&M](Vec& y) { y = M.project(y); };
    return o;
}

} // namespace

Vec flow(const ContactManifold& M, const Vec& x, double t, double tol) {
    if (t == 0.0) return x;
    auto rhs = [&M](double, const Vec& y) { return M.reeb(y); };
    return integrate_dopri5(rhs, x, 0.0, t, flow_options(M, tol));
}

std::pair<Vec, Mat> transport_linearized(const ContactManifold& M, const Vec& x,
                                         double t, double tol) {
    const int n = M.ambient_dim();
    if (t == 0.0) return {x, Mat::Identity(n, n)};

    Vec y0(n + n * n);
    y0.head(n) = x;
    Eigen::Map<Mat>(y0.data() + n, n, n) = Mat::Identity(n, n);

    auto rhs = [&M, n](double, const Vec& y) {
        Vec dy(n + n * n);
        Vec p = y.head(n);
        dy.head(n) = M.reeb(p);
        Mat dx = M.reeb_jacobian(p);
        Eigen::Map<Mat>(dy.data() + n, n, n) =
            dx * Eigen::Map<const Mat>(y.data() + n, n, n);
        return dy;
    };
    OdeOptions o;
    o.tol = tol;
    o.post_step = [&M, n](Vec& y) {
        Vec p = M.project(y.head(n));
        y.head(n) = p;
    };
    Vec yf = integrate_dopri5(rhs, y0, 0.0, t, o);
    return {yf.head(n), Eigen::Map<Mat>(yf.data() + n, n, n)};
}

std::pair<Vec, Vec> contact_plane_basis(const ContactManifold& M, const Vec& p) {
    const int n = M.ambient_dim();
    Vec X = M.reeb(p);
    Mat frame = M.oriented_tangent_frame(p);

    // Orthonormal basis of ker(lambda) in T_pM.
    Mat ker(n, 2);
    int c = 0;
    for (int j = 0; j < frame.cols() && c < 2; ++j) {
        Vec v = frame.col(j) - M.lambda(p, frame.col(j)) * X;
        v = M.tangent_project(p, v);
        for (int jj = 0; jj < c; ++jj) v -= ker.col(jj).dot(v) * ker.col(jj);
        if (v.norm() > 1e-8) ker.col(c++) = v.normalized();
    }
    if (c < 2) throw std::runtime_error("contact_plane_basis: degenerate contact plane");
    Vec e1 = ker.col(0), e2 = ker.col(1);

    // Orientation: (X, e1, e2) positive, i.e. det[n, X, e1, e2] > 0 on
    // sphere models (n = outward normal) and det[X, e1, e2] > 0 on the box.
    double det;
    if (M.constraint(p).has_value()) {
        Mat full(4, 4);
        full.col(0) = M.constraint_grad(p).normalized();
        full.col(1) = X;
        full.col(2) = e1;
        full.col(3) = e2;
        det = full.determinant();
    } else {
        Mat full(3, 3);
        full.col(0) = X;
        full.col(1) = e1;
        full.col(2) = e2;
        det = full.determinant();
    }
    if (det < 0) std::swap(e1, e2);

    // dlambda-normalize: dlambda(e1, e2) = 1.
    double d = M.dlambda(p, e1, e2);
    if (d <= 0) throw std::runtime_error("contact_plane_basis: dlambda not positive on frame");
    double s = std::sqrt(d);
    return {e1 / s, e2 / s};
}

Eigen::Matrix2d transverse_monodromy(const ContactManifold& M, const Vec& base_point,
                                     double period, double tol) {
    auto [e1, e2] = contact_plane_basis(M, base_point);
    auto [pT, J] = transport_linearized(M, base_point, period, tol);
    (void)pT;
    Vec X = M.reeb(base_point);

    auto transverse = [&](const Vec& e) {
        Vec v = J * e;
        v = M.tangent_project(base_point, v);
        v -= M.lambda(base_point, v) * X; // quotient by the flow direction
        return v;
    };
    Vec v1 = transverse(e1), v2 = transverse(e2);

    // Symplectic coordinates: v = a e1 + b e2 with a = dlambda(v, e2),
    // b = dlambda(e1, v) (the basis satisfies dlambda(e1, e2) = 1).
    Eigen::Matrix2d B;
    B(0, 0) = M.dlambda(base_point, v1, e2);
    B(1, 0) = M.dlambda(base_point, e1, v1);
    B(0, 1) = M.dlambda(base_point, v2, e2);
    B(1, 1) = M.dlambda(base_point, e1, v2);
    return B;
}

std::pair<OrbitType, int> classify_multipliers(
    const std::pair<std::complex<double>, std::complex<double>>& mult, double tol,
    int k_max) {
    const auto& [m1, m2] = mult;

    int nondeg = k_max;
    for (int k = 1; k <= k_max && nondeg == k_max; ++k) {
        for (int j = 0; j < k; ++j) {
            std::complex<double> zeta = std::polar(1.0, 2.0 * M_PI * j / k);
            if (std::abs(m1 - zeta) <= tol || std::abs(m2 - zeta) <= tol) {
                nondeg = k - 1;
                break;
            }
        }
    }

    OrbitType type;
    const double imag = std::max(std::abs(m1.imag()), std::abs(m2.imag()));
    if (imag > tol) {
        type = OrbitType::elliptic;
    } else {
        double a = m1.real(), b = m2.real();
        if (a > b) std::swap(a, b);
        if (0 < a && a < 1 - tol && b > 1 + tol)
            type = OrbitType::positive_hyperbolic;
        else if (a < -1 - tol && b < 0 && b > -1 + tol)
            type = OrbitType::negative_hyperbolic;
        else
            type = OrbitType::parabolic;
    }
    return {type, nondeg};
}

void classify_orbit(const ContactManifold& M, PeriodicOrbit& orbit, double tol, int k_max) {
    orbit.transverse_monodromy = transverse_monodromy(M, orbit.base_point, orbit.period);
    const double tr = orbit.transverse_monodromy.trace();
    const double det = orbit.transverse_monodromy.determinant();
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0) {
        const double r = std::sqrt(disc);
        orbit.multipliers = {std::complex<double>((tr - r) / 2, 0),
                             std::complex<double>((tr + r) / 2, 0)};
    } else {
        const double im = std::sqrt(-disc) / 2;
        orbit.multipliers = {std::complex<double>(tr / 2, -im),
                             std::complex<double>(tr / 2, im)};
    }
    std::tie(orbit.orbit_type, orbit.nondegenerate_up_to) =
        classify_multipliers(orbit.multipliers, tol, k_max);
}

PeriodicOrbit make_orbit(const ContactManifold& M, const Vec& x, double period,
                         int n_samples, double tol) {
    PeriodicOrbit orb;
    orb.base_point = x;
    orb.period = period;
    orb.samples.reserve(n_samples);
    Vec p = x;
    const double dt = period / n_samples;
    for (int i = 0; i < n_samples; ++i) {
        orb.samples.push_back(p);
        p = flow(M, p, dt, tol);
    }
    return orb;
}

namespace {

double point_to_segment(const Vec& p, const Vec& a, const Vec& b) {
    Vec ab = b - a;
    double t = ab.squaredNorm() > 0 ? ab.dot(p - a) / ab.squaredNorm() : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (a + t * ab - p).norm();
}

double point_to_orbit(const Vec& p, const PeriodicOrbit& orb) {
    double best = std::numeric_limits<double>::infinity();
    const auto& s = orb.samples;
    const int n = static_cast<int>(s.size());
    for (int i = 0; i < n; ++i)
        best = std::min(best, point_to_segment(p, s[i], s[(i + 1) % n]));
    return best;
}

// Symmetric Hausdorff-type distance over a few probe points per orbit.
double orbit_distance(const PeriodicOrbit& a, const PeriodicOrbit& b) {
    double h = 0.0;
    const int probes = 8;
    for (int i = 0; i < probes; ++i) {
        h = std::max(h, point_to_orbit(a.samples[i * a.samples.size() / probes], b));
        h = std::max(h, point_to_orbit(b.samples[i * b.samples.size() / probes], a));
    }
    return h;
}

struct Candidate {
    Vec x;
    double T;
};

// Gauss-Newton refinement of phi^T(x) = x; updates stay tangent to the
// manifold and transverse to the flow direction (phase condition).
bool refine_orbit(const ContactManifold& M, Candidate& cand, const OrbitSearchOptions& opts,
                  double T_max) {
    const int n = M.ambient_dim();
    for (int it = 0; it < opts.max_newton_iters; ++it) {
        auto [pT, J] = transport_linearized(M, cand.x, cand.T, opts.tol);
        Vec r = pT - cand.x;
        if (r.norm() < opts.residual_tol) return true;

        // Basis of directions tangent to M and orthogonal to the flow.
        Vec X = M.reeb(cand.x).normalized();
        Mat frame = M.constraint(cand.x).has_value()
                        ? M.oriented_tangent_frame(cand.x)
                        : Mat::Identity(n, n);
        Mat B(n, 0);
        for (int j = 0; j < frame.cols(); ++j) {
            Vec v = frame.col(j) - X.dot(frame.col(j)) * X;
            for (int c = 0; c < B.cols(); ++c) v -= B.col(c).dot(v) * B.col(c);
            if (v.norm() > 1e-8) {
                B.conservativeResize(Eigen::NoChange, B.cols() + 1);
                B.col(B.cols() - 1) = v.normalized();
            }
        }
        Mat A(n, B.cols() + 1);
        A.leftCols(B.cols()) = (J - Mat::Identity(n, n)) * B;
        A.col(B.cols()) = M.reeb(pT);
        Vec delta = A.colPivHouseholderQr().solve(-r);
        if (!delta.allFinite()) return false;
        double step = std::min(1.0, 0.5 / std::max(0.5, delta.norm()));
        cand.x = M.project(cand.x + step * (B * delta.head(B.cols())));
        cand.T += step * delta(B.cols());
        if (cand.T < opts.min_period || cand.T > 1.5 * T_max + 1.0) return false;
    }
    return false;
}

} // namespace

std::vector<PeriodicOrbit> find_periodic_orbits(const ContactManifold& M,
                                                const std::vector<Vec>& seeds,
                                                double T_max,
                                                const OrbitSearchOptions& opts) {
    if (!(T_max > 0)) throw std::invalid_argument("find_periodic_orbits: T_max must be > 0");

    std::vector<PeriodicOrbit> found;
    for (const Vec& seed : seeds) {
        // Scan the trajectory for close returns.
        std::vector<Candidate> candidates;
        Vec p = seed;
        double d_prev2 = 0, d_prev = 0, t = 0;
        const int n_steps = static_cast<int>(std::ceil(T_max / opts.scan_dt));
        for (int i = 1; i <= n_steps && candidates.size() < 4; ++i) {
            p = flow(M, p, opts.scan_dt, opts.tol);
            t = i * opts.scan_dt;
            double d = (p - seed).norm();
            if (i >= 3 && d_prev < opts.capture_radius && d_prev <= d &&
                d_prev <= d_prev2 && t - opts.scan_dt > opts.min_period) {
                candidates.push_back({seed, t - opts.scan_dt});
            }
            d_prev2 = d_prev;
            d_prev = d;
        }

        for (Candidate cand : candidates) {
            if (!refine_orbit(M, cand, opts, T_max)) continue;

            // Reduce to the primitive period.
            bool reduced = true;
            while (reduced) {
                reduced = false;
                for (int k = opts.k_primitive; k >= 2; --k) {
                    if (cand.T / k < opts.min_period) continue;
                    Vec q = flow(M, cand.x, cand.T / k, opts.tol);
                    if ((q - cand.x).norm() < 1e-6) {
                        cand.T /= k;
                        reduced = true;
                        break;
                    }
                }
            }
            if (cand.T > T_max + opts.scan_dt) continue;

            PeriodicOrbit orb = make_orbit(M, cand.x, cand.T, opts.n_samples, opts.tol);
            bool duplicate = false;
            for (const auto& other : found) {
                if (std::abs(other.period - orb.period) < 1e-3 * std::max(other.period, orb.period) &&
                    orbit_distance(other, orb) < opts.dedup_tol) {
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate) found.push_back(std::move(orb));
        }
    }

    for (auto& orb : found) classify_orbit(M, orb, opts.class_tol, opts.k_max);
    std::sort(found.begin(), found.end(),
              [](const PeriodicOrbit& a, const PeriodicOrbit& b) { return a.period < b.period; });
    return found;
}

} // namespace reeblab
