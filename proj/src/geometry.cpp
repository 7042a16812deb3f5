#include "reeblab/geometry.hpp"

#include <cmath>


namespace reeblab {

std::string to_string(ModelId id) {
    switch (id) {
        case ModelId::round_sphere: return "round_sphere";
        case ModelId::ellipsoid: return "ellipsoid";
        case ModelId::lift_box: return "lift_box";
    }
    return "?";
}

Mat ContactManifold::oriented_tangent_frame(const Vec& p) const {
    const int n = ambient_dim();
    const bool has_constraint = constraint(p).has_value();
    const int k = has_constraint ? n - 1 : n;

    Mat frame(n, k);
    if (!has_constraint) {
        frame = Mat::Identity(n, n);
        return frame;
    }
    Vec nrm = constraint_grad(p).normalized();
    // Gram-Schmidt of ambient axes against the normal.
    int col = 0;
    for (int i = 0; i < n && col < k; ++i) {
        Vec v = Vec::Zero(n);
        v(i) = 1.0;
        v -= nrm.dot(v) * nrm;
        for (int j = 0; j < col; ++j) v -= frame.col(j).dot(v) * frame.col(j);
        if (v.norm() > 1e-6) frame.col(col++) = v.normalized();
    }
    // Fix orientation: det[n, u1, ..., uk] > 0.
    Mat full(n, n);
    full.col(0) = nrm;
    for (int j = 0; j < k; ++j) full.col(j + 1) = frame.col(j);
    if (full.determinant() < 0) frame.col(0) *= -1.0;
    return frame;
}

// ---------------------------------------------------------------------------
// EllipsoidModel

EllipsoidModel::EllipsoidModel(double a, double b, bool round) : a_(a), b_(b), round_(round) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("non-positive parameter: ellipsoid requires a, b > 0");
}

double EllipsoidModel::lambda(const Vec& p, const Vec& v) const {
    // (x1 dy1 - y1 dx1 + x2 dy2 - y2 dx2) / 2
    return 0.5 * (p(0) * v(1) - p(1) * v(0) + p(2) * v(3) - p(3) * v(2));
}

double EllipsoidModel::dlambda(const Vec&, const Vec& u, const Vec& v) const {
    // dx1^dy1 + dx2^dy2
    return u(0) * v(1) - u(1) * v(0) + u(2) * v(3) - u(3) * v(2);
}

Vec EllipsoidModel::reeb(const Vec& p) const {
    Vec x(4);
    x << -2.0 / a_ * p(1), 2.0 / a_ * p(0), -2.0 / b_ * p(3), 2.0 / b_ * p(2);
    return x;
}

Mat EllipsoidModel::reeb_jacobian(const Vec&) const {
    Mat j = Mat::Zero(4, 4);
    j(0, 1) = -2.0 / a_;
    j(1, 0) = 2.0 / a_;
    j(2, 3) = -2.0 / b_;
    j(3, 2) = 2.0 / b_;
    return j;
}

std::optional<double> EllipsoidModel::constraint(const Vec& p) const {
    return (p(0) * p(0) + p(1) * p(1)) / a_ + (p(2) * p(2) + p(3) * p(3)) / b_ - 1.0;
}

Vec EllipsoidModel::constraint_grad(const Vec& p) const {
    Vec g(4);
    g << 2.0 * p(0) / a_, 2.0 * p(1) / a_, 2.0 * p(2) / b_, 2.0 * p(3) / b_;
    return g;
}

Vec EllipsoidModel::project(const Vec& p) const {
    Vec q = p;
    for (int it = 0; it < 3; ++it) {
        double g = *constraint(q);
        Vec grad = constraint_grad(q);
        q -= grad * (g / grad.squaredNorm());
    }
    return q;
}

Vec EllipsoidModel::tangent_project(const Vec& p, const Vec& v) const {
    Vec g = constraint_grad(p);
    return v - g * (g.dot(v) / g.squaredNorm());
}

Vec EllipsoidModel::random_point(Rng& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec g(4);
    for (int i = 0; i < 4; ++i) g(i) = gauss(rng);
    double q = (g(0) * g(0) + g(1) * g(1)) / a_ + (g(2) * g(2) + g(3) * g(3)) / b_;
    return g / std::sqrt(q);
}

Vec EllipsoidModel::exact_flow(const Vec& p, double t) const {
    const double wa = 2.0 * t / a_, wb = 2.0 * t / b_;
    const double ca = std::cos(wa), sa = std::sin(wa);
    const double cb = std::cos(wb), sb = std::sin(wb);
    Vec q(4);
    q << ca * p(0) - sa * p(1), sa * p(0) + ca * p(1),
         cb * p(2) - sb * p(3), sb * p(2) + cb * p(3);
    return q;
}

Mat EllipsoidModel::exact_flow_jacobian(double t) const {
    const double wa = 2.0 * t / a_, wb = 2.0 * t / b_;
    Mat j = Mat::Zero(4, 4);
    j(0, 0) = std::cos(wa); j(0, 1) = -std::sin(wa);
    j(1, 0) = std::sin(wa); j(1, 1) = std::cos(wa);
    j(2, 2) = std::cos(wb); j(2, 3) = -std::sin(wb);
    j(3, 2) = std::sin(wb); j(3, 3) = std::cos(wb);
    return j;
}

// ---------------------------------------------------------------------------
// LiftBoxModel

double LiftBoxModel::lambda(const Vec& p, const Vec& v) const {
    // dt + (x dy - y dx)/2; coordinates (x, y, t)
    return v(2) + 0.5 * (p(0) * v(1) - p(1) * v(0));
}

double LiftBoxModel::dlambda(const Vec&, const Vec& u, const Vec& v) const {
    return u(0) * v(1) - u(1) * v(0); // dx^dy
}

Vec LiftBoxModel::reeb(const Vec&) const {
    Vec r(3);
    r << 0, 0, 1;
    return r;
}

Mat LiftBoxModel::reeb_jacobian(const Vec&) const { return Mat::Zero(3, 3); }

Vec LiftBoxModel::constraint_grad(const Vec&) const { return Vec::Zero(3); }

Vec LiftBoxModel::random_point(Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // rejection sampling in the unit disk
    double x, y;
    do {
        x = 2.0 * unit(rng) - 1.0;
        y = 2.0 * unit(rng) - 1.0;
    } while (x * x + y * y > 1.0);
    Vec p(3);
    p << x, y, unit(rng);
    return p;
}

bool LiftBoxModel::inside(const Vec& p) const {
    return p(0) * p(0) + p(1) * p(1) <= 1.0 + 1e-12 && p(2) >= -1e-12 && p(2) <= 1.0 + 1e-12;
}

// ---------------------------------------------------------------------------

ModelSpec parse_model_spec(const nlohmann::json& j) {
    ModelSpec s;
    const std::string name = j.at("model").get<std::string>();
    if (name == "round_sphere") {
        s.model = ModelId::round_sphere;
    } else if (name == "ellipsoid") {
        s.model = ModelId::ellipsoid;
        s.a = j.at("a").get<double>();
        s.b = j.at("b").get<double>();
    } else if (name == "lift_box") {
        s.model = ModelId::lift_box;
    } else {
        throw std::invalid_argument("unknown model_id: " + name);
    }
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

std::shared_ptr<ContactManifold> make_model(const ModelSpec& spec) {
    switch (spec.model) {
        case ModelId::round_sphere:
            return std::make_shared<EllipsoidModel>(1.0, 1.0, /*round=*/true);
        case ModelId::ellipsoid:
            return std::make_shared<EllipsoidModel>(spec.a, spec.b);
        case ModelId::lift_box:
            return std::make_shared<LiftBoxModel>();
    }
    throw std::invalid_argument("unknown model_id");
}

ContactReport verify_contact(const ContactManifold& M, int n_samples, double tol,
                             std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("verify_contact: n_samples must be >= 1");
    ContactReport rep;
    rep.n_samples = n_samples;
    rep.min_kernel_nondegeneracy = std::numeric_limits<double>::infinity();
    rep.min_positivity = std::numeric_limits<double>::infinity();

    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = M.ambient_dim();

    for (int s = 0; s < n_samples; ++s) {
        Vec p = M.random_point(rng);
        Vec X = M.reeb(p);
        rep.max_reeb_normalization =
            std::max(rep.max_reeb_normalization, std::abs(M.lambda(p, X) - 1.0));

        for (int k = 0; k < 10; ++k) {
            Vec v(n);
            for (int i = 0; i < n; ++i) v(i) = gauss(rng);
            v = M.tangent_project(p, v).normalized();
            rep.max_reeb_kernel = std::max(rep.max_reeb_kernel, std::abs(M.dlambda(p, X, v)));
        }

        // Basis of ker(lambda_p) inside T_pM: orthonormal tangent frame,
        // corrected so each vector is lambda-null using the Reeb direction.
        Mat frame = M.oriented_tangent_frame(p);
        const int k = frame.cols();
        Mat ker(n, 2);
        int c = 0;
        for (int j = 0; j < k && c < 2; ++j) {
            Vec v = frame.col(j) - M.lambda(p, frame.col(j)) * X;
            for (int jj = 0; jj < c; ++jj) v -= ker.col(jj).dot(v) * ker.col(jj);
            if (v.norm() > 1e-6) ker.col(c++) = v.normalized();
        }
        if (c == 2) {
            rep.min_kernel_nondegeneracy = std::min(
                rep.min_kernel_nondegeneracy, std::abs(M.dlambda(p, ker.col(0), ker.col(1))));
        }

        // lambda ^ dlambda on a positively oriented frame (u1, u2, u3).
        const Vec u1 = frame.col(0), u2 = frame.col(1), u3 = frame.col(2);
        double vol3 = M.lambda(p, u1) * M.dlambda(p, u2, u3) -
                      M.lambda(p, u2) * M.dlambda(p, u1, u3) +
                      M.lambda(p, u3) * M.dlambda(p, u1, u2);
        rep.min_positivity = std::min(rep.min_positivity, vol3);
    }

    rep.pass = rep.max_reeb_normalization <= tol && rep.max_reeb_kernel <= tol &&
               rep.min_kernel_nondegeneracy > tol && rep.min_positivity > tol;
    return rep;
}

HelicityEstimate helicity(const ContactManifold& M, long n_samples, std::uint64_t seed) {
    if (!M.closed())
        throw std::invalid_argument("helicity undefined for manifold with boundary");
    const auto* E = dynamic_cast<const EllipsoidModel*>(&M);
    if (!E) throw std::invalid_argument("helicity: unsupported model");

    // Pull lambda ^ dlambda back to the round sphere via
    // Phi(s) = (sqrt(a) s1, sqrt(a) s2, sqrt(b) s3, sqrt(b) s4) and integrate
    // by uniform Monte Carlo on S^3 (antithetic pairs s, -s).
    const double sa = std::sqrt(E->a()), sb = std::sqrt(E->b());
    Vec scale(4);
    scale << sa, sa, sb, sb;
    EllipsoidModel sphere(1.0, 1.0, true);

    auto density = [&](const Vec& s) {
        Vec p = scale.asDiagonal() * s;
        Mat frame = sphere.oriented_tangent_frame(s);
        Vec w1 = scale.asDiagonal() * frame.col(0);
        Vec w2 = scale.asDiagonal() * frame.col(1);
        Vec w3 = scale.asDiagonal() * frame.col(2);
        return E->lambda(p, w1) * E->dlambda(p, w2, w3) -
               E->lambda(p, w2) * E->dlambda(p, w1, w3) +
               E->lambda(p, w3) * E->dlambda(p, w1, w2);
    };

    auto rng = make_rng(seed);
    const double vol_s3 = 2.0 * M_PI * M_PI;
    double sum = 0.0, sum_sq = 0.0;
    const long pairs = (n_samples + 1) / 2;
    for (long i = 0; i < pairs; ++i) {
        Vec s = sphere.random_point(rng);
        double d = 0.5 * (density(s) + density(-s));
        sum += d;
        sum_sq += d * d;
    }
    const double mean = sum / pairs;
    const double var = std::max(0.0, sum_sq / pairs - mean * mean);
    HelicityEstimate est;
    est.value = vol_s3 * mean;
    est.std_error = vol_s3 * std::sqrt(var / pairs);
    est.n_samples = 2 * pairs;
    return est;
}

} // namespace reeblab
