#ifndef REEBLAB_GEOMETRY_HPP
#define REEBLAB_GEOMETRY_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "reeblab/rng.hpp"

#include <json.hpp>

namespace reeblab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ModelId { round_sphere, ellipsoid, lift_box };

std::string to_string(ModelId id);

// A model contact 3-manifold, held as a level set in ambient R^4 (sphere-type
// models) or as the solid box D_1(0) x [0,1] in R^3. Points and tangent
// vectors live in ambient coordinates; the metric is the ambient chordal one.
class ContactManifold {
public:
    virtual ~ContactManifold() = default;

    virtual ModelId model_id() const = 0;
    virtual int ambient_dim() const = 0;
    virtual bool closed() const = 0; // false for the box (has boundary)

    // Contact form, its differential, and the Reeb field, as ambient tensors.
    virtual double lambda(const Vec& p, const Vec& v) const = 0;
    virtual double dlambda(const Vec& p, const Vec& u, const Vec& v) const = 0;
    virtual Vec reeb(const Vec& p) const = 0;
    // Ambient Jacobian of the Reeb field extension (used by variational flow).
    virtual Mat reeb_jacobian(const Vec& p) const = 0;

    // Level function with zero set = manifold; nullopt for the box model.
    virtual std::optional<double> constraint(const Vec& p) const = 0;
    virtual Vec constraint_grad(const Vec& p) const = 0;

    // Newton projection of a nearby ambient point onto the manifold.
    virtual Vec project(const Vec& p) const = 0;
    // Projection of an ambient vector onto the tangent space at p.
    virtual Vec tangent_project(const Vec& p, const Vec& v) const = 0;

    virtual Vec random_point(Rng& rng) const = 0;

    double distance(const Vec& p, const Vec& q) const { return (p - q).norm(); }

    // Positively oriented orthonormal tangent frame at p, as columns.
    // Orientation convention: det[n, u1, ..., uk] > 0 with n the outward
    // constraint gradient (sphere models), matching the boundary orientation
    // for which Stokes on the 4-ball gives vol(lambda) = +pi^2 on the round
    // sphere; the box uses the ambient frame.
    Mat oriented_tangent_frame(const Vec& p) const;
};

// Sphere-type model {|z1|^2/a + |z2|^2/b = 1} in R^4 ~ C^2 with the
// standard radial contact form. a = b = 1 is the round sphere.
class EllipsoidModel final : public ContactManifold {
public:
    EllipsoidModel(double a, double b, bool round = false);

    ModelId model_id() const override { return round_ ? ModelId::round_sphere : ModelId::ellipsoid; }
    int ambient_dim() const override { return 4; }
    bool closed() const override { return true; }

    double lambda(const Vec& p, const Vec& v) const override;
    double dlambda(const Vec& p, const Vec& u, const Vec& v) const override;
    Vec reeb(const Vec& p) const override;
    Mat reeb_jacobian(const Vec& p) const override;
    std::optional<double> constraint(const Vec& p) const override;
    Vec constraint_grad(const Vec& p) const override;
    Vec project(const Vec& p) const override;
    Vec tangent_project(const Vec& p, const Vec& v) const override;
    Vec random_point(Rng& rng) const override;

    double a() const { return a_; }
    double b() const { return b_; }

    // Closed-form flow z_j -> exp(2it/a_j) z_j; the analytic oracle used by
    // tests and by fast fixture construction.
    Vec exact_flow(const Vec& p, double t) const;
    Mat exact_flow_jacobian(double t) const;

private:
    double a_, b_;
    bool round_;
};

// The Lift-Axiom box D_1(0) x [0,1] with lambda0 = dt + (x dy - y dx)/2.
class LiftBoxModel final : public ContactManifold {
public:
    ModelId model_id() const override { return ModelId::lift_box; }
    int ambient_dim() const override { return 3; }
    bool closed() const override { return false; }

    double lambda(const Vec& p, const Vec& v) const override;
    double dlambda(const Vec& p, const Vec& u, const Vec& v) const override;
    Vec reeb(const Vec& p) const override;
    Mat reeb_jacobian(const Vec& p) const override;
    std::optional<double> constraint(const Vec&) const override { return std::nullopt; }
    Vec constraint_grad(const Vec& p) const override;
    Vec project(const Vec& p) const override { return p; }
    Vec tangent_project(const Vec&, const Vec& v) const override { return v; }
    Vec random_point(Rng& rng) const override;

    bool inside(const Vec& p) const;
};

struct ModelSpec {
    ModelId model = ModelId::round_sphere;
    double a = 1.0, b = 1.0;
    std::uint64_t seed = 0;
};

ModelSpec parse_model_spec(const nlohmann::json& j);

std::shared_ptr<ContactManifold> make_model(const ModelSpec& spec);

// Pointwise contact-axiom residuals over seeded samples.
struct ContactReport {
    double max_reeb_normalization = 0;   // |lambda(X) - 1|
    double max_reeb_kernel = 0;          // |dlambda(X, v)|
    double min_kernel_nondegeneracy = 0; // |dlambda(e1, e2)| on ker lambda
    double min_positivity = 0;           // lambda ^ dlambda on oriented frame
    int n_samples = 0;
    bool pass = false;
};

ContactReport verify_contact(const ContactManifold& M, int n_samples, double tol,
                             std::uint64_t seed);

struct HelicityEstimate {
    double value = 0;
    double std_error = 0;
    long n_samples = 0;
};

// Seeded Monte-Carlo estimate of vol(lambda) = int lambda ^ dlambda with
// antithetic pairs; only defined for closed models.
HelicityEstimate helicity(const ContactManifold& M, long n_samples, std::uint64_t seed);

} // namespace reeblab

#endif
