#ifndef REEBLAB_LIFTAXIOM_HPP
#define REEBLAB_LIFTAXIOM_HPP

#include <array>
#include <functional>

#include "reeblab/geometry.hpp"

#include <json.hpp>

namespace reeblab {

// Contact-Hamiltonian steering perturbation on the box (unit disk) x [0, 1]
// with lambda0 = dt + (x dy - y dx)/2 and Reeb field d/dt: a function
//   h(z, t) = 1 + phi(|z|) * <V(t), z - beta(t) z0>,    V(t) = beta'(t) i z0,
// whose perturbed Reeb flow carries (0, 0, 0) to (z0, 1). The radial cutoff
// phi has plateau {|z| <= 2 |z0|} and support {|z| < |z0| / eps}, so h == 1
// holds exactly outside the support cylinder.
class LiftPerturbation {
public:
    Eigen::Vector2d z0 = Eigen::Vector2d::Zero();
    double eps = 0;
    double eps_star = 0.1;

    bool trivial() const { return z0.norm() == 0.0; }
    double plateau_radius() const { return 2.0 * z0.norm(); }
    double support_radius() const { return trivial() ? 0.0 : z0.norm() / eps; }

    // monotone smooth ramp, identically 0 on [0, 0.1] and 1 on [0.9, 1]
    double beta(double t) const;
    double beta_d(double t) const;
    double beta_dd(double t) const;

    Eigen::Vector2d gamma_planar(double t) const { return beta(t) * z0; }
    Eigen::Vector2d V(double t) const; // beta'(t) * (i z0), orthogonal to z0

    double bump(double r) const;   // phi(r): 1 on the plateau, 0 from the support edge
    double bump_d(double r) const;

    double h(const Vec& p) const;  // p = (x, y, t)
    Vec grad_h(const Vec& p) const;
};

// Requires |z0| < eps < eps_star (z0 = 0 yields the trivial perturbation
// h == 1); throws std::invalid_argument otherwise.
LiftPerturbation build_lift(const LiftBoxModel& box, const Eigen::Vector2d& z0, double eps,
                            double eps_star = 0.1);

// Contact Hamiltonian field X = h R + Y of lambda0, with Y solved pointwise
// from i_Y lambda0 = 0 and i_Y dlambda0 = dh - (i_R dh) lambda0. The Reeb
// field of h lambda0 is X / h^2.
Vec contact_hamiltonian_field(double h, const Vec& grad_h, const Vec& p);
Vec contact_hamiltonian_field(const LiftPerturbation& pert, const Vec& p);

struct LiftReport {
    Vec endpoint;
    double endpoint_error = 0;
    bool support_ok = false;
    bool stayed_in_box = false;
    // sup norms of h - 1 and its first/second derivatives (5-point central
    // differences on a 41^3 grid over the support cylinder)
    std::array<double, 3> norms{};      // C0, C1, C2
    std::array<double, 3> K_measured{}; // norms / eps
};

// Integrates the perturbed Reeb field from the origin over t in [0, 1] and
// grid-checks the lemma's postconditions.
LiftReport verify_lift(const LiftBoxModel& box, const LiftPerturbation& pert,
                       double tol = 1e-10);

nlohmann::json lift_report_json(const LiftPerturbation& pert, const LiftReport& rep);

} // namespace reeblab

#endif
