#ifndef REEBLAB_DYNAMICS_HPP
#define REEBLAB_DYNAMICS_HPP

#include <complex>
#include <vector>

#include "reeblab/geometry.hpp"
#include "reeblab/integrate.hpp"

namespace reeblab {

// Reeb flow of the model, adaptive DOPRI5 with post-step projection back
// onto the constraint level set.
Vec flow(const ContactManifold& M, const Vec& x, double t, double tol = 1e-10);

// Flow together with the ambient linearization D phi^t (variational equations).
std::pair<Vec, Mat> transport_linearized(const ContactManifold& M, const Vec& x,
                                         double t, double tol = 1e-10);

enum class OrbitType { elliptic, positive_hyperbolic, negative_hyperbolic, parabolic };

std::string to_string(OrbitType t);

struct PeriodicOrbit {
    Vec base_point;
    double period = 0; // primitive
    Eigen::Matrix2d transverse_monodromy = Eigen::Matrix2d::Identity();
    std::pair<std::complex<double>, std::complex<double>> multipliers;
    OrbitType orbit_type = OrbitType::parabolic;
    int nondegenerate_up_to = 0;
    std::vector<Vec> samples; // gamma(i T / N), uniform in t, N = samples.size()

    Vec sample_at(double t) const; // linear interpolation between stored samples
};

struct OrbitSearchOptions {
    double tol = 1e-10;          // integration tolerance
    double residual_tol = 1e-8;  // |phi^T(x) - x| accepted as periodic
    double dedup_tol = 1e-4;     // Hausdorff distance identifying two orbits
    double capture_radius = 0.3; // close-return threshold that seeds refinement
    double scan_dt = 0.02;       // close-return scan resolution
    double min_period = 1e-2;
    int max_newton_iters = 30;
    int n_samples = 256;   // samples stored per orbit
    int k_primitive = 10;  // primitivity checked at period/k, k = 2..k_primitive
    int k_max = 20;        // root-of-unity degeneracy scan depth
    double class_tol = 1e-3;
};

// Shooting search: scans each seed trajectory on [0, T_max] for close
// returns, refines candidates by Gauss-Newton on phi^T(x) - x, reduces to
// the primitive period, deduplicates, classifies, sorts by period.
std::vector<PeriodicOrbit> find_periodic_orbits(const ContactManifold& M,
                                                const std::vector<Vec>& seeds,
                                                double T_max,
                                                const OrbitSearchOptions& opts = {});

// dlambda-symplectic transverse monodromy of a (candidate) periodic orbit:
// the linearized return map expressed in a dlambda-normalized basis of
// ker lambda at the base point.
Eigen::Matrix2d transverse_monodromy(const ContactManifold& M, const Vec& base_point,
                                     double period, double tol = 1e-11);

// Classify from multipliers; flags degeneracy when a multiplier is within
// tol of a k-th root of unity for some k <= k_max.
std::pair<OrbitType, int> classify_multipliers(
    const std::pair<std::complex<double>, std::complex<double>>& mult, double tol,
    int k_max);

// Fills monodromy, multipliers, type, and nondegeneracy level of an orbit.
void classify_orbit(const ContactManifold& M, PeriodicOrbit& orbit, double tol = 1e-3,
                    int k_max = 20);

// Integrates the flow from x over [0, T] and stores n uniform-time samples;
// convenience used to build orbit fixtures from known periodic points.
PeriodicOrbit make_orbit(const ContactManifold& M, const Vec& x, double period,
                         int n_samples = 256, double tol = 1e-10);

// dlambda-symplectic basis (e1, e2) of ker lambda_p in T_p M:
// dlambda(e1, e2) = 1 and (X, e1, e2) positively oriented.
std::pair<Vec, Vec> contact_plane_basis(const ContactManifold& M, const Vec& p);

} // namespace reeblab

#endif
