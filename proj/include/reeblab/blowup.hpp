#ifndef REEBLAB_BLOWUP_HPP
#define REEBLAB_BLOWUP_HPP

#include <functional>

#include "reeblab/dynamics.hpp"

namespace reeblab {

// Closed transverse frame along a periodic orbit, together with the
// transverse block A2(t) of the linearized flow expressed in that frame and
// the induced circle dynamics b(t, theta) = <i e^{i theta}, A2(t) e^{i theta}>
// on the blow-up torus.
//
// The frame is built deterministically: an orthonormal basis of the contact
// plane is transported along the orbit (projection + Gram-Schmidt at every
// grid step), and the total holonomy angle is redistributed linearly in t so
// that the frame closes up at the period. All (p, q) class coefficients are
// defined relative to this frame.
class TubularFrame {
public:
    double period = 0;
    int n_grid = 0;             // grid t_k = k * period / n_grid
    std::vector<Vec> points;    // gamma(t_k), empty for synthetic frames
    std::vector<Vec> e1, e2;    // closed orthonormal frame at t_k
    double holonomy = 0;        // angle redistributed to close the frame
    double closure_error = 0;   // |e_i(T) - e_i(0)| before redistribution fix

    // A2 samples at midpoints (k + 1/2) * period / n_grid (grid frames), or a
    // closed-form map for synthetic test frames.
    std::vector<Eigen::Matrix2d> A2_grid;
    std::function<Eigen::Matrix2d(double)> A2_fn;

    bool synthetic() const { return points.empty(); }

    Eigen::Matrix2d A2_at(double t) const; // period-periodic in t
    double b(double t, double theta) const;

    // Interpolated frame/point at arbitrary time (grid frames only).
    Vec point_at(double t) const;
    std::pair<Vec, Vec> frame_at(double t) const;
};

// Numeric frame along an orbit of a model flow. Throws on frame degeneracy
// (transported frame collapsing below the noise floor).
TubularFrame build_tubular_frame(const ContactManifold& M, const PeriodicOrbit& orbit,
                                 int n_grid = 256, double tol = 1e-11);

// Synthetic frame with a prescribed transverse linearization; used to test
// the circle dynamics against closed-form oracles.
TubularFrame synthetic_frame(double period, std::function<Eigen::Matrix2d(double)> A2);

struct RotationResult {
    double rho = 0;        // (T / 2 pi) (p + q * limit)
    double limit = 0;      // estimate of lim theta(t) / t
    bool converged = false;
    double window_gap = 0; // disagreement of the last two dyadic windows
    double horizon = 0;    // horizon actually used
};

// Rotation number of the orbit relative to a class with frame coefficients
// (p, q): integrates theta' = b(t, theta) lifted to R and estimates the
// drift by comparing averages over the last two dyadic windows, doubling the
// horizon (up to 512 periods) until they agree within tol.
RotationResult rotation_number(const TubularFrame& frame, double p, double q,
                               double horizon, double tol = 1e-6, double theta0 = 0.0);

} // namespace reeblab

#endif
