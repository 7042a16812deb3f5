#ifndef REEBLAB_INTEGRATE_HPP
#define REEBLAB_INTEGRATE_HPP

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>

namespace reeblab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown when the adaptive stepper underflows. Carries the last good state
// so callers can report how far the integration got.
struct IntegrationFailure : std::runtime_error {
    Vec last_state;
    double last_time;
    IntegrationFailure(const std::string& msg, Vec state, double time)
        : std::runtime_error(msg), last_state(std::move(state)), last_time(time) {}
};

struct OdeOptions {
    double tol = 1e-10;       // local error per unit time
    double h_init = 1e-3;
    double h_min = 1e-14;
    double h_max = 0.5;
    // Optional post-step correction (e.g. projection back onto a constraint set).
    std::function<void(Vec&)> post_step;
    // Optional per-step observer, called with (t, state) after each accepted step.
    std::function<void(double, const Vec&)> observer;
};

// Dormand-Prince 5(4) embedded adaptive integrator. Integrates y' = f(t, y)
// from t0 to t1 (t1 may be < t0) and returns the final state.
Vec integrate_dopri5(const std::function<Vec(double, const Vec&)>& f,
                     Vec y0, double t0, double t1, const OdeOptions& opts = {});

} // namespace reeblab

#endif
