#include "reeblab/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace reeblab {

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

} // namespace

Vec integrate_dopri5(const std::function<Vec(double, const Vec&)>& f,
                     Vec y0, double t0, double t1, const OdeOptions& opts) {
    if (t1 == t0) return y0;
    const double dir = (t1 > t0) ? 1.0 : -1.0;
    double t = t0;
    Vec y = std::move(y0);
    double h = dir * std::min(opts.h_init, std::abs(t1 - t0));

    Vec k1 = f(t, y);
    while (dir * (t1 - t) > 0) {
        if (std::abs(h) > std::abs(t1 - t)) h = t1 - t;

        Vec k2 = f(t + c2 * h, y + h * (a21 * k1));
        Vec k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        Vec k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        Vec k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        Vec k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Vec ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Vec k7 = f(t + h, ynew);
        Vec err_v = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double sc = 1.0 + y.cwiseAbs().maxCoeff();
        const double err = err_v.cwiseAbs().maxCoeff() / sc;
        const double tol_step = opts.tol * std::abs(h);

        if (err <= tol_step || std::abs(h) <= opts.h_min * 1.01) {
            t += h;
            y = std::move(ynew);
            if (opts.post_step) opts.post_step(y);
            k1 = f(t, y); // FSAL invalidated by post_step projection
            if (opts.observer) opts.observer(t, y);
        }

        double factor = (err > 0.0) ? 0.9 * std::pow(tol_step / err, 0.2) : 5.0;
        factor = std::clamp(factor, 0.2, 5.0);
        h *= factor;
        if (std::abs(h) > opts.h_max) h = dir * opts.h_max;
        if (std::abs(h) < opts.h_min) {
            if (err > tol_step)
                throw IntegrationFailure("step size underflow", y, t);
            h = dir * opts.h_min;
        }
    }
    return y;
}

} // namespace reeblab
