#ifndef REEBLAB_SIMPLEX_HPP
#define REEBLAB_SIMPLEX_HPP

#include <Eigen/Dense>

namespace reeblab {

struct LpResult {
    Eigen::VectorXd x;
    double value = 0;
    bool optimal = false; // false: iteration cap hit (Bland's rule excludes cycling)
    int iterations = 0;
};

// Dense tableau simplex with Bland's anti-cycling rule for
//   max c.x  s.t.  A x <= b,  x >= 0,  b >= 0
// (the slack basis is feasible, so no phase-1 is needed). Deterministic.
// Throws std::invalid_argument if some b_i < 0 and std::runtime_error on an
// unbounded program.
LpResult simplex_maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& c, int max_iter = 10000);

} // namespace reeblab

#endif
