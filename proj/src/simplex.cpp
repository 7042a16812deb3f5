#include "reeblab/simplex.hpp"

#include <stdexcept>
#include <vector>

namespace reeblab {

LpResult simplex_maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& c, int max_iter) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (b.size() != m || c.size() != n)
        throw std::invalid_argument("simplex: dimension mismatch");
    if ((b.array() < 0).any())
        throw std::invalid_argument("simplex: requires b >= 0 (slack start)");

    // tableau: [A I | b] with objective row [-c 0 | 0]
    Eigen::MatrixXd T(m + 1, n + m + 1);
    T.setZero();
    T.block(0, 0, m, n) = A;
    T.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
    T.block(0, n + m, m, 1) = b;
    T.block(m, 0, 1, n) = -c.transpose();

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    LpResult res;
    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        // Bland: entering variable = smallest index with negative reduced cost
        int col = -1;
        for (int j = 0; j < n + m; ++j)
            if (T(m, j) < -1e-12) {
                col = j;
                break;
            }
        if (col < 0) {
            res.optimal = true;
            break;
        }
        // leaving variable: min ratio, ties by smallest basis index (Bland)
        int row = -1;
        double best = 0;
        for (int i = 0; i < m; ++i) {
            if (T(i, col) <= 1e-12) continue;
            const double ratio = T(i, n + m) / T(i, col);
            if (row < 0 || ratio < best - 1e-12 ||
                (ratio < best + 1e-12 && basis[i] < basis[row]))
                row = i, best = ratio;
        }
        if (row < 0) throw std::runtime_error("simplex: unbounded program");

        T.row(row) /= T(row, col);
        for (int i = 0; i <= m; ++i)
            if (i != row && T(i, col) != 0.0) T.row(i) -= T(i, col) * T.row(row);
        basis[row] = col;
    }

    res.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) res.x(basis[i]) = T(i, n + m);
    res.value = c.dot(res.x);
    return res;
}

} // namespace reeblab
