#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace okr {

/// Rank-one update of an upper-triangular factor: given R with R^T R = A,
/// rewrites R so that R^T R = A + u u^T. Always succeeds.
inline void cholesky_update(Eigen::Ref<Eigen::MatrixXd> R, Eigen::VectorXd u) {
    const Eigen::Index m = R.rows();
    for (Eigen::Index i = 0; i < m; ++i) {
        const double rii = R(i, i);
        const double ui = u(i);
        if (rii == 0.0) {
            // empty row (freshly bordered factor): the rotation moves u into it
            if (ui == 0.0) continue;
            const double sgn = ui > 0.0 ? 1.0 : -1.0;
            R(i, i) = std::abs(ui);
            for (Eigen::Index j = i + 1; j < m; ++j) {
                R(i, j) = sgn * u(j);
                u(j) = 0.0;
            }
            continue;
        }
        const double r = std::hypot(rii, ui);
        const double c = r / rii;
        const double s = ui / rii;
        R(i, i) = r;
        for (Eigen::Index j = i + 1; j < m; ++j) {
            R(i, j) = (R(i, j) + s * u(j)) / c;
            u(j) = c * u(j) - s * R(i, j);
        }
    }
}

/// Rank-one downdate: R^T R = A - u u^T. Returns false (R untouched) when
/// the result would not be positive definite.
inline bool cholesky_downdate(Eigen::Ref<Eigen::MatrixXd> R, Eigen::VectorXd u) {
    const Eigen::Index m = R.rows();
    Eigen::MatrixXd work = R;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double rii = work(i, i);
        const double ui = u(i);
        const double r_sq = rii * rii - ui * ui;
        if (!(r_sq > 0.0)) return false;
        const double r = std::sqrt(r_sq);
        const double c = r / rii;
        const double s = ui / rii;
        work(i, i) = r;
        for (Eigen::Index j = i + 1; j < m; ++j) {
            work(i, j) = (work(i, j) - s * u(j)) / c;
            u(j) = c * u(j) - s * work(i, j);
        }
    }
    R = work;
    return true;
}

}  // namespace okr
