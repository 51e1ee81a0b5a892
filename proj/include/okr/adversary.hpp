#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "okr/dataset.hpp"
#include "okr/errors.hpp"
#include "okr/kernel.hpp"
#include "okr/stream.hpp"

namespace okr {

namespace detail {
inline std::vector<double> grid_values(int points) {
    if (points < 1) throw input_error("adversary: grid_points_per_dim must be >= 1");
    if (points == 1) return {0.0};
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        v[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / (points - 1);
    }
    return v;
}
}  // namespace detail

/// Greedy adversary on a finite grid. At each step it scores every candidate
/// pair (x, y) in [-1,1]^d x y_grid by the instantaneous regret against the
/// batch kernel-ridge comparator fitted on the history,
///     (yhat_t(x) - y)^2 - (f_t^KRR(x) - y)^2,
/// and feeds the forecaster the maximizer. Candidates are visited in
/// lexicographic (x, y) order and only strict improvements win, so ties go
/// to the lexicographically smallest pair. The forecaster's prediction for a
/// candidate is obtained on a throwaway clone, which keeps stateful (and
/// seeded-random) forecasters consistent with what the real step will do.
inline Dataset adversary_generate(const HarnessConfig& cfg, int n, int dim,
                                  int grid_points_per_dim, const std::vector<double>& y_grid) {
    if (n < 0) throw input_error("adversary: n must be >= 0");
    if (dim < 1) throw input_error("adversary: dim must be >= 1");
    if (y_grid.empty()) throw input_error("adversary: y_grid must be non-empty");
    const std::vector<double> axis = detail::grid_values(grid_points_per_dim);
    const double total =
        std::pow(static_cast<double>(axis.size()), dim) * static_cast<double>(y_grid.size());
    if (total > 5e6) {
        throw input_error("adversary: candidate grid has ~" + std::to_string(total) +
                          " pairs; refusing above 5e6");
    }

    const KernelSpec spec = KernelSpec::gaussian(cfg.sigma);
    auto forecaster = make_forecaster(cfg, n, dim, nullptr, std::sqrt(static_cast<double>(dim)));

    Dataset out;
    out.X.resize(n, dim);
    out.y.resize(n);

    std::vector<Eigen::VectorXd> history;
    std::vector<double> labels;

    for (int t = 0; t < n; ++t) {
        // comparator on the first t examples
        Eigen::VectorXd alpha;
        if (!history.empty()) {
            const int h = static_cast<int>(history.size());
            Eigen::MatrixXd K(h, h);
            for (int i = 0; i < h; ++i) {
                for (int j = 0; j <= i; ++j) {
                    K(i, j) = K(j, i) = eval_kernel(spec, history[static_cast<std::size_t>(i)],
                                                    history[static_cast<std::size_t>(j)]);
                }
            }
            K.diagonal().array() += cfg.lambda;
            Eigen::VectorXd Y(h);
            for (int i = 0; i < h; ++i) Y(i) = labels[static_cast<std::size_t>(i)];
            alpha = Eigen::LLT<Eigen::MatrixXd>(K).solve(Y);
        }

        double best_obj = -std::numeric_limits<double>::infinity();
        Eigen::VectorXd best_x;
        double best_y = 0.0;

        std::vector<int> digits(static_cast<std::size_t>(dim), 0);
        Eigen::VectorXd x(dim);
        bool done = false;
        while (!done) {
            for (int i = 0; i < dim; ++i) x(i) = axis[static_cast<std::size_t>(digits[static_cast<std::size_t>(i)])];

            const double yhat = forecaster->clone()->step(x);
            double krr = 0.0;
            for (std::size_t i = 0; i < history.size(); ++i) {
                krr += alpha(static_cast<Eigen::Index>(i)) * eval_kernel(spec, history[i], x);
            }
            for (const double y : y_grid) {
                const double obj = (yhat - y) * (yhat - y) - (krr - y) * (krr - y);
                if (obj > best_obj) {
                    best_obj = obj;
                    best_x = x;
                    best_y = y;
                }
            }

            // odometer, least-significant digit last: lexicographic order
            int pos = dim - 1;
            while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == static_cast<int>(axis.size())) {
                digits[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            done = pos < 0;
        }

        forecaster->step(best_x);
        forecaster->supply_label(best_y);
        history.push_back(best_x);
        labels.push_back(best_y);
        out.X.row(t) = best_x.transpose();
        out.y(t) = best_y;
    }
    return out;
}

}  // namespace okr
