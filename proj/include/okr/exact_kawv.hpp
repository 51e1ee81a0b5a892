#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "okr/errors.hpp"
#include "okr/forecaster.hpp"
#include "okr/kernel.hpp"

namespace okr {

/// Exact kernel forecaster in dual form. At step t it solves
///     (K_tt + lambda I) alpha = (y_1, ..., y_{t-1}, 0)
/// over all t points seen so far (the trailing zero encodes the penalty on
/// the current point) and predicts k_t^T alpha. Every step redoes the dense
/// solve; this is the correctness oracle, not the fast path.
class ExactKawv : public Forecaster {
public:
    ExactKawv(KernelSpec spec, double lambda) : spec_(spec), lambda_(lambda) {
        if (!(lambda > 0.0)) throw input_error("ExactKawv: lambda must be positive");
    }

    int points_seen() const { return n_; }
    double lambda() const { return lambda_; }
    const KernelSpec& kernel() const { return spec_; }

    std::unique_ptr<Forecaster> clone() const override { return std::make_unique<ExactKawv>(*this); }

protected:
    double do_step(const Eigen::VectorXd& x) override {
        if (n_ > 0 && x.size() != inputs_.front().size()) {
            throw input_error("ExactKawv::step: input dimension changed mid-stream");
        }
        if (!x.allFinite()) throw input_error("ExactKawv::step: non-finite input");
        append_point(x);

        const auto K = gram_.topLeftCorner(n_, n_);
        Eigen::MatrixXd reg = K;
        reg.diagonal().array() += lambda_;
        Eigen::VectorXd ytilde = Eigen::VectorXd::Zero(n_);
        for (int i = 0; i < n_ - 1; ++i) ytilde(i) = labels_[static_cast<std::size_t>(i)];

        const Eigen::LLT<Eigen::MatrixXd> llt(reg);
        if (llt.info() != Eigen::Success) {
            throw numeric_error("ExactKawv::step: regularized Gram factorization failed");
        }
        const Eigen::VectorXd alpha = llt.solve(ytilde);
        return K.col(n_ - 1).dot(alpha);
    }

    void do_supply_label(double y) override { labels_.push_back(y); }

private:
    void append_point(const Eigen::VectorXd& x) {
        if (gram_.rows() <= n_) {
            const Eigen::Index cap = std::max<Eigen::Index>(16, 2 * gram_.rows());
            Eigen::MatrixXd bigger = Eigen::MatrixXd::Zero(cap, cap);
            bigger.topLeftCorner(n_, n_) = gram_.topLeftCorner(n_, n_);
            gram_.swap(bigger);
        }
        for (int i = 0; i < n_; ++i) {
            const double k = eval_kernel(spec_, inputs_[static_cast<std::size_t>(i)], x);
            gram_(i, n_) = k;
            gram_(n_, i) = k;
        }
        gram_(n_, n_) = eval_kernel(spec_, x, x);
        inputs_.push_back(x);
        ++n_;
    }

    KernelSpec spec_;
    double lambda_;
    std::vector<Eigen::VectorXd> inputs_;
    std::vector<double> labels_;
    Eigen::MatrixXd gram_;  // cached, grows by doubling; top-left n_ x n_ is live
    int n_ = 0;
};

}  // namespace okr
