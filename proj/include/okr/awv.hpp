#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <utility>

#include "okr/errors.hpp"
#include "okr/forecaster.hpp"
#include "okr/taylor.hpp"

namespace okr {

/// The r-dimensional ridge recursion behind every fixed-embedding forecaster.
/// Keeps A_t^-1 with A_t = lambda I + sum_{s<=t} v_s v_s^T and
/// b_t = sum_{s<=t} y_s v_s.
///
/// The rank-one update runs BEFORE the prediction: the forecaster penalizes
/// the would-be prediction at the current point, so A_t already contains
/// v_t v_t^T when y_t is forecast. Plain ridge would predict first.
class AwvState {
public:
    AwvState(int r, double lambda) : lambda_(lambda) {
        if (r < 1) throw input_error("AwvState: dimension must be >= 1");
        if (!(lambda > 0.0)) throw input_error("AwvState: lambda must be positive");
        a_inv_ = Eigen::MatrixXd::Identity(r, r) / lambda;
        b_ = Eigen::VectorXd::Zero(r);
    }

    double step(const Eigen::VectorXd& v) {
        if (pending_) throw protocol_error("AwvState::step while a label is pending");
        if (v.size() != a_inv_.rows()) {
            throw input_error("AwvState::step: feature dimension " + std::to_string(v.size()) +
                              " != " + std::to_string(a_inv_.rows()));
        }
        if (!v.allFinite()) throw input_error("AwvState::step: non-finite feature vector");

        const Eigen::VectorXd u = a_inv_ * v;
        a_inv_.noalias() -= (u * u.transpose()) / (1.0 + v.dot(u));
        if (++step_count_ % 1000 == 0) {
            // Sherman-Morrison drift accumulates asymmetry; re-center.
            a_inv_ = 0.5 * (a_inv_ + a_inv_.transpose()).eval();
        }
        pending_v_ = v;
        pending_ = true;
        return v.dot(a_inv_ * b_);
    }

    void supply_label(double y) {
        if (!pending_) throw protocol_error("AwvState::supply_label without a pending step");
        b_.noalias() += y * pending_v_;
        pending_ = false;
    }

    int dim() const { return static_cast<int>(a_inv_.rows()); }
    double lambda() const { return lambda_; }
    const Eigen::MatrixXd& a_inv() const { return a_inv_; }
    const Eigen::VectorXd& b() const { return b_; }

private:
    double lambda_;
    Eigen::MatrixXd a_inv_;
    Eigen::VectorXd b_;
    Eigen::VectorXd pending_v_;
    bool pending_ = false;
    long step_count_ = 0;
};

/// Projected forecaster with the fixed Taylor subspace: embed, then run the
/// ridge recursion on the r features.
class TaylorForecaster : public Forecaster {
public:
    TaylorForecaster(TaylorBasis basis, double lambda)
        : basis_(std::move(basis)), awv_(basis_.size(), lambda) {}

    const TaylorBasis& basis() const { return basis_; }
    const AwvState& state() const { return awv_; }

    std::unique_ptr<Forecaster> clone() const override {
        return std::make_unique<TaylorForecaster>(*this);
    }

protected:
    double do_step(const Eigen::VectorXd& x) override { return awv_.step(basis_.embed(x)); }
    void do_supply_label(double y) override { awv_.supply_label(y); }

private:
    TaylorBasis basis_;
    AwvState awv_;
};

}  // namespace okr
