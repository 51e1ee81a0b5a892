#pragma once

#include <Eigen/Dense>
#include <memory>

#include "okr/errors.hpp"

namespace okr {

/// Common one-pass protocol: step(x_t) returns the prediction and leaves the
/// forecaster waiting for the label; supply_label(y_t) completes the round.
/// Any other interleaving is a protocol error. Predictions are never clipped.
class Forecaster {
public:
    virtual ~Forecaster() = default;

    double step(const Eigen::VectorXd& x) {
        if (awaiting_label_) throw protocol_error("step() while a label is still pending");
        const double yhat = do_step(x);
        awaiting_label_ = true;
        return yhat;
    }

    void supply_label(double y) {
        if (!awaiting_label_) throw protocol_error("supply_label() without a pending step");
        do_supply_label(y);
        awaiting_label_ = false;
    }

    bool awaiting_label() const { return awaiting_label_; }

    /// Nystrom reports its dictionary size; everything else reports 0.
    virtual int dictionary_size() const { return 0; }

    virtual std::unique_ptr<Forecaster> clone() const = 0;

protected:
    virtual double do_step(const Eigen::VectorXd& x) = 0;
    virtual void do_supply_label(double y) = 0;

private:
    bool awaiting_label_ = false;
};

}  // namespace okr
