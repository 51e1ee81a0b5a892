#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>

#include "okr/errors.hpp"
#include "okr/forecaster.hpp"

namespace okr {

struct FogdConfig {
    int D = 1000;        // number of random Fourier features
    double eta = 0.01;   // learning rate; the harness preset is 1/sqrt(n)
    double sigma = 1.0;  // Gaussian bandwidth being approximated
    std::uint64_t seed = 0;

    void validate() const {
        if (D < 1) throw input_error("FogdConfig: D must be >= 1");
        if (!(eta > 0.0)) throw input_error("FogdConfig: eta must be positive");
        if (!(sigma > 0.0)) throw input_error("FogdConfig: sigma must be positive");
    }
};

/// Online gradient descent on random Fourier features,
/// z_i(x) = sqrt(2/D) cos(w_i^T x + b_i) with w drawn from the Gaussian
/// spectral measure (std 1/sigma per coordinate) and phases uniform on
/// [0, 2pi). Square-loss update: theta -= eta * 2 (yhat - y) z.
class FogdForecaster : public Forecaster {
public:
    FogdForecaster(FogdConfig cfg, int input_dim) : cfg_(cfg) {
        cfg_.validate();
        if (input_dim < 1) throw input_error("FogdForecaster: input_dim must be >= 1");
        std::mt19937_64 rng(cfg_.seed);
        std::normal_distribution<double> freq(0.0, 1.0 / cfg_.sigma);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
        frequencies_.resize(cfg_.D, input_dim);
        for (int i = 0; i < cfg_.D; ++i) {
            for (int j = 0; j < input_dim; ++j) frequencies_(i, j) = freq(rng);
        }
        phases_.resize(cfg_.D);
        for (int i = 0; i < cfg_.D; ++i) phases_(i) = phase(rng);
        weights_ = Eigen::VectorXd::Zero(cfg_.D);
    }

    Eigen::VectorXd embed(const Eigen::VectorXd& x) const {
        if (x.size() != frequencies_.cols()) {
            throw input_error("FogdForecaster::embed: expected dimension " +
                              std::to_string(frequencies_.cols()));
        }
        const double scale = std::sqrt(2.0 / cfg_.D);
        return (scale * ((frequencies_ * x + phases_).array().cos())).matrix();
    }

    const Eigen::VectorXd& weights() const { return weights_; }
    const FogdConfig& config() const { return cfg_; }

    std::unique_ptr<Forecaster> clone() const override {
        return std::make_unique<FogdForecaster>(*this);
    }

protected:
    double do_step(const Eigen::VectorXd& x) override {
        if (!x.allFinite()) throw input_error("FogdForecaster::step: non-finite input");
        pending_z_ = embed(x);
        pending_yhat_ = weights_.dot(pending_z_);
        return pending_yhat_;
    }

    void do_supply_label(double y) override {
        weights_.noalias() -= cfg_.eta * 2.0 * (pending_yhat_ - y) * pending_z_;
    }

private:
    FogdConfig cfg_;
    Eigen::MatrixXd frequencies_;  // D x d
    Eigen::VectorXd phases_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd pending_z_;
    double pending_yhat_ = 0.0;
};

}  // namespace okr
