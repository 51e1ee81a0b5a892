#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "okr/cholesky_update.hpp"
#include "okr/errors.hpp"
#include "okr/forecaster.hpp"
#include "okr/kernel.hpp"

namespace okr {

struct KorsConfig {
    double mu = 1.0;    // projection accuracy target
    double beta = 1.0;  // oversampling factor on the admission probability
    double eps = 0.5;   // leverage inflation
    double delta = 0.1;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(mu > 0.0)) throw input_error("KorsConfig: mu must be positive");
        if (!(beta > 0.0)) throw input_error("KorsConfig: beta must be positive");
        if (!(eps > 0.0 && eps < 1.0)) throw input_error("KorsConfig: eps must be in (0,1)");
        if (!(delta > 0.0 && delta < 1.0)) throw input_error("KorsConfig: delta must be in (0,1)");
    }
};

/// Oversampling level under which the dictionary-size guarantee is proved.
inline double kors_theory_beta(int n, double delta) {
    return 12.0 * std::log(static_cast<double>(n) / delta);
}

/// Online leverage-score sampler. Maintains a monotone dictionary of inputs,
/// its Gram matrix, and the lower Cholesky factor of (K_II + mu I) used for
/// leverage estimates. Points are never dropped.
///
/// The leverage estimate is the regularized Schur complement against the
/// dictionary, inflated by (1 + eps) and clipped to [0, 1]:
///     tau(x) = min(1, (1+eps)/mu * (k(x,x) - b^T (K_II + mu I)^-1 b)).
class KorsSampler {
public:
    KorsSampler(KernelSpec spec, KorsConfig cfg)
        : spec_(spec), cfg_(cfg), rng_(cfg.seed) {
        cfg_.validate();
    }

    double leverage_estimate(const Eigen::VectorXd& x) const {
        return leverage_from_schur(schur_complement(x));
    }

    /// Bernoulli(min(1, beta * tau)) admission; grows the dictionary on
    /// success. One uniform draw is consumed per call, admitted or not.
    bool admit(const Eigen::VectorXd& x) {
        const int t = t_seen_++;
        Eigen::VectorXd b;
        double schur = eval_kernel(spec_, x, x);
        if (size() > 0) {
            b = kernel_column(x);
            Eigen::VectorXd w = b;
            factor_view().triangularView<Eigen::Lower>().solveInPlace(w);
            schur = std::max(0.0, schur - w.squaredNorm());
        }
        const double tau = leverage_from_schur(schur);
        const double p = std::min(1.0, cfg_.beta * tau);
        const bool admitted = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p;
        if (admitted) grow(x, b, t);
        return admitted;
    }

    int size() const { return static_cast<int>(points_.size()); }
    int steps_seen() const { return t_seen_; }
    const std::vector<Eigen::VectorXd>& points() const { return points_; }
    const std::vector<int>& step_indices() const { return step_indices_; }
    const KorsConfig& config() const { return cfg_; }
    const KernelSpec& kernel() const { return spec_; }

    Eigen::MatrixXd kii() const {
        return kii_.topLeftCorner(size(), size());
    }

    /// k(x, x~_j) over the current dictionary.
    Eigen::VectorXd kernel_column(const Eigen::VectorXd& x) const {
        Eigen::VectorXd b(size());
        for (int j = 0; j < size(); ++j) b(j) = eval_kernel(spec_, points_[static_cast<std::size_t>(j)], x);
        return b;
    }

private:
    double leverage_from_schur(double schur) const {
        const double tau = (1.0 + cfg_.eps) / cfg_.mu * schur;
        return std::min(1.0, std::max(0.0, tau));
    }

    double schur_complement(const Eigen::VectorXd& x) const {
        double schur = eval_kernel(spec_, x, x);
        if (size() > 0) {
            Eigen::VectorXd w = kernel_column(x);
            factor_view().triangularView<Eigen::Lower>().solveInPlace(w);
            schur = std::max(0.0, schur - w.squaredNorm());
        }
        return schur;
    }

    Eigen::Block<const Eigen::MatrixXd> factor_view() const {
        return lmu_.topLeftCorner(size(), size());
    }

    void grow(const Eigen::VectorXd& x, const Eigen::VectorXd& b, int arrival) {
        const int m = size();
        if (kii_.rows() <= m) {
            const Eigen::Index cap = std::max<Eigen::Index>(16, 2 * kii_.rows());
            Eigen::MatrixXd kii_big = Eigen::MatrixXd::Zero(cap, cap);
            Eigen::MatrixXd lmu_big = Eigen::MatrixXd::Zero(cap, cap);
            kii_big.topLeftCorner(m, m) = kii_.topLeftCorner(m, m);
            lmu_big.topLeftCorner(m, m) = lmu_.topLeftCorner(m, m);
            kii_.swap(kii_big);
            lmu_.swap(lmu_big);
        }
        const double kxx = eval_kernel(spec_, x, x);
        if (m > 0) {
            kii_.block(0, m, m, 1) = b;
            kii_.block(m, 0, 1, m) = b.transpose();
            Eigen::VectorXd w = b;
            factor_view().triangularView<Eigen::Lower>().solveInPlace(w);
            lmu_.block(m, 0, 1, m) = w.transpose();
            // regularized Schur complement is at least mu up to rounding
            lmu_(m, m) = std::sqrt(std::max(kxx + cfg_.mu - w.squaredNorm(), 1e-12 * cfg_.mu));
        } else {
            lmu_(0, 0) = std::sqrt(kxx + cfg_.mu);
        }
        kii_(m, m) = kxx;
        points_.push_back(x);
        step_indices_.push_back(arrival);
    }

    KernelSpec spec_;
    KorsConfig cfg_;
    std::vector<Eigen::VectorXd> points_;
    std::vector<int> step_indices_;
    Eigen::MatrixXd kii_;  // capacity-grown; top-left m x m is live
    Eigen::MatrixXd lmu_;  // lower Cholesky factor of (K_II + mu I)
    std::mt19937_64 rng_;
    int t_seen_ = 0;
};

/// Projected forecaster on the span of a KORS-sampled dictionary.
///
/// State after t rounds (label supplied): R is the upper factor of
///     A_t = K_{t,I}^T K_{t,I} + lambda K_{I,I}
/// over the current dictionary I, and c = K_{t,I}^T Y_t. During a pending
/// round A additionally holds the unlabeled penalty row of the current
/// point. Predictions solve A alpha = c by two triangular sweeps.
///
/// Per-round updates touch only dictionary-restricted rows; a dictionary
/// insertion borders the factor with the published two rank-one operations
/// (u = (c/(1+g), g), v = (c/(1+g), -1), g = sqrt(1+d)). The published
/// pseudo-code applies the per-round update with a length-t vector; the
/// dictionary-restricted row is the consistent reading and is what we use.
/// A failed downdate falls back to a dense rebuild and is counted.
class NystromForecaster : public Forecaster {
public:
    NystromForecaster(KernelSpec spec, double lambda, KorsConfig kors_cfg)
        : spec_(spec), lambda_(lambda), kors_(spec, kors_cfg) {
        if (!(lambda > 0.0)) throw input_error("NystromForecaster: lambda must be positive");
    }

    /// Beforehand-features mode: the whole input sequence is available up
    /// front, so KORS runs over it first and the stream is then forecast
    /// against the fixed final dictionary.
    static NystromForecaster beforehand(KernelSpec spec, double lambda, KorsConfig kors_cfg,
                                        const Eigen::MatrixXd& all_inputs) {
        NystromForecaster f(spec, lambda, kors_cfg);
        for (Eigen::Index i = 0; i < all_inputs.rows(); ++i) {
            f.kors_.admit(all_inputs.row(i).transpose());
        }
        f.fixed_dictionary_ = true;
        const int m = f.kors_.size();
        if (m > 0) {
            // A_0 = lambda K_II before any data row arrives
            Eigen::MatrixXd a0 = lambda * f.kors_.kii();
            f.r_ = f.factor_or_rebuild(a0);
            f.c_ = Eigen::VectorXd::Zero(m);
        }
        return f;
    }

    int dictionary_size() const override { return kors_.size(); }
    const KorsSampler& kors() const { return kors_; }
    double lambda() const { return lambda_; }
    bool fixed_dictionary() const { return fixed_dictionary_; }
    long refactor_count() const { return refactor_count_; }

    /// Upper factor R with R^T R = A (current dictionary size).
    const Eigen::MatrixXd& factor() const { return r_; }

    /// A rebuilt from scratch; the consistency oracle for the factor.
    Eigen::MatrixXd dense_system() const {
        const int m = kors_.size();
        Eigen::MatrixXd a = lambda_ * kors_.kii();
        for (const auto& x : inputs_) {
            const Eigen::VectorXd row = kors_.kernel_column(x);
            a.noalias() += row * row.transpose();
        }
        return a;
    }

    std::unique_ptr<Forecaster> clone() const override {
        return std::make_unique<NystromForecaster>(*this);
    }

protected:
    double do_step(const Eigen::VectorXd& x) override {
        if (!inputs_.empty() && x.size() != inputs_.front().size()) {
            throw input_error("NystromForecaster::step: input dimension changed mid-stream");
        }
        if (!x.allFinite()) throw input_error("NystromForecaster::step: non-finite input");
        inputs_.push_back(x);

        const int m_old = kors_.size();
        const bool admitted = fixed_dictionary_ ? false : kors_.admit(x);
        const Eigen::VectorXd row = kors_.kernel_column(x);

        // Penalty row of the current point over the pre-insertion dictionary.
        if (m_old > 0) cholesky_update(r_.topLeftCorner(m_old, m_old), row.head(m_old));
        if (admitted) border_with_new_point(x, row);

        pending_row_ = row;
        const int m = kors_.size();
        if (m == 0) return 0.0;
        Eigen::VectorXd alpha = c_;
        const auto rview = r_.topLeftCorner(m, m);
        rview.transpose().triangularView<Eigen::Lower>().solveInPlace(alpha);
        rview.triangularView<Eigen::Upper>().solveInPlace(alpha);
        return row.dot(alpha);
    }

    void do_supply_label(double y) override {
        labels_.push_back(y);
        if (kors_.size() > 0) c_.noalias() += y * pending_row_;
    }

private:
    /// Extends A with the column of the freshly admitted point. The new
    /// column entries cover every data row seen so far INCLUDING the current
    /// pending one (its contribution to the old block was already applied by
    /// the dictionary-restricted penalty update above).
    void border_with_new_point(const Eigen::VectorXd& x, const Eigen::VectorXd& row) {
        const int m_old = kors_.size() - 1;
        const std::size_t t = inputs_.size();

        Eigen::VectorXd cross = Eigen::VectorXd::Zero(m_old);
        double corner = 0.0;
        double c_entry = 0.0;
        for (std::size_t s = 0; s < t; ++s) {
            const double kappa_s = eval_kernel(spec_, inputs_[s], x);
            if (m_old > 0) {
                for (int j = 0; j < m_old; ++j) {
                    cross(j) += eval_kernel(spec_, inputs_[s], kors_.points()[static_cast<std::size_t>(j)]) * kappa_s;
                }
            }
            corner += kappa_s * kappa_s;
            if (s < labels_.size()) c_entry += labels_[s] * kappa_s;
        }
        for (int j = 0; j < m_old; ++j) cross(j) += lambda_ * row(j);
        corner += lambda_ * eval_kernel(spec_, x, x);

        const int m = m_old + 1;
        Eigen::MatrixXd r_ext = Eigen::MatrixXd::Zero(m, m);
        if (m_old > 0) r_ext.topLeftCorner(m_old, m_old) = r_.topLeftCorner(m_old, m_old);

        const double g = std::sqrt(1.0 + corner);
        Eigen::VectorXd u(m), v(m);
        u.head(m_old) = cross / (1.0 + g);
        u(m_old) = g;
        v.head(m_old) = cross / (1.0 + g);
        v(m_old) = -1.0;
        cholesky_update(r_ext, u);
        const bool ok = cholesky_downdate(r_ext, v);

        Eigen::VectorXd c_new(m);
        c_new.head(m_old) = c_;
        c_new(m_old) = c_entry;
        c_ = std::move(c_new);

        if (ok) {
            r_ = std::move(r_ext);
        } else {
            Eigen::MatrixXd a = dense_system();
            r_ = factor_or_rebuild(a);
            ++refactor_count_;
        }
    }

    /// LLT with an escalating diagonal jitter fallback; exactly duplicated
    /// dictionary points make A singular and land here.
    Eigen::MatrixXd factor_or_rebuild(const Eigen::MatrixXd& a) const {
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() == Eigen::Success) return llt.matrixU();
        const double scale = std::max(a.diagonal().maxCoeff(), 1.0);
        for (double jitter = 1e-12 * scale; jitter <= 1e-6 * scale; jitter *= 10.0) {
            Eigen::MatrixXd aj = a;
            aj.diagonal().array() += jitter;
            llt.compute(aj);
            if (llt.info() == Eigen::Success) return llt.matrixU();
        }
        throw numeric_error("NystromForecaster: dense refactorization failed");
    }

    KernelSpec spec_;
    double lambda_;
    KorsSampler kors_;
    bool fixed_dictionary_ = false;
    Eigen::MatrixXd r_;       // m x m upper factor
    Eigen::VectorXd c_;       // K_{t,I}^T Y_t
    Eigen::VectorXd pending_row_;
    std::vector<Eigen::VectorXd> inputs_;
    std::vector<double> labels_;
    long refactor_count_ = 0;
};

}  // namespace okr
