#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "okr/errors.hpp"

namespace okr {

enum class KernelFamily { gaussian };

/// Kernel family plus bandwidth. kappa bounds sqrt(k(x,x)) uniformly;
/// for the Gaussian family k(x,x) = 1, so kappa = 1.
struct KernelSpec {
    KernelFamily family = KernelFamily::gaussian;
    double sigma = 1.0;
    double kappa = 1.0;

    static KernelSpec gaussian(double sigma) {
        if (!(sigma > 0.0)) {
            throw input_error("KernelSpec: sigma must be positive, got " + std::to_string(sigma));
        }
        return KernelSpec{KernelFamily::gaussian, sigma, 1.0};
    }
};

inline double eval_kernel(const KernelSpec& spec, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& xp) {
    if (x.size() != xp.size()) {
        throw input_error("eval_kernel: dimension mismatch (" + std::to_string(x.size()) +
                          " vs " + std::to_string(xp.size()) + ")");
    }
    const double d2 = (x - xp).squaredNorm();
    return std::exp(-d2 / (2.0 * spec.sigma * spec.sigma));
}

/// Dense Gram matrix K[i][j] = k(x_i, x_j); rows of X are points.
inline Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K(n, n);
    const double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double k = std::exp(-(X.row(i) - X.row(j)).squaredNorm() * inv2s2);
            K(i, j) = k;
            K(j, i) = k;
        }
    }
    return K;
}

/// Eigenvalues of a symmetric PSD matrix, ascending. Negatives below the
/// rounding tolerance 1e-10 * n * max|K| are clamped to zero; anything more
/// negative is treated as a numerical failure.
inline Eigen::VectorXd psd_eigenvalues(const Eigen::MatrixXd& K) {
    const Eigen::Index n = K.rows();
    if (n == 0) return Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw numeric_error("psd_eigenvalues: eigendecomposition failed");
    }
    Eigen::VectorXd ev = es.eigenvalues();
    const double tol = 1e-10 * static_cast<double>(n) * K.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (ev(i) < -tol) {
            throw numeric_error("psd_eigenvalues: matrix is not PSD (eigenvalue " +
                                std::to_string(ev(i)) + " below -" + std::to_string(tol) + ")");
        }
        if (ev(i) < 0.0) ev(i) = 0.0;
    }
    return ev;
}

inline double effective_dimension_from_eigenvalues(const Eigen::VectorXd& eigs, double lambda) {
    if (!(lambda > 0.0)) throw input_error("effective_dimension: lambda must be positive");
    double s = 0.0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) s += eigs(i) / (eigs(i) + lambda);
    return s;
}

/// d_eff(lambda) = tr(K (K + lambda I)^-1), computed spectrally.
inline double effective_dimension(const Eigen::MatrixXd& K, double lambda) {
    return effective_dimension_from_eigenvalues(psd_eigenvalues(K), lambda);
}

struct SpectralRegretBound {
    double spectral;    // lambda*|f|^2 + B^2 sum_k log(1 + mu_k/lambda)
    double relaxation;  // log(e + e n kappa^2/lambda) * d_eff(lambda) * B^2 + lambda*|f|^2
};

/// Regret bound of the exact forecaster in both its spectral form and its
/// effective-dimension relaxation. The spectral form never exceeds the
/// relaxation; a violation beyond rounding is reported as a numeric failure.
inline SpectralRegretBound spectral_regret_bound(const Eigen::MatrixXd& K, double lambda,
                                                 double B, double f_norm_sq) {
    if (!(lambda > 0.0)) throw input_error("spectral_regret_bound: lambda must be positive");
    if (f_norm_sq < 0.0) throw input_error("spectral_regret_bound: f_norm_sq must be >= 0");
    const Eigen::Index n = K.rows();
    const Eigen::VectorXd eigs = psd_eigenvalues(K);
    double log_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) log_sum += std::log1p(eigs(i) / lambda);
    const double spectral = lambda * f_norm_sq + B * B * log_sum;

    const double e = std::exp(1.0);
    const double kappa_sq = (n > 0) ? K.diagonal().maxCoeff() : 1.0;
    const double deff = effective_dimension_from_eigenvalues(eigs, lambda);
    const double relaxation =
        std::log(e + e * static_cast<double>(n) * kappa_sq / lambda) * deff * B * B +
        lambda * f_norm_sq;

    if (spectral > relaxation + 1e-9 * (1.0 + std::abs(relaxation))) {
        throw numeric_error("spectral_regret_bound: spectral form exceeds its relaxation");
    }
    return {spectral, relaxation};
}

}  // namespace okr
