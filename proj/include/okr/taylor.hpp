#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "okr/errors.hpp"

namespace okr {

/// Exponent vector of one tensor-product basis function; degree is the
/// entry sum.
using MultiIndex = std::vector<int>;

inline int multi_index_degree(const MultiIndex& k) {
    int s = 0;
    for (int v : k) s += v;
    return s;
}

/// C(M+d, d) with overflow detection; this is the feature count of the
/// degree-M basis in dimension d.
inline std::uint64_t multi_index_count(int M, int d) {
    if (M < 0 || d < 1) throw input_error("multi_index_count: need M >= 0 and d >= 1");
    std::uint64_t r = 1;
    for (int i = 1; i <= d; ++i) {
        const std::uint64_t num = static_cast<std::uint64_t>(M) + static_cast<std::uint64_t>(i);
        if (r > std::numeric_limits<std::uint64_t>::max() / num) {
            throw input_error("multi_index_count: C(M+d,d) overflows for M=" +
                              std::to_string(M) + ", d=" + std::to_string(d));
        }
        r = r * num / static_cast<std::uint64_t>(i);  // exact: C(M+i, i) is integral
    }
    return r;
}

namespace detail {
inline void enumerate_degree(int remaining, int slots, MultiIndex& prefix,
                             std::vector<MultiIndex>& out) {
    if (slots == 1) {
        prefix.push_back(remaining);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int k = remaining; k >= 0; --k) {
        prefix.push_back(k);
        enumerate_degree(remaining - k, slots - 1, prefix, out);
        prefix.pop_back();
    }
}
}  // namespace detail

/// All multi-indices with |k| <= M in a fixed deterministic order:
/// degree-major, and within a degree the leading coordinate decreases first,
/// e.g. M=2, d=2 -> (0,0),(1,0),(0,1),(2,0),(1,1),(0,2).
inline std::vector<MultiIndex> enumerate_multi_indices(int M, int d) {
    const std::uint64_t count = multi_index_count(M, d);
    if (count > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
        throw input_error("enumerate_multi_indices: basis size " + std::to_string(count) +
                          " exceeds index capacity");
    }
    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(count));
    MultiIndex prefix;
    prefix.reserve(static_cast<std::size_t>(d));
    for (int g = 0; g <= M; ++g) detail::enumerate_degree(g, d, prefix, out);
    return out;
}

/// M = ceil(max(8 R^2 / sigma^2, 2 ln(n / min(lambda, 1)))), the degree cap
/// that makes the basis truncation error commensurate with the regret bound.
inline int choose_degree(double R, double sigma, int n, double lambda) {
    if (n < 1) throw input_error("choose_degree: n must be >= 1");
    if (!(sigma > 0.0)) throw input_error("choose_degree: sigma must be positive");
    if (!(lambda > 0.0)) throw input_error("choose_degree: lambda must be positive");
    const double a = 8.0 * R * R / (sigma * sigma);
    const double b = 2.0 * std::log(static_cast<double>(n) / std::min(lambda, 1.0));
    return static_cast<int>(std::ceil(std::max(a, b)));
}

/// (R/sigma)^(2M+2) / (M+1)!, evaluated in log space.
inline double truncation_bound(int M, double R, double sigma) {
    if (M < 0) throw input_error("truncation_bound: M must be >= 0");
    if (!(sigma > 0.0)) throw input_error("truncation_bound: sigma must be positive");
    if (R == 0.0) return 0.0;
    const double log_val =
        (2.0 * M + 2.0) * std::log(R / sigma) - std::lgamma(static_cast<double>(M) + 2.0);
    return std::exp(log_val);
}

/// Deterministic polynomial-times-Gaussian feature basis. The component for
/// multi-index k at x is
///     prod_i x_i^{k_i} / (sigma^{k_i} sqrt(k_i!)) * exp(-|x|^2 / (2 sigma^2)),
/// an orthonormal family in the Gaussian RKHS, so no whitening is needed.
class TaylorBasis {
public:
    TaylorBasis(int M, int d, double sigma)
        : degree_cap_(M), dim_(d), sigma_(sigma), indices_(enumerate_multi_indices(M, d)) {
        if (!(sigma > 0.0)) throw input_error("TaylorBasis: sigma must be positive");
        half_log_factorial_.resize(static_cast<std::size_t>(M) + 1);
        for (int t = 0; t <= M; ++t) {
            half_log_factorial_[static_cast<std::size_t>(t)] =
                0.5 * std::lgamma(static_cast<double>(t) + 1.0);
        }
    }

    int degree_cap() const { return degree_cap_; }
    int dim() const { return dim_; }
    int size() const { return static_cast<int>(indices_.size()); }
    double sigma() const { return sigma_; }
    const std::vector<MultiIndex>& indices() const { return indices_; }

    /// Log-magnitude accumulation with explicit sign tracking; exact zeros in
    /// x zero out every component with a positive exponent there. 0^0 = 1.
    Eigen::VectorXd embed(const Eigen::VectorXd& x) const {
        if (x.size() != dim_) {
            throw input_error("TaylorBasis::embed: expected dimension " + std::to_string(dim_) +
                              ", got " + std::to_string(x.size()));
        }
        if (!x.allFinite()) throw input_error("TaylorBasis::embed: non-finite input");
        const double log_sigma = std::log(sigma_);
        std::vector<double> log_abs(static_cast<std::size_t>(dim_));
        std::vector<bool> negative(static_cast<std::size_t>(dim_)), zero(static_cast<std::size_t>(dim_));
        for (int i = 0; i < dim_; ++i) {
            const double xi = x(i);
            zero[static_cast<std::size_t>(i)] = (xi == 0.0);
            negative[static_cast<std::size_t>(i)] = (xi < 0.0);
            log_abs[static_cast<std::size_t>(i)] =
                zero[static_cast<std::size_t>(i)] ? 0.0 : std::log(std::abs(xi)) - log_sigma;
        }
        const double envelope = -x.squaredNorm() / (2.0 * sigma_ * sigma_);

        Eigen::VectorXd out(size());
        for (int j = 0; j < size(); ++j) {
            const MultiIndex& k = indices_[static_cast<std::size_t>(j)];
            double log_mag = envelope;
            bool neg = false;
            bool is_zero = false;
            for (int i = 0; i < dim_; ++i) {
                const int ki = k[static_cast<std::size_t>(i)];
                if (ki == 0) continue;
                if (zero[static_cast<std::size_t>(i)]) {
                    is_zero = true;
                    break;
                }
                log_mag += ki * log_abs[static_cast<std::size_t>(i)] -
                           half_log_factorial_[static_cast<std::size_t>(ki)];
                if (negative[static_cast<std::size_t>(i)] && (ki & 1)) neg = !neg;
            }
            out(j) = is_zero ? 0.0 : (neg ? -std::exp(log_mag) : std::exp(log_mag));
        }
        return out;
    }

    /// |k(x,x') - <embed(x), embed(x')>|, the realized truncation error.
    double reconstruction_error(const Eigen::VectorXd& x, const Eigen::VectorXd& xp) const {
        const double k = std::exp(-(x - xp).squaredNorm() / (2.0 * sigma_ * sigma_));
        return std::abs(k - embed(x).dot(embed(xp)));
    }

private:
    int degree_cap_;
    int dim_;
    double sigma_;
    std::vector<MultiIndex> indices_;
    std::vector<double> half_log_factorial_;
};

}  // namespace okr
