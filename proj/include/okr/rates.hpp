#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "okr/errors.hpp"

namespace okr {

/// Analytic regret-rate queries under the capacity condition
/// d_eff(lambda') <= (n/lambda')^gamma: which regret exponent b
/// (regret = O(n^b)) does a dictionary of size m = n^a buy?
struct RateQuery {
    double gamma = 0.5;
    std::vector<double> a_grid;
};

struct RatePoint {
    std::string algorithm;
    double gamma = 0.0;
    double a = 0.0;
    double b = 0.0;
};

inline void validate_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw input_error("rates: gamma must be in (0,1)");
}

inline double optimal_rate_exponent(double gamma) { return gamma / (1.0 + gamma); }

/// Dictionary-size exponent above which the sequential forecaster reaches
/// the optimal rate: a = 2 gamma / (1 - gamma^2).
inline double pkawv_threshold(double gamma) {
    validate_gamma(gamma);
    return 2.0 * gamma / (1.0 - gamma * gamma);
}

inline double pkawv_rate_exponent(double gamma, double a) {
    validate_gamma(gamma);
    if (a >= pkawv_threshold(gamma)) return optimal_rate_exponent(gamma);
    return 1.0 + a * (gamma - 1.0) / (2.0 * gamma);
}

/// With the inputs known beforehand the threshold drops to 2 gamma / (1 + gamma).
inline double pkawv_beforehand_threshold(double gamma) {
    validate_gamma(gamma);
    return 2.0 * gamma / (1.0 + gamma);
}

inline double pkawv_beforehand_rate_exponent(double gamma, double a) {
    validate_gamma(gamma);
    if (a >= pkawv_beforehand_threshold(gamma)) return optimal_rate_exponent(gamma);
    return 1.0 - a / (2.0 * gamma);
}

namespace detail {

/// Two-stage grid minimizer over one exponent variable.
template <class F>
inline double grid_min(F f, double lo, double hi, int points = 512) {
    double best = std::numeric_limits<double>::infinity();
    double best_x = lo;
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double x = lo + step * i;
        const double v = f(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    const double flo = std::max(lo, best_x - step);
    const double fhi = std::min(hi, best_x + step);
    const double fstep = (fhi - flo) / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double x = flo + fstep * i;
        best = std::min(best, f(x));
    }
    return best;
}

}  // namespace detail

/// Fitted regret exponent for the sketched second-order baseline whose bound
/// is lambda + (n/m) d_eff(lambda): minimized over lambda = n^l on a grid of
/// exponents, so b(a) = min_l max(l, 1 - a + gamma(1 - l)).
inline double sketched_kons_rate_exponent(double gamma, double a) {
    validate_gamma(gamma);
    return detail::grid_min(
        [&](double l) { return std::max(l, 1.0 - a + gamma * (1.0 - l)); }, 0.0, 2.0);
}

/// Fitted regret exponent for the restarting baseline whose bound is
/// m (lambda + d_eff(lambda)) + n mu / lambda, with the dictionary tied to
/// the sampling level by m = d_eff(mu) = (n/mu)^gamma and capped at n^a.
/// Both mu = n^u and lambda = n^l run over exponent grids.
inline double pros_n_kons_rate_exponent(double gamma, double a) {
    validate_gamma(gamma);
    const double u_lo = 1.0 - a / gamma;  // dictionary budget n^a
    const double u_hi = 1.0;              // at least one dictionary point
    return detail::grid_min(
        [&](double u) {
            const double alpha = gamma * (1.0 - u);  // actual dictionary exponent
            return detail::grid_min(
                [&](double l) {
                    return std::max({alpha + l, alpha + gamma * (1.0 - l), 1.0 + u - l});
                },
                0.0, 2.0);
        },
        u_lo, u_hi);
}

/// Rate curves for all four algorithms over the requested dictionary-size
/// exponents. The projected forecasters use the closed-form corollaries;
/// the two baselines are numeric fits as described above.
inline std::vector<RatePoint> emit_rates(const RateQuery& q) {
    validate_gamma(q.gamma);
    for (double a : q.a_grid) {
        if (!(a >= 0.0 && a <= 1.0)) throw input_error("rates: a values must lie in [0,1]");
    }
    std::vector<RatePoint> rows;
    rows.reserve(q.a_grid.size() * 4);
    for (double a : q.a_grid) {
        rows.push_back({"pkawv", q.gamma, a, pkawv_rate_exponent(q.gamma, a)});
    }
    for (double a : q.a_grid) {
        rows.push_back({"pkawv_beforehand", q.gamma, a, pkawv_beforehand_rate_exponent(q.gamma, a)});
    }
    for (double a : q.a_grid) {
        rows.push_back({"sketched_kons", q.gamma, a, sketched_kons_rate_exponent(q.gamma, a)});
    }
    for (double a : q.a_grid) {
        rows.push_back({"pros_n_kons", q.gamma, a, pros_n_kons_rate_exponent(q.gamma, a)});
    }
    return rows;
}

}  // namespace okr
