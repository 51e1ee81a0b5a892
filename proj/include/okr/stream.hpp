#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "okr/awv.hpp"
#include "okr/dataset.hpp"
#include "okr/errors.hpp"
#include "okr/exact_kawv.hpp"
#include "okr/fogd.hpp"
#include "okr/forecaster.hpp"
#include "okr/kernel.hpp"
#include "okr/nystrom.hpp"
#include "okr/taylor.hpp"

namespace okr {

enum class Algo { exact, taylor, nystrom, nystrom_beforehand, fogd };
enum class Task { regression, classification };

inline Algo algo_from_string(const std::string& s) {
    if (s == "exact") return Algo::exact;
    if (s == "taylor") return Algo::taylor;
    if (s == "nystrom") return Algo::nystrom;
    if (s == "nystrom-beforehand") return Algo::nystrom_beforehand;
    if (s == "fogd") return Algo::fogd;
    throw input_error("unknown algorithm '" + s + "'");
}

inline std::string to_string(Algo a) {
    switch (a) {
        case Algo::exact: return "exact";
        case Algo::taylor: return "taylor";
        case Algo::nystrom: return "nystrom";
        case Algo::nystrom_beforehand: return "nystrom-beforehand";
        case Algo::fogd: return "fogd";
    }
    return "?";
}

/// One run's knobs. The defaults mirror the experimental presets
/// (sigma = 1, lambda = 1, mu = 1, beta = 1, D = 1000, eta = 1/sqrt(n)).
/// B is the label bound used when evaluating regret bounds; it never clips
/// anything.
struct HarnessConfig {
    Algo algo = Algo::exact;
    double lambda = 1.0;
    double sigma = 1.0;
    std::optional<int> M;  // Taylor degree; chosen from the data when absent
    double mu = 1.0;
    double beta = 1.0;
    double delta = 0.1;
    int D = 1000;
    std::optional<double> eta;  // FOGD learning rate; 1/sqrt(n) when absent
    std::uint64_t seed = 0;
    double B = 1.0;
    Task task = Task::regression;
    std::optional<int> limit_n;
    std::optional<double> timeout_s;
};

struct RunRecord {
    long t = 0;  // 1-based step
    double y = 0.0;
    double yhat = 0.0;
    double loss = 0.0;
    double cum_loss = 0.0;
    long long elapsed_ns = 0;
    int dict_size = 0;
};

namespace detail {
inline double max_row_norm(const Eigen::MatrixXd& X) {
    double r = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) r = std::max(r, X.row(i).norm());
    return r;
}
}  // namespace detail

/// Builds the forecaster a config describes. n, d and (for the beforehand
/// variant) the inputs come from the dataset about to be streamed.
inline std::unique_ptr<Forecaster> make_forecaster(const HarnessConfig& cfg, int n, int d,
                                                   const Eigen::MatrixXd* inputs = nullptr,
                                                   double input_radius = -1.0) {
    if (d < 1) throw input_error("make_forecaster: need d >= 1");
    const KernelSpec spec = KernelSpec::gaussian(cfg.sigma);
    switch (cfg.algo) {
        case Algo::exact:
            return std::make_unique<ExactKawv>(spec, cfg.lambda);
        case Algo::taylor: {
            int M;
            if (cfg.M) {
                M = *cfg.M;
            } else {
                double R = input_radius;
                if (R < 0.0) R = inputs ? detail::max_row_norm(*inputs) : std::sqrt(double(d));
                M = choose_degree(R, cfg.sigma, std::max(n, 1), cfg.lambda);
            }
            return std::make_unique<TaylorForecaster>(TaylorBasis(M, d, cfg.sigma), cfg.lambda);
        }
        case Algo::nystrom: {
            KorsConfig kc{cfg.mu, cfg.beta, 0.5, cfg.delta, cfg.seed};
            return std::make_unique<NystromForecaster>(spec, cfg.lambda, kc);
        }
        case Algo::nystrom_beforehand: {
            if (!inputs) {
                throw input_error("make_forecaster: beforehand mode needs the input sequence");
            }
            KorsConfig kc{cfg.mu, cfg.beta, 0.5, cfg.delta, cfg.seed};
            return std::make_unique<NystromForecaster>(
                NystromForecaster::beforehand(spec, cfg.lambda, kc, *inputs));
        }
        case Algo::fogd: {
            const double eta = cfg.eta ? *cfg.eta : 1.0 / std::sqrt(std::max(n, 1));
            FogdConfig fc{cfg.D, eta, cfg.sigma, cfg.seed};
            return std::make_unique<FogdForecaster>(fc, d);
        }
    }
    throw input_error("make_forecaster: unhandled algorithm");
}

inline std::unique_ptr<Forecaster> make_forecaster(const HarnessConfig& cfg, const Dataset& ds) {
    return make_forecaster(cfg, ds.n(), ds.d(), &ds.X);
}

/// One pass of the prediction protocol over the dataset in file order.
/// Labels are read strictly after the prediction is emitted. Regression
/// records square loss; classification records the sign-mismatch error
/// (sign(0) counts as +1) while the forecaster still trains on the raw
/// labels. limit_n truncates the stream, timeout_s stops it on wall time.
inline std::vector<RunRecord> run_stream(const HarnessConfig& cfg, const Dataset& ds) {
    const int n = cfg.limit_n ? std::min(ds.n(), *cfg.limit_n) : ds.n();
    std::vector<RunRecord> records;
    if (n == 0) return records;
    records.reserve(static_cast<std::size_t>(n));

    const Eigen::MatrixXd head_inputs = ds.X.topRows(n);
    auto forecaster = make_forecaster(cfg, n, ds.d(), &head_inputs);

    const auto run_start = std::chrono::steady_clock::now();
    double cum = 0.0;
    for (int t = 0; t < n; ++t) {
        const Eigen::VectorXd x = ds.X.row(t).transpose();
        const double y = ds.y(t);
        const auto start = std::chrono::steady_clock::now();
        double yhat;
        try {
            yhat = forecaster->step(x);
            forecaster->supply_label(y);
        } catch (const protocol_error& e) {
            throw protocol_error("step " + std::to_string(t + 1) + ": " + e.what());
        }
        const auto stop = std::chrono::steady_clock::now();

        double loss;
        if (cfg.task == Task::regression) {
            const double err = y - yhat;
            loss = err * err;
        } else {
            const int pred_sign = yhat >= 0.0 ? 1 : -1;
            const int true_sign = y >= 0.0 ? 1 : -1;
            loss = pred_sign == true_sign ? 0.0 : 1.0;
        }
        cum += loss;
        records.push_back(RunRecord{
            t + 1, y, yhat, loss, cum,
            std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count(),
            forecaster->dictionary_size()});
        if (cfg.timeout_s) {
            const std::chrono::duration<double> wall = stop - run_start;
            if (wall.count() > *cfg.timeout_s) break;
        }
    }
    return records;
}

inline constexpr const char* kRunRecordCsvHeader = "t,y,yhat,loss,cum_loss,elapsed_ns,dict_size";

inline void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << kRunRecordCsvHeader << "\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%.17g,%lld,%d\n", r.t, r.y, r.yhat,
                      r.loss, r.cum_loss, r.elapsed_ns, r.dict_size);
        out << buf;
    }
}

inline std::vector<RunRecord> parse_records_csv(std::istream& in) {
    std::vector<RunRecord> records;
    std::string line;
    if (!std::getline(in, line)) return records;
    if (line.find("t,") != 0) throw input_error("records CSV: missing header");
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        RunRecord r;
        if (std::sscanf(line.c_str(), "%ld,%lg,%lg,%lg,%lg,%lld,%d", &r.t, &r.y, &r.yhat, &r.loss,
                        &r.cum_loss, &r.elapsed_ns, &r.dict_size) != 7) {
            throw input_error("records CSV line " + std::to_string(lineno) + ": malformed row");
        }
        records.push_back(r);
    }
    return records;
}

/// Cumulative regret of a run against the batch kernel-ridge comparator
/// fitted with the same lambda, plus the spectral bound it must obey.
struct RegretLedger {
    double learner_loss = 0.0;
    double comparator_loss = 0.0;
    double comparator_norm_sq = 0.0;  // alpha*^T K alpha*
    double regret = 0.0;
    double bound_prop21 = 0.0;
    bool bound_satisfied = false;
};

inline RegretLedger regret_report(const std::vector<RunRecord>& records, const Dataset& ds,
                                  const KernelSpec& spec, double lambda, double B) {
    const int n = static_cast<int>(records.size());
    if (n > 3000) throw input_error("regret_report: dense comparator capped at n = 3000");
    if (n > ds.n()) throw input_error("regret_report: more records than dataset rows");

    RegretLedger ledger;
    if (n == 0) return ledger;
    for (const auto& r : records) {
        const double err = r.y - r.yhat;
        ledger.learner_loss += err * err;
    }

    const Eigen::MatrixXd K = gram(spec, ds.X.topRows(n));
    Eigen::VectorXd Y(n);
    for (int i = 0; i < n; ++i) Y(i) = records[static_cast<std::size_t>(i)].y;
    Eigen::MatrixXd reg = K;
    reg.diagonal().array() += lambda;
    const Eigen::LLT<Eigen::MatrixXd> llt(reg);
    if (llt.info() != Eigen::Success) throw numeric_error("regret_report: comparator solve failed");
    const Eigen::VectorXd alpha = llt.solve(Y);
    const Eigen::VectorXd fitted = K * alpha;
    ledger.comparator_loss = (Y - fitted).squaredNorm();
    ledger.comparator_norm_sq = alpha.dot(fitted);
    ledger.regret = ledger.learner_loss - ledger.comparator_loss;
    ledger.bound_prop21 = spectral_regret_bound(K, lambda, B, ledger.comparator_norm_sq).spectral;
    ledger.bound_satisfied = ledger.regret <= ledger.bound_prop21 + 1e-6;
    return ledger;
}

}  // namespace okr
