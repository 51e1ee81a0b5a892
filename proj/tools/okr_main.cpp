// okr — streaming online kernel regression benchmark tool.
//
// Subcommands:
//   run        stream a dataset through a forecaster, write per-step CSV
//   regret     run and report cumulative regret vs. the batch ridge comparator
//   adversary  generate a greedy adversarial sequence for a forecaster
//   rates      analytic regret-rate curves under the capacity condition
//   deff       effective dimension of a dataset's Gram matrix
//
// Exit codes: 0 ok, 2 input/parse error, 3 protocol error, 4 numeric failure.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "okr/adversary.hpp"
#include "okr/dataset.hpp"
#include "okr/kernel.hpp"
#include "okr/rates.hpp"
#include "okr/stream.hpp"

namespace {

struct CommonDataFlags {
    std::string data;
    std::string format = "csv";
    int label_col = -1;
    bool do_scale = false;
    std::optional<int> limit_n;
};

void add_data_flags(CLI::App* cmd, CommonDataFlags& f) {
    cmd->add_option("--data", f.data, "input dataset path")->required();
    cmd->add_option("--format", f.format, "dataset format")
        ->check(CLI::IsMember({"csv", "libsvm"}));
    cmd->add_option("--label-col", f.label_col, "CSV label column (default: last)");
    cmd->add_flag("--scale", f.do_scale, "affinely map every coordinate and the label to [-1,1]");
    cmd->add_option("--limit-n", f.limit_n, "use only the first N rows");
}

okr::Dataset load_dataset(const CommonDataFlags& f) {
    const okr::DataFormat fmt =
        f.format == "csv" ? okr::DataFormat::csv : okr::DataFormat::libsvm;
    okr::Dataset ds = okr::ingest(f.data, fmt, f.label_col);
    if (f.do_scale) ds = okr::scale(ds);
    return ds;
}

struct AlgoFlags {
    std::string algo = "exact";
    double lambda = 1.0;
    double sigma = 1.0;
    std::optional<int> M;
    double mu = 1.0;
    double beta = 1.0;
    double delta = 0.1;
    int D = 1000;
    std::optional<double> eta;
    std::uint64_t seed = 0;
    double B = 1.0;
    std::string task = "regression";
    std::optional<double> timeout_s;
};

void add_algo_flags(CLI::App* cmd, AlgoFlags& f, bool required_algo = true) {
    auto* algo = cmd->add_option("--algo", f.algo, "forecaster")
                     ->check(CLI::IsMember(
                         {"exact", "taylor", "nystrom", "nystrom-beforehand", "fogd"}));
    if (required_algo) algo->required();
    cmd->add_option("--lambda", f.lambda, "ridge regularization (default 1)");
    cmd->add_option("--sigma", f.sigma, "Gaussian kernel bandwidth (default 1)");
    cmd->add_option("--M", f.M, "Taylor degree cap (default: chosen from n, lambda, data radius)");
    cmd->add_option("--mu", f.mu, "KORS projection accuracy (default 1)");
    cmd->add_option("--beta", f.beta, "KORS oversampling factor (default 1)");
    cmd->add_option("--delta", f.delta, "KORS failure probability (default 0.1)");
    cmd->add_option("--D", f.D, "FOGD random-feature count (default 1000)");
    cmd->add_option("--eta", f.eta, "FOGD learning rate (default 1/sqrt(n))");
    cmd->add_option("--seed", f.seed, "RNG seed");
    cmd->add_option("--B", f.B, "label bound used in bound evaluation (never clips)");
    cmd->add_option("--task", f.task, "loss to record")
        ->check(CLI::IsMember({"regression", "classification"}));
    cmd->add_option("--timeout-s", f.timeout_s, "stop the stream after this many seconds");
}

okr::HarnessConfig to_config(const AlgoFlags& f, const std::optional<int>& limit_n) {
    okr::HarnessConfig cfg;
    cfg.algo = okr::algo_from_string(f.algo);
    cfg.lambda = f.lambda;
    cfg.sigma = f.sigma;
    cfg.M = f.M;
    cfg.mu = f.mu;
    cfg.beta = f.beta;
    cfg.delta = f.delta;
    cfg.D = f.D;
    cfg.eta = f.eta;
    cfg.seed = f.seed;
    cfg.B = f.B;
    cfg.task = f.task == "regression" ? okr::Task::regression : okr::Task::classification;
    cfg.limit_n = limit_n;
    cfg.timeout_s = f.timeout_s;
    return cfg;
}

void write_dataset_csv(const std::string& path, const okr::Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw okr::input_error("cannot open '" + path + "' for writing");
    for (int j = 0; j < ds.d(); ++j) out << "x" << (j + 1) << ",";
    out << "y\n";
    char buf[64];
    for (int i = 0; i < ds.n(); ++i) {
        for (int j = 0; j < ds.d(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g,", ds.X(i, j));
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), "%.17g\n", ds.y(i));
        out << buf;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming online kernel regression benchmark"};
    app.require_subcommand(1);

    // ---- run ----
    auto* run_cmd = app.add_subcommand("run", "stream a dataset, write per-step records CSV");
    CommonDataFlags run_data;
    AlgoFlags run_algo;
    std::string run_out;
    add_data_flags(run_cmd, run_data);
    add_algo_flags(run_cmd, run_algo);
    run_cmd->add_option("--out", run_out, "output CSV path")->required();

    // ---- regret ----
    auto* regret_cmd = app.add_subcommand("regret", "run and report regret vs. batch ridge");
    CommonDataFlags regret_data;
    AlgoFlags regret_algo;
    std::string regret_out;
    add_data_flags(regret_cmd, regret_data);
    add_algo_flags(regret_cmd, regret_algo);
    regret_cmd->add_option("--out", regret_out, "also write the per-step records CSV here");

    // ---- adversary ----
    auto* adv_cmd = app.add_subcommand("adversary", "generate a greedy adversarial dataset");
    AlgoFlags adv_algo;
    int adv_n = 40, adv_dim = 1, adv_grid = 21, adv_ygrid = 2;
    std::string adv_out;
    add_algo_flags(adv_cmd, adv_algo);
    adv_cmd->add_option("--n", adv_n, "sequence length");
    adv_cmd->add_option("--dim", adv_dim, "input dimension");
    adv_cmd->add_option("--grid", adv_grid, "grid points per input dimension");
    adv_cmd->add_option("--y-grid", adv_ygrid, "label grid points on [-1,1]");
    adv_cmd->add_option("--out", adv_out, "output dataset CSV path")->required();

    // ---- rates ----
    auto* rates_cmd = app.add_subcommand("rates", "regret-rate exponents vs. dictionary size");
    double rates_gamma = 0.25;
    double a_min = 0.0, a_max = 1.0;
    int a_count = 101;
    std::string rates_out;
    rates_cmd->add_option("--gamma", rates_gamma, "capacity exponent in (0,1)")->required();
    rates_cmd->add_option("--a-min", a_min, "smallest dictionary exponent");
    rates_cmd->add_option("--a-max", a_max, "largest dictionary exponent");
    rates_cmd->add_option("--a-count", a_count, "grid size");
    rates_cmd->add_option("--out", rates_out, "output CSV path (default stdout)");

    // ---- deff ----
    auto* deff_cmd = app.add_subcommand("deff", "effective dimension of the dataset Gram matrix");
    CommonDataFlags deff_data;
    double deff_lambda = 1.0, deff_sigma = 1.0;
    add_data_flags(deff_cmd, deff_data);
    deff_cmd->add_option("--lambda", deff_lambda, "regularization (default 1)");
    deff_cmd->add_option("--sigma", deff_sigma, "kernel bandwidth (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(run_cmd)) {
            const okr::Dataset ds = load_dataset(run_data);
            const okr::HarnessConfig cfg = to_config(run_algo, run_data.limit_n);
            const std::vector<okr::RunRecord> records = okr::run_stream(cfg, ds);
            std::ofstream out(run_out);
            if (!out) throw okr::input_error("cannot open '" + run_out + "' for writing");
            okr::write_records_csv(out, records);
            std::fprintf(stderr, "wrote %zu records to %s\n", records.size(), run_out.c_str());
        } else if (app.got_subcommand(regret_cmd)) {
            const okr::Dataset ds = load_dataset(regret_data);
            const okr::HarnessConfig cfg = to_config(regret_algo, regret_data.limit_n);
            const std::vector<okr::RunRecord> records = okr::run_stream(cfg, ds);
            if (!regret_out.empty()) {
                std::ofstream out(regret_out);
                if (!out) throw okr::input_error("cannot open '" + regret_out + "' for writing");
                okr::write_records_csv(out, records);
            }
            const okr::RegretLedger ledger = okr::regret_report(
                records, ds, okr::KernelSpec::gaussian(cfg.sigma), cfg.lambda, cfg.B);
            std::printf("n=%zu\n", records.size());
            std::printf("learner_loss=%.12g\n", ledger.learner_loss);
            std::printf("comparator_loss=%.12g\n", ledger.comparator_loss);
            std::printf("comparator_norm_sq=%.12g\n", ledger.comparator_norm_sq);
            std::printf("regret=%.12g\n", ledger.regret);
            std::printf("bound_prop21=%.12g\n", ledger.bound_prop21);
            std::printf("bound_satisfied=%s\n", ledger.bound_satisfied ? "true" : "false");
        } else if (app.got_subcommand(adv_cmd)) {
            const okr::HarnessConfig cfg = to_config(adv_algo, std::nullopt);
            std::vector<double> y_grid;
            if (adv_ygrid == 1) {
                y_grid.push_back(0.0);
            } else {
                for (int i = 0; i < adv_ygrid; ++i) {
                    y_grid.push_back(-1.0 + 2.0 * i / (adv_ygrid - 1));
                }
            }
            const okr::Dataset ds = okr::adversary_generate(cfg, adv_n, adv_dim, adv_grid, y_grid);
            write_dataset_csv(adv_out, ds);
            std::fprintf(stderr, "wrote %d adversarial rows to %s\n", ds.n(), adv_out.c_str());
        } else if (app.got_subcommand(rates_cmd)) {
            if (a_count < 1) throw okr::input_error("rates: --a-count must be >= 1");
            okr::RateQuery q;
            q.gamma = rates_gamma;
            for (int i = 0; i < a_count; ++i) {
                q.a_grid.push_back(a_count == 1 ? a_min
                                                : a_min + (a_max - a_min) * i / (a_count - 1));
            }
            const auto rows = okr::emit_rates(q);
            std::ostringstream body;
            body << "algorithm,gamma,a,b\n";
            char buf[160];
            for (const auto& r : rows) {
                std::snprintf(buf, sizeof(buf), "%s,%.12g,%.12g,%.12g\n", r.algorithm.c_str(),
                              r.gamma, r.a, r.b);
                body << buf;
            }
            if (rates_out.empty()) {
                std::cout << body.str();
            } else {
                std::ofstream out(rates_out);
                if (!out) throw okr::input_error("cannot open '" + rates_out + "' for writing");
                out << body.str();
            }
        } else if (app.got_subcommand(deff_cmd)) {
            okr::Dataset ds = load_dataset(deff_data);
            if (deff_data.limit_n && ds.n() > *deff_data.limit_n) {
                okr::Dataset trimmed;
                trimmed.X = ds.X.topRows(*deff_data.limit_n);
                trimmed.y = ds.y.head(*deff_data.limit_n);
                ds = trimmed;
            }
            const okr::KernelSpec spec = okr::KernelSpec::gaussian(deff_sigma);
            const Eigen::MatrixXd K = okr::gram(spec, ds.X);
            const Eigen::VectorXd eigs = okr::psd_eigenvalues(K);
            const double deff = okr::effective_dimension_from_eigenvalues(eigs, deff_lambda);
            double log_sum = 0.0;
            for (Eigen::Index i = 0; i < eigs.size(); ++i) {
                log_sum += std::log1p(eigs(i) / deff_lambda);
            }
            std::printf("n,lambda,sigma,deff,spectral_sum\n");
            std::printf("%d,%.12g,%.12g,%.12g,%.12g\n", ds.n(), deff_lambda, deff_sigma, deff,
                        log_sum);
        }
    } catch (const okr::input_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const okr::protocol_error& e) {
        std::fprintf(stderr, "protocol error: %s\n", e.what());
        return 3;
    } catch (const okr::numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
