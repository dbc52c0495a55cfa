#include "dreg/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "dreg/analysis.hpp"
#include "dreg/config.hpp"
#include "dreg/io.hpp"
#include "dreg/rng.hpp"

namespace dreg {

namespace {

namespace fs = std::filesystem;

ExperimentConfig load(const CommandOptions& opts) {
    ExperimentConfig cfg = parse_config(opts.config_path);
    if (opts.out_dir) cfg.out_dir = *opts.out_dir;
    if (opts.seed) cfg.meta.seed = *opts.seed;
    return cfg;
}

void ensure_out_dir(const ExperimentConfig& cfg) {
    if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

std::uint64_t trial_seed(std::uint64_t base_seed, int seed_idx) {
    return mix_seed(base_seed, mix_seed(stream_tag::trial, static_cast<std::uint64_t>(seed_idx)));
}

std::uint64_t test_seed(std::uint64_t base_seed) {
    return mix_seed(base_seed, stream_tag::test_set);
}

/// Fits one model on an already-built outer Gram.
FittedModel run_estimator(const EstimatorConfig& est, const OuterGram& k,
                          const Eigen::VectorXd& y, std::uint64_t seed) {
    switch (est.kind) {
        case EstimatorKind::krr:
            return krr_fit(k, y, est.lambda);
        case EstimatorKind::gd:
            return gd_fit(k, y, est.eta, est.T, est.tail);
        default: {
            SgdConfig cfg{est.eta, est.b, est.T, seed, est.sampling, est.tail};
            return sgd_fit(k, y, cfg);
        }
    }
}

/// Resolves (b, eta, T) from the schedule when requested; batch-size n means
/// the recursion is deterministic GD.
EstimatorConfig resolve_estimator(const ExperimentConfig& cfg, long long n,
                                  ScheduleSpec* sched_out = nullptr) {
    EstimatorConfig est = cfg.estimator;
    if (!est.use_schedule) return est;
    ScheduleInput in;
    in.n = n;
    in.r = cfg.schedule.r;
    in.nu = cfg.schedule.nu;
    in.alpha = cfg.schedule.alpha;
    in.R = cfg.schedule.R;
    in.M = cfg.schedule.M;
    in.eta0 = cfg.schedule.eta0;
    in.kappa_sq = cfg.outer.kappa_sq;
    in.logK = cfg.schedule.logK;
    in.variant = cfg.schedule.variant;
    const ScheduleSpec s = make_schedule(in);
    if (sched_out) *sched_out = s;
    est.eta = s.eta;
    est.b = s.b;
    est.T = s.T;
    if (s.b == n) {
        est.kind = EstimatorKind::gd;
    } else {
        est.kind = EstimatorKind::sgd;
        est.sampling = Sampling::with_replacement;
    }
    return est;
}

struct TrialResult {
    double risk = 0.0;
};

/// Runs tasks [0, count) on up to `jobs` workers. Each task writes only its
/// own slot, so results are identical for any worker count.
template <typename F>
void parallel_trials(int jobs, int count, F&& task) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

/// One training trial: generate, embed, fit, evaluate against a shared test
/// set. Throws with the (n, seed) identity on failure.
double run_trial(const ExperimentConfig& cfg, long long n, long long N, int seed_idx,
                 const EstimatorConfig& est, const LabeledBagSet& test) {
    try {
        MetaConfig meta = cfg.meta;
        meta.n = n;
        meta.N = N;
        const std::uint64_t seed = trial_seed(cfg.meta.seed, seed_idx);
        const LabeledBagSet train = sample_meta(meta, cfg.base, cfg.outer, seed);
        const OuterGram k = outer_gram(embedding_gram(train.bags, cfg.base), cfg.outer);
        FittedModel model = run_estimator(est, k, train.y, seed);
        attach_training_bags(model, std::make_shared<const std::vector<Bag>>(train.bags),
                             cfg.base);
        return excess_risk(model, test, cfg.base);
    } catch (const std::exception& e) {
        throw std::runtime_error("trial n=" + std::to_string(n) +
                                 " seed=" + std::to_string(seed_idx) + " failed: " + e.what());
    }
}

void mean_std(const std::vector<double>& v, double& mean, double& std_out) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    std_out = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
}

}  // namespace

int cmd_generate(const CommandOptions& opts) {
    const ExperimentConfig cfg = load(opts);
    ensure_out_dir(cfg);
    const LabeledBagSet set = sample_meta(cfg.meta, cfg.base, cfg.outer);
    write_bags(out_path(cfg, "bags.csv"), set.bags);
    write_labels(out_path(cfg, "labels.csv"), set);
    std::printf("generated n=%lld N=%lld d=%d y_range=[%s,%s]\n", cfg.meta.n, cfg.meta.N,
                cfg.base.dim, format_double(set.y.minCoeff()).c_str(),
                format_double(set.y.maxCoeff()).c_str());
    return kExitOk;
}

int cmd_fit(const CommandOptions& opts) {
    const ExperimentConfig cfg = load(opts);
    ensure_out_dir(cfg);

    LabeledBagSet train;
    if (cfg.bags_path) {
        train.bags = read_bags(*cfg.bags_path);
        if (!cfg.labels_path) throw config_error("[data] bags given without labels");
        read_labels(*cfg.labels_path, train);
    } else {
        train = sample_meta(cfg.meta, cfg.base, cfg.outer);
    }
    const long long n = train.n();
    const EstimatorConfig est = resolve_estimator(cfg, n);

    const OuterGram k = outer_gram(embedding_gram(train.bags, cfg.base), cfg.outer);
    FittedModel model = run_estimator(est, k, train.y, cfg.meta.seed);
    attach_training_bags(model, std::make_shared<const std::vector<Bag>>(train.bags), cfg.base);
    write_model(out_path(cfg, "model.txt"), model, cfg.base);

    const double train_mse = (k.k * model.alpha - train.y).squaredNorm() / static_cast<double>(n);
    double test_risk = std::nan("");
    if (cfg.sweep.test_bags > 0) {
        const LabeledBagSet test =
            fresh_test_set(cfg.meta, cfg.base, cfg.outer, cfg.sweep.test_bags,
                           cfg.sweep.test_bag_size, test_seed(cfg.meta.seed));
        test_risk = excess_risk(model, test, cfg.base);
    }
    std::printf("%s,%lld,%lld,%lld,%s,%lld,%s,%s\n", to_string(est.kind).c_str(), n, cfg.meta.N,
                est.kind == EstimatorKind::krr ? 0 : est.b,
                format_double(est.kind == EstimatorKind::krr ? est.lambda : est.eta).c_str(),
                est.kind == EstimatorKind::krr ? 0 : est.T, format_double(train_mse).c_str(),
                format_double(test_risk).c_str());
    return kExitOk;
}

int cmd_rates(const CommandOptions& opts) {
    ExperimentConfig cfg = load(opts);
    if (cfg.sweep.n_values.size() < 3)
        throw config_error("cmd_rates: sweep needs at least 3 n values");
    if (cfg.sweep.test_bags < 1) throw config_error("cmd_rates: sweep needs test_bags >= 1");
    cfg.estimator.use_schedule = true;
    ensure_out_dir(cfg);

    std::vector<long long> ns = cfg.sweep.n_values;
    std::sort(ns.begin(), ns.end());
    const LabeledBagSet test = fresh_test_set(cfg.meta, cfg.base, cfg.outer, cfg.sweep.test_bags,
                                              cfg.sweep.test_bag_size, test_seed(cfg.meta.seed));

    RateReport report;
    for (long long n : ns) {
        ScheduleSpec sched;
        const EstimatorConfig est = resolve_estimator(cfg, n, &sched);
        const long long N_used = std::min(sched.N_min, cfg.sweep.N_cap);
        std::vector<double> risks(static_cast<std::size_t>(cfg.sweep.seeds));
        parallel_trials(opts.jobs, cfg.sweep.seeds, [&](int s) {
            risks[static_cast<std::size_t>(s)] = run_trial(cfg, n, N_used, s, est, test);
        });
        RatePoint pt;
        pt.n = n;
        pt.trials = cfg.sweep.seeds;
        pt.N_used = N_used;
        pt.N_required = sched.N_min;
        mean_std(risks, pt.mean_risk, pt.std_risk);
        report.points.push_back(pt);
        report.theoretical_exponent = sched.rate_exponent;
        std::printf("n=%lld N=%lld (required %lld) mean_risk=%s std=%s\n", n, N_used, sched.N_min,
                    format_double(pt.mean_risk).c_str(), format_double(pt.std_risk).c_str());
    }

    std::vector<std::pair<double, double>> pts;
    for (const auto& p : report.points)
        pts.emplace_back(static_cast<double>(p.n), p.mean_risk);
    const RateFit fit = fit_rate(pts);
    report.slope = fit.slope;
    report.intercept = fit.intercept;
    report.max_residual = fit.max_residual;
    write_rate_report(out_path(cfg, "rates.csv"), report);
    std::printf("slope=%s theoretical_exponent=%s threshold=%s\n",
                format_double(report.slope).c_str(),
                format_double(report.theoretical_exponent).c_str(),
                format_double(cfg.sweep.slope_threshold).c_str());
    return report.slope <= cfg.sweep.slope_threshold ? kExitOk : kExitGateFailed;
}

int cmd_sweep_N(const CommandOptions& opts) {
    const ExperimentConfig cfg = load(opts);
    if (cfg.sweep.N_values.empty()) throw config_error("cmd_sweep_N: sweep needs N_values");
    if (cfg.sweep.test_bags < 1) throw config_error("cmd_sweep_N: sweep needs test_bags >= 1");
    ensure_out_dir(cfg);

    std::vector<long long> Ns = cfg.sweep.N_values;
    std::sort(Ns.begin(), Ns.end());
    const LabeledBagSet test = fresh_test_set(cfg.meta, cfg.base, cfg.outer, cfg.sweep.test_bags,
                                              cfg.sweep.test_bag_size, test_seed(cfg.meta.seed));
    const EstimatorConfig est = resolve_estimator(cfg, cfg.meta.n);

    std::ofstream out(out_path(cfg, "sweep_n.csv"));
    if (!out) throw input_error("cannot open output file");
    out << "N,trials,mean_risk,std_risk\n";
    for (long long N : Ns) {
        std::vector<double> risks(static_cast<std::size_t>(cfg.sweep.seeds));
        parallel_trials(opts.jobs, cfg.sweep.seeds, [&](int s) {
            risks[static_cast<std::size_t>(s)] = run_trial(cfg, cfg.meta.n, N, s, est, test);
        });
        double mean, std_out;
        mean_std(risks, mean, std_out);
        out << N << "," << cfg.sweep.seeds << "," << format_double(mean) << ","
            << format_double(std_out) << "\n";
        std::printf("N=%lld mean_risk=%s std=%s\n", N, format_double(mean).c_str(),
                    format_double(std_out).c_str());
    }
    return kExitOk;
}

}  // namespace dreg
