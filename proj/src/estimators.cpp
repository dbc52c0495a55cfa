#include "dreg/estimators.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "dreg/rng.hpp"

namespace dreg {

std::string to_string(Sampling s) {
    return s == Sampling::with_replacement ? "with_replacement" : "full_batch_deterministic";
}

std::string to_string(TailMode t) {
    switch (t) {
        case TailMode::paper_tail: return "paper_tail";
        case TailMode::full_average: return "full_average";
        default: return "last_iterate";
    }
}

Sampling sampling_from_string(const std::string& s) {
    if (s == "with_replacement") return Sampling::with_replacement;
    if (s == "full_batch_deterministic") return Sampling::full_batch_deterministic;
    throw input_error("unknown sampling mode: " + s);
}

TailMode tail_from_string(const std::string& s) {
    if (s == "paper_tail") return TailMode::paper_tail;
    if (s == "full_average") return TailMode::full_average;
    if (s == "last_iterate") return TailMode::last_iterate;
    throw input_error("unknown tail mode: " + s);
}

namespace {

void check_fit_inputs(const OuterGram& k, const Eigen::VectorXd& y) {
    if (k.k.rows() != k.k.cols()) throw input_error("fit: Gram matrix must be square");
    if (k.k.rows() != y.size()) throw input_error("fit: label length does not match Gram size");
    if (y.size() < 1) throw input_error("fit: empty training set");
}

void guard_divergence(const Eigen::VectorXd& alpha, double eta) {
    if (!alpha.allFinite() || alpha.lpNorm<Eigen::Infinity>() > kDivergenceGuard) {
        std::ostringstream msg;
        msg << "iterates diverged at step size eta=" << eta
            << "; stability requires eta < 1/(4 kappa^2)";
        throw divergence_error(msg.str());
    }
}

// Averages alpha_t over the requested window. paper_tail uses the exact
// count T - floor(T/2) as divisor; for even T this equals the 2/T factor.
class TailAccumulator {
  public:
    TailAccumulator(long long T, TailMode mode, Eigen::Index n)
        : mode_(mode), T_(T), start_(mode == TailMode::paper_tail ? T / 2 + 1 : 1) {
        sum_ = Eigen::VectorXd::Zero(n);
    }

    void observe(long long t, const Eigen::VectorXd& alpha) {
        if (mode_ == TailMode::last_iterate) {
            if (t == T_) {
                sum_ = alpha;
                count_ = 1;
            }
            return;
        }
        if (t >= start_) {
            sum_ += alpha;
            ++count_;
        }
    }

    Eigen::VectorXd average() const { return sum_ / static_cast<double>(count_); }

  private:
    TailMode mode_;
    long long T_;
    long long start_;
    Eigen::VectorXd sum_;
    long long count_ = 0;
};

}  // namespace

FittedModel sgd_fit(const OuterGram& k, const Eigen::VectorXd& y, const SgdConfig& cfg,
                    TrajectoryRecord* trajectory) {
    check_fit_inputs(k, y);
    const Eigen::Index n = k.n();
    if (cfg.T < 2) throw input_error("sgd_fit: T must be >= 2");
    if (cfg.b < 1 || cfg.b > n) throw input_error("sgd_fit: batch size must be in [1, n]");
    if (!(cfg.eta > 0.0)) throw input_error("sgd_fit: step size must be positive");
    if (cfg.sampling == Sampling::full_batch_deterministic && cfg.b != n)
        throw input_error("sgd_fit: full_batch_deterministic requires b = n");

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    TailAccumulator tail(cfg.T, cfg.tail, n);
    if (trajectory) {
        trajectory->clear();
        trajectory->push_back(alpha);
    }
    Eigen::VectorXd delta(n);
    for (long long t = 1; t <= cfg.T; ++t) {
        if (cfg.sampling == Sampling::full_batch_deterministic) {
            alpha -= (cfg.eta / static_cast<double>(n)) * (k.k * alpha - y);
        } else {
            delta.setZero();
            SplitMix64 g = make_stream(cfg.seed, stream_tag::sgd_batch,
                                       static_cast<std::uint64_t>(t));
            for (long long i = 0; i < cfg.b; ++i) {
                const auto j = static_cast<Eigen::Index>(
                    g.uniform_index(static_cast<std::uint64_t>(n)));
                delta[j] += k.k.row(j).dot(alpha) - y[j];
            }
            alpha -= (cfg.eta / static_cast<double>(cfg.b)) * delta;
        }
        guard_divergence(alpha, cfg.eta);
        tail.observe(t, alpha);
        if (trajectory) trajectory->push_back(alpha);
    }

    FittedModel model;
    model.alpha = tail.average();
    model.estimator = "sgd";
    std::ostringstream cs;
    cs << "eta=" << cfg.eta << " b=" << cfg.b << " T=" << cfg.T << " seed=" << cfg.seed
       << " sampling=" << to_string(cfg.sampling) << " tail=" << to_string(cfg.tail);
    model.config_summary = cs.str();
    model.outer = k.spec;
    model.passes = cfg.b * cfg.T / n;
    return model;
}

FittedModel gd_fit(const OuterGram& k, const Eigen::VectorXd& y, double eta, long long T,
                   TailMode tail_mode, TrajectoryRecord* trajectory) {
    check_fit_inputs(k, y);
    const Eigen::Index n = k.n();
    if (T < 2) throw input_error("gd_fit: T must be >= 2");
    if (!(eta > 0.0)) throw input_error("gd_fit: step size must be positive");

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    TailAccumulator tail(T, tail_mode, n);
    if (trajectory) {
        trajectory->clear();
        trajectory->push_back(alpha);
    }
    for (long long t = 1; t <= T; ++t) {
        alpha -= (eta / static_cast<double>(n)) * (k.k * alpha - y);
        guard_divergence(alpha, eta);
        tail.observe(t, alpha);
        if (trajectory) trajectory->push_back(alpha);
    }

    FittedModel model;
    model.alpha = tail.average();
    model.estimator = "gd";
    std::ostringstream cs;
    cs << "eta=" << eta << " T=" << T << " tail=" << to_string(tail_mode);
    model.config_summary = cs.str();
    model.outer = k.spec;
    model.passes = T;
    return model;
}

FittedModel krr_fit(const OuterGram& k, const Eigen::VectorXd& y, double lambda) {
    check_fit_inputs(k, y);
    if (!(lambda > 0.0)) throw input_error("krr_fit: lambda must be positive");
    const Eigen::Index n = k.n();
    Eigen::MatrixXd system = k.k;
    system.diagonal().array() += static_cast<double>(n) * lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success)
        throw conditioning_error("krr_fit: K + n*lambda*I is numerically singular");

    FittedModel model;
    model.alpha = llt.solve(y);
    model.estimator = "krr";
    std::ostringstream cs;
    cs << "lambda=" << lambda;
    model.config_summary = cs.str();
    model.outer = k.spec;
    model.passes = 1;
    return model;
}

void attach_training_bags(FittedModel& model, std::shared_ptr<const std::vector<Bag>> bags,
                          const BaseKernelSpec& base) {
    if (!bags || static_cast<Eigen::Index>(bags->size()) != model.alpha.size())
        throw input_error("attach_training_bags: bag count does not match coefficient length");
    model.train_self_inner = self_inner(*bags, base);
    model.train_bags = std::move(bags);
}

namespace {

Eigen::MatrixXd cross_outer_from_inner(const OuterKernelSpec& spec, const Eigen::MatrixXd& cross,
                                       const Eigen::VectorXd& self_a,
                                       const Eigen::VectorXd& self_b) {
    Eigen::MatrixXd k(cross.rows(), cross.cols());
    for (Eigen::Index i = 0; i < cross.rows(); ++i)
        for (Eigen::Index j = 0; j < cross.cols(); ++j)
            k(i, j) = outer_eval_from_geometry(spec, cross(i, j), self_a[i], self_b[j]);
    return k;
}

}  // namespace

Eigen::VectorXd predict(const FittedModel& model, const std::vector<Bag>& test_bags,
                        const BaseKernelSpec& base) {
    if (!model.train_bags) throw input_error("predict: model has no training bags attached");
    if (test_bags.empty()) return Eigen::VectorXd();
    const Eigen::MatrixXd cross = cross_inner_matrix(test_bags, *model.train_bags, base);
    const Eigen::VectorXd test_self = self_inner(test_bags, base);
    return cross_outer_from_inner(model.outer, cross, test_self, model.train_self_inner) *
           model.alpha;
}

Eigen::VectorXd predict_population(const FittedModel& model,
                                   const std::vector<GaussianParams>& train_params,
                                   const std::vector<GaussianParams>& test_params,
                                   const BaseKernelSpec& base) {
    if (static_cast<Eigen::Index>(train_params.size()) != model.alpha.size())
        throw input_error("predict_population: parameter count does not match coefficients");
    const Eigen::MatrixXd cross = population_cross_inner(test_params, train_params, base.sigma);
    Eigen::VectorXd self_a(static_cast<Eigen::Index>(test_params.size()));
    for (std::size_t i = 0; i < test_params.size(); ++i)
        self_a[static_cast<Eigen::Index>(i)] =
            analytic_gauss_inner(test_params[i], test_params[i], base.sigma);
    Eigen::VectorXd self_b(static_cast<Eigen::Index>(train_params.size()));
    for (std::size_t j = 0; j < train_params.size(); ++j)
        self_b[static_cast<Eigen::Index>(j)] =
            analytic_gauss_inner(train_params[j], train_params[j], base.sigma);
    return cross_outer_from_inner(model.outer, cross, self_a, self_b) * model.alpha;
}

}  // namespace dreg
