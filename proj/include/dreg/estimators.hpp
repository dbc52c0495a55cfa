#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dreg/base_kernels.hpp"
#include "dreg/embedding.hpp"

namespace dreg {

enum class Sampling { with_replacement, full_batch_deterministic };
enum class TailMode { paper_tail, full_average, last_iterate };

std::string to_string(Sampling s);
std::string to_string(TailMode t);
Sampling sampling_from_string(const std::string& s);
TailMode tail_from_string(const std::string& s);

struct SgdConfig {
    double eta = 0.1;
    long long b = 1;
    long long T = 2;
    std::uint64_t seed = 0;
    Sampling sampling = Sampling::with_replacement;
    TailMode tail = TailMode::paper_tail;
};

/// A fitted function h = sum_j alpha_j K_{mu_hat_j} over the training
/// embeddings, plus the geometry needed to predict on fresh bags.
struct FittedModel {
    Eigen::VectorXd alpha;
    std::string estimator;  // "sgd" | "gd" | "krr"
    std::string config_summary;
    OuterKernelSpec outer;
    long long passes = 0;

    // Training geometry; attach_training_bags fills these in.
    std::shared_ptr<const std::vector<Bag>> train_bags;
    Eigen::VectorXd train_self_inner;

    /// ||h||^2_{H_K} = alpha^T K alpha.
    double norm_sq(const OuterGram& k) const { return alpha.dot(k.k * alpha); }
};

/// Per-iteration coefficient snapshots, alpha_0 .. alpha_T (T+1 entries,
/// starting at the zero initializer).
using TrajectoryRecord = std::vector<Eigen::VectorXd>;

/// Tail-averaged mini-batch SGD in coefficient space, alpha_0 = 0. Each
/// iteration draws b indices uniformly with replacement (counter-based
/// stream keyed by (seed, t)), or the full index set when sampling is
/// full_batch_deterministic (requires b = n, reduces exactly to GD).
/// Throws divergence_error when ||alpha||_inf exceeds 1e12.
FittedModel sgd_fit(const OuterGram& k, const Eigen::VectorXd& y, const SgdConfig& cfg,
                    TrajectoryRecord* trajectory = nullptr);

/// Tail-averaged batch gradient descent: alpha_{t+1} = alpha_t - (eta/n)(K alpha_t - y).
FittedModel gd_fit(const OuterGram& k, const Eigen::VectorXd& y, double eta, long long T,
                   TailMode tail = TailMode::paper_tail, TrajectoryRecord* trajectory = nullptr);

/// Kernel ridge regression: (K + n lambda I) alpha = y via Cholesky.
FittedModel krr_fit(const OuterGram& k, const Eigen::VectorXd& y, double lambda);

/// Binds the training bags and their self inner products to a fitted model
/// so that predict() can build cross outer-Gram rows.
void attach_training_bags(FittedModel& model, std::shared_ptr<const std::vector<Bag>> bags,
                          const BaseKernelSpec& base);

/// Predictions on fresh bags via the cross outer Gram.
Eigen::VectorXd predict(const FittedModel& model, const std::vector<Bag>& test_bags,
                        const BaseKernelSpec& base);

/// Predictions using population geometry (analytic embeddings) for both the
/// training side and the test side; train_params must match the training set
/// the model was fitted on.
Eigen::VectorXd predict_population(const FittedModel& model,
                                   const std::vector<GaussianParams>& train_params,
                                   const std::vector<GaussianParams>& test_params,
                                   const BaseKernelSpec& base);

inline constexpr double kDivergenceGuard = 1e12;

}  // namespace dreg
