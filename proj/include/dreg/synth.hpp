#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dreg/base_kernels.hpp"
#include "dreg/embedding.hpp"

namespace dreg {

enum class TruthMode { anchor_expansion, parametric };

/// Meta-distribution configuration for the two-stage synthetic generator.
/// Each bag j gets Gaussian parameters (m_j, s_j) drawn uniformly from the
/// ranges, N i.i.d. samples from N(m_j, s_j^2), and a label
/// y_j = clip(f(x_j) + noise, -M, M).
struct MetaConfig {
    long long n = 1;
    long long N = 1;
    double noise_std = 0.0;
    double label_bound = 1.0;  // M
    double mean_min = -1.0, mean_max = 1.0;
    double std_min = 0.5, std_max = 1.5;
    TruthMode truth = TruthMode::anchor_expansion;
    int anchors = 1;                      // anchor_expansion only
    std::vector<double> anchor_weights;   // c_1..c_k; empty -> alternating +-1/k
    std::uint64_t seed = 0;

    void validate() const;
};

struct LabeledBagSet {
    std::vector<Bag> bags;
    Eigen::VectorXd y;       // observed labels, |y_j| <= M
    Eigen::VectorXd true_f;  // noise-free targets
    std::vector<GaussianParams> true_params;

    Eigen::Index n() const { return static_cast<Eigen::Index>(bags.size()); }
};

/// Anchor parameters defining the well-specified ground truth. Derived from
/// cfg.seed only (never from the data seed), so train and test sets drawn
/// with different data seeds share the same regression function.
std::vector<GaussianParams> anchor_params(const MetaConfig& cfg);

/// Generates the two-stage dataset. All randomness flows from the single
/// seed through per-bag split streams, so bag j is identical for every n > j.
/// data_seed defaults to cfg.seed; anchors always come from cfg.seed.
LabeledBagSet sample_meta(const MetaConfig& cfg, const BaseKernelSpec& base,
                          const OuterKernelSpec& outer);
LabeledBagSet sample_meta(const MetaConfig& cfg, const BaseKernelSpec& base,
                          const OuterKernelSpec& outer, std::uint64_t data_seed);

/// Held-out evaluation set: same generator, independent data seed, typically
/// with N_test >> N to suppress second-stage error. m_test = 0 yields an
/// empty set (accepted downstream as "no evaluation").
LabeledBagSet fresh_test_set(const MetaConfig& cfg, const BaseKernelSpec& base,
                             const OuterKernelSpec& outer, long long m_test, long long N_test,
                             std::uint64_t data_seed);

/// Noise-free target for given distribution parameters under the config's
/// truth mode (population geometry; exact for anchor_expansion).
double true_target(const MetaConfig& cfg, const BaseKernelSpec& base, const OuterKernelSpec& outer,
                   const std::vector<GaussianParams>& anchors, const GaussianParams& p);

}  // namespace dreg
