#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dreg/base_kernels.hpp"

namespace dreg {

/// One second-stage sample: N observations (rows) of dimension d from a
/// single unobserved distribution. The empirical mean embedding
/// (1/N) sum_i G(x_i, .) is represented implicitly by the bag itself.
struct Bag {
    Eigen::MatrixXd samples;  // N x d
    int id = 0;

    Eigen::Index size() const { return samples.rows(); }
    Eigen::Index dim() const { return samples.cols(); }
};

/// n x n matrix of H_G inner products between empirical mean embeddings.
struct EmbeddingGram {
    Eigen::MatrixXd inner;
    Eigen::Index n() const { return inner.rows(); }
};

/// n x n outer kernel matrix K(mu_i, mu_j) plus the spec that produced it.
struct OuterGram {
    Eigen::MatrixXd k;
    OuterKernelSpec spec;
    Eigen::Index n() const { return k.rows(); }
};

/// 1-D Gaussian distribution parameters (used by the analytic oracles and
/// the synthetic generator).
struct GaussianParams {
    double mean = 0.0;
    double std = 1.0;
};

/// <mu_a, mu_b>_{H_G} = (1/(Na Nb)) sum_{i,j} G(a_i, b_j). Exact double sum,
/// vectorized; used as the reference path everywhere.
double embed_inner(const Bag& a, const Bag& b, const BaseKernelSpec& spec);

/// Squared MMD between the empirical measures, clamped to [0, inf). Emits a
/// warning on stderr if round-off drives it below -1e-9.
double embed_sq_dist(const Bag& a, const Bag& b, const BaseKernelSpec& spec);

/// Full n x n embedding Gram. Upper triangle computed, mirrored. For 1-D
/// gaussian base kernels with large workloads this switches to a
/// machine-precision Chebyshev summation (see cross_inner_matrix).
EmbeddingGram embedding_gram(const std::vector<Bag>& bags, const BaseKernelSpec& spec);

/// m x n matrix of <mu_a_i, mu_b_j> between two bag lists.
Eigen::MatrixXd cross_inner_matrix(const std::vector<Bag>& a, const std::vector<Bag>& b,
                                   const BaseKernelSpec& spec);

/// Self inner products <mu_i, mu_i> for each bag.
Eigen::VectorXd self_inner(const std::vector<Bag>& bags, const BaseKernelSpec& spec);

/// Outer kernel matrix from embedding geometry.
OuterGram outer_gram(const EmbeddingGram& eg, const OuterKernelSpec& spec);

/// Population-level <mu_P, mu_Q>_{H_G} for 1-D Gaussians under the gaussian
/// base kernel with bandwidth sigma:
///   sigma/sqrt(sigma^2+s1^2+s2^2) * exp(-(m1-m2)^2 / (2(sigma^2+s1^2+s2^2)))
double analytic_gauss_inner(const GaussianParams& p, const GaussianParams& q, double sigma);

/// <mu_P, G(x, .)>_{H_G} = E_P[G(x, X)] for a 1-D Gaussian P, gaussian base.
double analytic_gauss_cross(double x, const GaussianParams& p, double sigma);

/// <mu_hat_bag, mu_P>_{H_G}: mean of analytic_gauss_cross over the bag.
double bag_population_inner(const Bag& bag, const GaussianParams& p, double sigma);

/// Embedding Gram of population embeddings given their parameters.
EmbeddingGram population_embedding_gram(const std::vector<GaussianParams>& params, double sigma);

/// Cross inner matrix between two lists of population embeddings.
Eigen::MatrixXd population_cross_inner(const std::vector<GaussianParams>& a,
                                       const std::vector<GaussianParams>& b, double sigma);

/// Relative PSD tolerance shared by Gram validity checks and eigenvalue
/// clamping: min eigenvalue >= -1e-8 * trace.
inline constexpr double kPsdRelTol = 1e-8;

namespace detail {
/// Number of Chebyshev nodes the fast 1-D gaussian path would use for a
/// sample range of the given width; exposed for accuracy tests.
int chebyshev_node_count(double width, double sigma);

/// Force the fast path on/off for tests. 0 = auto (workload heuristic),
/// 1 = always, -1 = never.
void set_fast_path_mode(int mode);
}  // namespace detail

}  // namespace dreg
