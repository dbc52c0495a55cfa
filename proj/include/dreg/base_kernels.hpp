#pragma once

#include <Eigen/Dense>
#include <string>

#include "dreg/errors.hpp"

namespace dreg {

enum class BaseFamily { gaussian, exponential };
enum class OuterFamily { gaussian_on_embedding, linear_embedding };

std::string to_string(BaseFamily f);
std::string to_string(OuterFamily f);
BaseFamily base_family_from_string(const std::string& s);
OuterFamily outer_family_from_string(const std::string& s);

/// Inner (base) kernel G on the sample space.
/// gaussian:    G(s,t) = exp(-|s-t|^2 / (2 sigma^2))
/// exponential: G(s,t) = exp(-|s-t| / sigma)
/// Both satisfy G(s,s) = 1, so gamma^2 = sup_s G(s,s) = 1.
struct BaseKernelSpec {
    BaseFamily family = BaseFamily::gaussian;
    double sigma = 1.0;
    int dim = 1;

    static BaseKernelSpec make(BaseFamily family, double sigma, int dim);
    double gamma_sq() const { return 1.0; }
};

/// Outer kernel K on mean embeddings. Only radial functions of the embedding
/// distance (plus the linear kernel) are supported, so every evaluation
/// factors through H_G inner products. The Hoelder pair (alpha, L) and the
/// bound kappa^2 are derived per family, never user-supplied.
struct OuterKernelSpec {
    OuterFamily family = OuterFamily::gaussian_on_embedding;
    double tau = 1.0;  // gaussian_on_embedding only
    double kappa_sq = 1.0;
    double holder_alpha = 1.0;
    double holder_L = 1.0;

    static OuterKernelSpec gaussian_on_embedding(double tau);
    static OuterKernelSpec linear_embedding(double gamma_sq = 1.0);
};

/// G(s, t). Throws input_error on dimension mismatch with the spec.
double base_eval(const BaseKernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& s,
                 const Eigen::Ref<const Eigen::VectorXd>& t);

/// K evaluated from embedding geometry: the three H_G inner products
/// <mu_i, mu_j>, <mu_i, mu_i>, <mu_j, mu_j>. The block must be a valid 2x2
/// Gram block up to tolerance 1e-9, otherwise geometry_error.
double outer_eval_from_geometry(const OuterKernelSpec& spec, double inner_ij, double inner_ii,
                                double inner_jj);

/// Shared tolerance for 2x2 Gram block validity checks.
inline constexpr double kGramBlockTol = 1e-9;

}  // namespace dreg
