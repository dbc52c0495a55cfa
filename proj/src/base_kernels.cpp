#include "dreg/base_kernels.hpp"

#include <cmath>

namespace dreg {

std::string to_string(BaseFamily f) {
    return f == BaseFamily::gaussian ? "gaussian" : "exponential";
}

std::string to_string(OuterFamily f) {
    return f == OuterFamily::gaussian_on_embedding ? "gaussian_on_embedding" : "linear_embedding";
}

BaseFamily base_family_from_string(const std::string& s) {
    if (s == "gaussian") return BaseFamily::gaussian;
    if (s == "exponential") return BaseFamily::exponential;
    throw input_error("unknown base kernel family: " + s);
}

OuterFamily outer_family_from_string(const std::string& s) {
    if (s == "gaussian_on_embedding") return OuterFamily::gaussian_on_embedding;
    if (s == "linear_embedding") return OuterFamily::linear_embedding;
    throw input_error("unknown outer kernel family: " + s);
}

BaseKernelSpec BaseKernelSpec::make(BaseFamily family, double sigma, int dim) {
    if (!(sigma > 0.0)) throw input_error("base kernel bandwidth must be positive");
    if (dim < 1) throw input_error("base kernel dimension must be >= 1");
    return BaseKernelSpec{family, sigma, dim};
}

OuterKernelSpec OuterKernelSpec::gaussian_on_embedding(double tau) {
    if (!(tau > 0.0)) throw input_error("outer kernel bandwidth must be positive");
    // K(mu,mu) = 1 and the map mu -> K_mu is (1, 1/tau)-Hoelder:
    // |K_mu1 - K_mu2|^2 = 2(1 - exp(-d^2/2tau^2)) <= d^2/tau^2.
    return OuterKernelSpec{OuterFamily::gaussian_on_embedding, tau, 1.0, 1.0, 1.0 / tau};
}

OuterKernelSpec OuterKernelSpec::linear_embedding(double gamma_sq) {
    if (!(gamma_sq > 0.0)) throw input_error("gamma^2 must be positive");
    // <mu, mu> <= gamma^2 and |K_mu1 - K_mu2| = |mu1 - mu2| exactly.
    return OuterKernelSpec{OuterFamily::linear_embedding, 0.0, gamma_sq, 1.0, 1.0};
}

double base_eval(const BaseKernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& s,
                 const Eigen::Ref<const Eigen::VectorXd>& t) {
    if (s.size() != spec.dim || t.size() != spec.dim)
        throw input_error("base_eval: point dimension does not match kernel spec");
    const double sq = (s - t).squaredNorm();
    if (spec.family == BaseFamily::gaussian)
        return std::exp(-sq / (2.0 * spec.sigma * spec.sigma));
    return std::exp(-std::sqrt(sq) / spec.sigma);
}

double outer_eval_from_geometry(const OuterKernelSpec& spec, double inner_ij, double inner_ii,
                                double inner_jj) {
    if (inner_ii < -kGramBlockTol || inner_jj < -kGramBlockTol ||
        inner_ij * inner_ij > inner_ii * inner_jj + kGramBlockTol)
        throw geometry_error("outer_eval_from_geometry: invalid 2x2 Gram block");
    if (spec.family == OuterFamily::linear_embedding) return inner_ij;
    const double sq_dist = inner_ii + inner_jj - 2.0 * inner_ij;
    return std::exp(-std::max(sq_dist, 0.0) / (2.0 * spec.tau * spec.tau));
}

}  // namespace dreg
