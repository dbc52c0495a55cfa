#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "dreg/estimators.hpp"
#include "dreg/synth.hpp"

namespace dreg {

struct RatePoint {
    long long n = 0;
    double mean_risk = 0.0;
    double std_risk = 0.0;
    int trials = 0;
    long long N_used = 0;
    long long N_required = 0;
};

struct RateReport {
    std::vector<RatePoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
    double theoretical_exponent = 0.0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};

struct HolderFit {
    double alpha_fit = 0.0;
    double L_fit = 0.0;
};

/// Monte Carlo estimate of ||S_K h - f_rho||^2_{L^2}: mean squared gap
/// between predictions and the noise-free targets of the test set.
double excess_risk(const FittedModel& model, const LabeledBagSet& test,
                   const BaseKernelSpec& base);

/// OLS of log(risk) on log(n). Risks must be positive; >= 3 points.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

/// Empirical effective dimension: eigenvalues of (1/n)K, tiny negatives
/// clamped to 0, returns sum sigma_i / (sigma_i + lambda).
double effective_dimension(const OuterGram& k, double lambda);

/// Samples random bag pairs and fits log ||K_mu1 - K_mu2||_{H_K} against
/// log ||mu1 - mu2||_{H_G}; L_fit is the max ratio h / g^alpha_fit.
HolderFit holder_estimate(const std::vector<Bag>& bags, const BaseKernelSpec& base,
                          const OuterKernelSpec& outer, int pairs, std::uint64_t seed);

using FitFn = std::function<FittedModel(const OuterGram&, const Eigen::VectorXd&)>;

/// Fits the same estimator on the empirical outer Gram and on the population
/// outer Gram (analytic inner products of the true Gaussian parameters) and
/// evaluates both on the test set. Returns (risk_empirical, risk_population);
/// the gap isolates the second-stage measurement-error effect.
std::pair<double, double> two_stage_gap(const LabeledBagSet& train, const LabeledBagSet& test,
                                        const BaseKernelSpec& base, const OuterKernelSpec& outer,
                                        const FitFn& fit);

}  // namespace dreg
