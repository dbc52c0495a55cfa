#include "dreg/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "dreg/rng.hpp"

namespace dreg {

double excess_risk(const FittedModel& model, const LabeledBagSet& test,
                   const BaseKernelSpec& base) {
    if (test.bags.empty()) throw input_error("excess_risk: empty test set");
    const Eigen::VectorXd preds = predict(model, test.bags, base);
    return (preds - test.true_f).squaredNorm() / static_cast<double>(test.bags.size());
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw input_error("fit_rate: need at least 3 points");
    const auto m = static_cast<Eigen::Index>(points.size());
    Eigen::VectorXd lx(m), ly(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& [n, risk] = points[static_cast<std::size_t>(i)];
        if (!(risk > 0.0)) throw input_error("fit_rate: risks must be positive");
        if (!(n > 0.0)) throw input_error("fit_rate: sample sizes must be positive");
        lx[i] = std::log(n);
        ly[i] = std::log(risk);
    }
    const double mx = lx.mean(), my = ly.mean();
    const double sxx = (lx.array() - mx).square().sum();
    if (sxx == 0.0) throw input_error("fit_rate: sample sizes must be distinct");
    const double sxy = ((lx.array() - mx) * (ly.array() - my)).sum();
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.max_residual =
        (ly.array() - fit.intercept - fit.slope * lx.array()).abs().maxCoeff();
    return fit;
}

double effective_dimension(const OuterGram& k, double lambda) {
    if (!(lambda > 0.0)) throw input_error("effective_dimension: lambda must be positive");
    const double n = static_cast<double>(k.n());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k.k / n,
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw conditioning_error("effective_dimension: eigendecomposition failed");
    const Eigen::VectorXd ev = solver.eigenvalues().cwiseMax(0.0);
    return (ev.array() / (ev.array() + lambda)).sum();
}

HolderFit holder_estimate(const std::vector<Bag>& bags, const BaseKernelSpec& base,
                          const OuterKernelSpec& outer, int pairs, std::uint64_t seed) {
    if (bags.size() < 2) throw input_error("holder_estimate: need at least 2 bags");
    if (pairs < 2) throw input_error("holder_estimate: need at least 2 pairs");
    const EmbeddingGram eg = embedding_gram(bags, base);
    const auto n = static_cast<std::uint64_t>(bags.size());

    std::vector<double> gs, hs;
    gs.reserve(static_cast<std::size_t>(pairs));
    hs.reserve(static_cast<std::size_t>(pairs));
    SplitMix64 rng = make_stream(seed, stream_tag::pair_sampling, 0);
    for (int p = 0; p < pairs; ++p) {
        const auto i = static_cast<Eigen::Index>(rng.uniform_index(n));
        const auto j = static_cast<Eigen::Index>(rng.uniform_index(n));
        if (i == j) continue;
        const double g_sq =
            std::max(eg.inner(i, i) + eg.inner(j, j) - 2.0 * eg.inner(i, j), 0.0);
        if (g_sq <= 0.0) continue;  // coincident embeddings carry no slope information
        const double kii = outer_eval_from_geometry(outer, eg.inner(i, i), eg.inner(i, i),
                                                    eg.inner(i, i));
        const double kjj = outer_eval_from_geometry(outer, eg.inner(j, j), eg.inner(j, j),
                                                    eg.inner(j, j));
        const double kij = outer_eval_from_geometry(outer, eg.inner(i, j), eg.inner(i, i),
                                                    eg.inner(j, j));
        const double h_sq = std::max(kii + kjj - 2.0 * kij, 0.0);
        if (h_sq <= 0.0) continue;
        gs.push_back(std::sqrt(g_sq));
        hs.push_back(std::sqrt(h_sq));
    }
    if (gs.size() < 2)
        throw input_error("holder_estimate: all sampled pairs were coincident");

    std::vector<std::pair<double, double>> pts;
    pts.reserve(gs.size());
    for (std::size_t i = 0; i < gs.size(); ++i) pts.emplace_back(gs[i], hs[i]);
    RateFit fit;
    if (pts.size() >= 3) {
        fit = fit_rate(pts);
    } else {
        fit.slope = std::log(hs[1] / hs[0]) / std::log(gs[1] / gs[0]);
    }
    HolderFit out;
    out.alpha_fit = fit.slope;
    out.L_fit = 0.0;
    for (std::size_t i = 0; i < gs.size(); ++i)
        out.L_fit = std::max(out.L_fit, hs[i] / std::pow(gs[i], out.alpha_fit));
    return out;
}

std::pair<double, double> two_stage_gap(const LabeledBagSet& train, const LabeledBagSet& test,
                                        const BaseKernelSpec& base, const OuterKernelSpec& outer,
                                        const FitFn& fit) {
    if (train.bags.empty() || test.bags.empty())
        throw input_error("two_stage_gap: empty data set");

    // Empirical path: Gram and predictions from the observed bags.
    const OuterGram k_emp = outer_gram(embedding_gram(train.bags, base), outer);
    FittedModel m_emp = fit(k_emp, train.y);
    attach_training_bags(m_emp, std::make_shared<const std::vector<Bag>>(train.bags), base);
    const double risk_emp = excess_risk(m_emp, test, base);

    // Population path: Gram and predictions from analytic embeddings.
    const OuterGram k_pop =
        outer_gram(population_embedding_gram(train.true_params, base.sigma), outer);
    const FittedModel m_pop = fit(k_pop, train.y);
    const Eigen::VectorXd preds =
        predict_population(m_pop, train.true_params, test.true_params, base);
    const double risk_pop =
        (preds - test.true_f).squaredNorm() / static_cast<double>(test.bags.size());

    return {risk_emp, risk_pop};
}

}  // namespace dreg
