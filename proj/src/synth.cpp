#include "dreg/synth.hpp"

#include <algorithm>
#include <cmath>

#include "dreg/rng.hpp"

namespace dreg {

void MetaConfig::validate() const {
    if (n < 1 || N < 1) throw input_error("meta config: n and N must be >= 1");
    if (noise_std < 0.0) throw input_error("meta config: noise_std must be >= 0");
    if (!(label_bound > 0.0)) throw input_error("meta config: label bound M must be positive");
    if (mean_min > mean_max || std_min > std_max)
        throw input_error("meta config: empty parameter range");
    if (!(std_min > 0.0)) throw input_error("meta config: std range must be positive");
    if (truth == TruthMode::anchor_expansion) {
        if (anchors < 1) throw input_error("meta config: anchor count must be >= 1");
        if (!anchor_weights.empty() &&
            anchor_weights.size() != static_cast<std::size_t>(anchors))
            throw input_error("meta config: anchor weight count does not match anchor count");
    }
}

namespace {

GaussianParams draw_params(const MetaConfig& cfg, SplitMix64& g) {
    GaussianParams p;
    p.mean = g.uniform(cfg.mean_min, cfg.mean_max);
    p.std = g.uniform(cfg.std_min, cfg.std_max);
    return p;
}

std::vector<double> effective_weights(const MetaConfig& cfg) {
    if (!cfg.anchor_weights.empty()) return cfg.anchor_weights;
    std::vector<double> w(static_cast<std::size_t>(cfg.anchors));
    for (int i = 0; i < cfg.anchors; ++i)
        w[static_cast<std::size_t>(i)] = (i % 2 == 0 ? 1.0 : -1.0) / cfg.anchors;
    return w;
}

}  // namespace

std::vector<GaussianParams> anchor_params(const MetaConfig& cfg) {
    std::vector<GaussianParams> anchors(static_cast<std::size_t>(cfg.anchors));
    for (int i = 0; i < cfg.anchors; ++i) {
        SplitMix64 g = make_stream(cfg.seed, stream_tag::anchors, static_cast<std::uint64_t>(i));
        anchors[static_cast<std::size_t>(i)] = draw_params(cfg, g);
    }
    return anchors;
}

double true_target(const MetaConfig& cfg, const BaseKernelSpec& base, const OuterKernelSpec& outer,
                   const std::vector<GaussianParams>& anchors, const GaussianParams& p) {
    if (cfg.truth == TruthMode::parametric)
        return std::sin(M_PI * p.mean) * std::exp(-p.std);
    const std::vector<double> w = effective_weights(cfg);
    const double self = analytic_gauss_inner(p, p, base.sigma);
    double f = 0.0;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const double cross = analytic_gauss_inner(p, anchors[i], base.sigma);
        const double anchor_self = analytic_gauss_inner(anchors[i], anchors[i], base.sigma);
        f += w[i] * outer_eval_from_geometry(outer, cross, self, anchor_self);
    }
    return f;
}

LabeledBagSet sample_meta(const MetaConfig& cfg, const BaseKernelSpec& base,
                          const OuterKernelSpec& outer) {
    return sample_meta(cfg, base, outer, cfg.seed);
}

LabeledBagSet sample_meta(const MetaConfig& cfg, const BaseKernelSpec& base,
                          const OuterKernelSpec& outer, std::uint64_t data_seed) {
    cfg.validate();
    if (cfg.truth == TruthMode::anchor_expansion && base.family != BaseFamily::gaussian)
        throw input_error("anchor_expansion ground truth requires the gaussian base kernel");
    if (base.dim != 1) throw input_error("the synthetic generator is 1-D only");

    const std::vector<GaussianParams> anchors =
        cfg.truth == TruthMode::anchor_expansion ? anchor_params(cfg)
                                                 : std::vector<GaussianParams>{};
    const double m_bound = cfg.label_bound;

    LabeledBagSet set;
    set.bags.resize(static_cast<std::size_t>(cfg.n));
    set.y.resize(cfg.n);
    set.true_f.resize(cfg.n);
    set.true_params.resize(static_cast<std::size_t>(cfg.n));

    for (long long j = 0; j < cfg.n; ++j) {
        const auto ju = static_cast<std::uint64_t>(j);
        SplitMix64 pg = make_stream(data_seed, stream_tag::bag_params, ju);
        const GaussianParams p = draw_params(cfg, pg);
        set.true_params[static_cast<std::size_t>(j)] = p;

        Bag bag;
        bag.id = static_cast<int>(j);
        bag.samples.resize(cfg.N, 1);
        SplitMix64 sg = make_stream(data_seed, stream_tag::bag_samples, ju);
        for (long long i = 0; i < cfg.N; ++i) bag.samples(i, 0) = sg.normal(p.mean, p.std);
        set.bags[static_cast<std::size_t>(j)] = std::move(bag);

        const double f = true_target(cfg, base, outer, anchors, p);
        set.true_f[j] = f;
        SplitMix64 ng = make_stream(data_seed, stream_tag::label_noise, ju);
        const double noisy = f + cfg.noise_std * ng.normal();
        set.y[j] = std::clamp(noisy, -m_bound, m_bound);
    }
    return set;
}

LabeledBagSet fresh_test_set(const MetaConfig& cfg, const BaseKernelSpec& base,
                             const OuterKernelSpec& outer, long long m_test, long long N_test,
                             std::uint64_t data_seed) {
    if (m_test == 0) return LabeledBagSet{};
    MetaConfig test_cfg = cfg;
    test_cfg.n = m_test;
    test_cfg.N = N_test;
    return sample_meta(test_cfg, base, outer, data_seed);
}

}  // namespace dreg
