#include <doctest.h>

#include <cmath>

#include "dreg/estimators.hpp"
#include "dreg/synth.hpp"

using namespace dreg;

namespace {

MetaConfig default_meta() {
    MetaConfig cfg;
    cfg.n = 8;
    cfg.N = 16;
    cfg.noise_std = 0.05;
    cfg.label_bound = 1.0;
    cfg.mean_min = -1.0;
    cfg.mean_max = 1.0;
    cfg.std_min = 0.5;
    cfg.std_max = 1.5;
    cfg.truth = TruthMode::anchor_expansion;
    cfg.anchors = 3;
    cfg.anchor_weights = {0.6, -0.3, 0.4};
    cfg.seed = 99;
    return cfg;
}

const BaseKernelSpec kBase = BaseKernelSpec::make(BaseFamily::gaussian, 1.0, 1);
const OuterKernelSpec kOuter = OuterKernelSpec::gaussian_on_embedding(1.0);

bool identical(const LabeledBagSet& a, const LabeledBagSet& b) {
    if (a.n() != b.n() || a.y != b.y || a.true_f != b.true_f) return false;
    for (Eigen::Index j = 0; j < a.n(); ++j)
        if (a.bags[static_cast<std::size_t>(j)].samples !=
            b.bags[static_cast<std::size_t>(j)].samples)
            return false;
    return true;
}

}  // namespace

TEST_CASE("fixed seed gives a bit-identical dataset") {
    const MetaConfig cfg = default_meta();
    CHECK(identical(sample_meta(cfg, kBase, kOuter), sample_meta(cfg, kBase, kOuter)));
}

TEST_CASE("bag j is unchanged when n grows") {
    MetaConfig small = default_meta(), big = default_meta();
    big.n = 20;
    const LabeledBagSet a = sample_meta(small, kBase, kOuter);
    const LabeledBagSet b = sample_meta(big, kBase, kOuter);
    for (Eigen::Index j = 0; j < a.n(); ++j) {
        CHECK(a.bags[static_cast<std::size_t>(j)].samples ==
              b.bags[static_cast<std::size_t>(j)].samples);
        CHECK(a.y[j] == b.y[j]);
    }
}

TEST_CASE("labels always land in [-M, M]") {
    MetaConfig cfg = default_meta();
    cfg.n = 200;
    cfg.noise_std = 2.0;  // clipping fires often here
    const LabeledBagSet set = sample_meta(cfg, kBase, kOuter);
    CHECK(set.y.cwiseAbs().maxCoeff() <= cfg.label_bound);
}

TEST_CASE("self-anchor degenerate case gives f = kappa^2 = 1") {
    // With the anchor equal to the bag's own parameters the gaussian outer
    // kernel evaluates at zero embedding distance.
    const MetaConfig cfg = default_meta();
    const GaussianParams p{0.3, 1.1};
    CHECK(true_target(cfg, kBase, kOuter, {p}, p) ==
          doctest::Approx(cfg.anchor_weights[0]));
}

TEST_CASE("parametric truth mode") {
    MetaConfig cfg = default_meta();
    cfg.truth = TruthMode::parametric;
    const GaussianParams p{0.5, 1.0};
    CHECK(true_target(cfg, kBase, kOuter, {}, p) ==
          doctest::Approx(std::sin(M_PI * 0.5) * std::exp(-1.0)));
}

TEST_CASE("fresh_test_set: empty, leakage, and independence") {
    const MetaConfig cfg = default_meta();
    CHECK(fresh_test_set(cfg, kBase, kOuter, 0, 16, 1).bags.empty());

    // Same data seed as training reproduces the same parameters.
    const LabeledBagSet train = sample_meta(cfg, kBase, kOuter);
    const LabeledBagSet leak = fresh_test_set(cfg, kBase, kOuter, cfg.n, cfg.N, cfg.seed);
    for (Eigen::Index j = 0; j < train.n(); ++j) {
        CHECK(train.true_params[static_cast<std::size_t>(j)].mean ==
              leak.true_params[static_cast<std::size_t>(j)].mean);
        CHECK(train.true_params[static_cast<std::size_t>(j)].std ==
              leak.true_params[static_cast<std::size_t>(j)].std);
    }

    // Different data seed gives fresh parameters but the same ground truth
    // function (anchors keyed to cfg.seed).
    const LabeledBagSet test = fresh_test_set(cfg, kBase, kOuter, 4, 16, cfg.seed + 1);
    const auto anchors = anchor_params(cfg);
    for (Eigen::Index j = 0; j < test.n(); ++j)
        CHECK(test.true_f[j] == doctest::Approx(true_target(
                                    cfg, kBase, kOuter, anchors,
                                    test.true_params[static_cast<std::size_t>(j)])));
}

TEST_CASE("large test bags track population embeddings") {
    MetaConfig cfg = default_meta();
    const LabeledBagSet test = fresh_test_set(cfg, kBase, kOuter, 40, 4096, cfg.seed + 7);
    int close = 0;
    for (Eigen::Index j = 0; j < test.n(); ++j) {
        const auto& bag = test.bags[static_cast<std::size_t>(j)];
        const auto& p = test.true_params[static_cast<std::size_t>(j)];
        const double d_sq = embed_inner(bag, bag, kBase) -
                            2.0 * bag_population_inner(bag, p, kBase.sigma) +
                            analytic_gauss_inner(p, p, kBase.sigma);
        if (std::sqrt(std::max(d_sq, 0.0)) < 0.02) ++close;
    }
    CHECK(close >= 38);  // >= 95%
}

TEST_CASE("anchor expansion is noise-free interpolable on population geometry") {
    MetaConfig cfg = default_meta();
    cfg.noise_std = 0.0;
    cfg.n = 12;
    const LabeledBagSet set = sample_meta(cfg, kBase, kOuter);
    const OuterGram k = outer_gram(population_embedding_gram(set.true_params, kBase.sigma),
                                   kOuter);
    const FittedModel m = krr_fit(k, set.true_f, 1e-10);
    CHECK((k.k * m.alpha - set.true_f).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("empirical anchor kernel matches the analytic construction") {
    // K(mu_hat_x, mu_hat_z) from a large empirical anchor bag should agree
    // with the population-level construction used for true_f.
    MetaConfig cfg = default_meta();
    cfg.n = 100;
    cfg.N = 100;
    cfg.noise_std = 0.0;
    cfg.anchors = 1;
    cfg.anchor_weights = {1.0};
    const LabeledBagSet set = sample_meta(cfg, kBase, kOuter);
    const auto anchors = anchor_params(cfg);

    // Empirical anchor bag with 1e5 samples.
    MetaConfig anchor_cfg = cfg;
    anchor_cfg.mean_min = anchor_cfg.mean_max = anchors[0].mean;
    anchor_cfg.std_min = anchor_cfg.std_max = anchors[0].std;
    anchor_cfg.n = 1;
    anchor_cfg.N = 100000;
    const std::vector<Bag> anchor_bags =
        sample_meta(anchor_cfg, kBase, kOuter, cfg.seed + 123).bags;
    const double anchor_self = cross_inner_matrix(anchor_bags, anchor_bags, kBase)(0, 0);
    const Eigen::MatrixXd cross = cross_inner_matrix(set.bags, anchor_bags, kBase);
    const Eigen::VectorXd self = self_inner(set.bags, kBase);

    double total_gap = 0.0;
    for (Eigen::Index j = 0; j < set.n(); ++j) {
        const double k_emp =
            outer_eval_from_geometry(kOuter, cross(j, 0), self[j], anchor_self);
        total_gap += std::abs(k_emp - set.true_f[j]);
    }
    CHECK(total_gap / static_cast<double>(set.n()) < 0.01);
}

TEST_CASE("config validation") {
    MetaConfig cfg = default_meta();
    cfg.n = 0;
    CHECK_THROWS_AS(sample_meta(cfg, kBase, kOuter), input_error);
    cfg = default_meta();
    cfg.std_min = -1.0;
    CHECK_THROWS_AS(sample_meta(cfg, kBase, kOuter), input_error);
    cfg = default_meta();
    cfg.anchor_weights = {1.0};  // mismatch with anchors = 3
    CHECK_THROWS_AS(sample_meta(cfg, kBase, kOuter), input_error);
    cfg = default_meta();
    const auto expo = BaseKernelSpec::make(BaseFamily::exponential, 1.0, 1);
    CHECK_THROWS_AS(sample_meta(cfg, expo, kOuter), input_error);
}
