#include <doctest.h>

#include <cmath>

#include "dreg/estimators.hpp"
#include "dreg/rng.hpp"

using namespace dreg;

namespace {

OuterGram toy_gram(const Eigen::MatrixXd& k,
                   OuterKernelSpec spec = OuterKernelSpec::linear_embedding()) {
    return OuterGram{k, spec};
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double c : v) x[i++] = c;
    return x;
}

// Random PSD Gram with unit-scale diagonal.
Eigen::MatrixXd random_psd(SplitMix64& rng, int n) {
    Eigen::MatrixXd x(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x(i, j) = rng.normal();
    Eigen::MatrixXd k = x * x.transpose() / n;
    return k;
}

}  // namespace

TEST_CASE("sgd_fit: zero labels give the zero model") {
    SplitMix64 rng(1);
    const OuterGram k = toy_gram(random_psd(rng, 5));
    SgdConfig cfg{0.1, 2, 50, 7, Sampling::with_replacement, TailMode::paper_tail};
    const FittedModel m = sgd_fit(k, Eigen::VectorXd::Zero(5), cfg);
    CHECK(m.alpha.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sgd_fit: scalar recursion oracle") {
    // alpha_{t+1} = alpha_t - 0.5(alpha_t - 1) => alpha_t = 1 - 0.5^t.
    const OuterGram k = toy_gram(Eigen::MatrixXd::Ones(1, 1));
    SgdConfig cfg{0.5, 1, 200, 3, Sampling::with_replacement, TailMode::paper_tail};
    TrajectoryRecord traj;
    const FittedModel m = sgd_fit(k, vec({1.0}), cfg, &traj);
    REQUIRE(traj.size() == 201);
    for (long long t = 0; t <= 200 && t <= 50; ++t)
        CHECK(traj[static_cast<std::size_t>(t)][0] ==
              doctest::Approx(1.0 - std::pow(0.5, static_cast<double>(t))).epsilon(1e-12));
    CHECK(m.alpha[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("full-batch deterministic SGD reproduces GD trajectories") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 20;
        const OuterGram k = toy_gram(random_psd(rng, n));
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = rng.normal();
        const double eta = rng.uniform(0.05, 0.5);
        const long long T = 30;
        SgdConfig cfg{eta, n, T, 1, Sampling::full_batch_deterministic, TailMode::paper_tail};
        TrajectoryRecord ts, tg;
        const FittedModel ms = sgd_fit(k, y, cfg, &ts);
        const FittedModel mg = gd_fit(k, y, eta, T, TailMode::paper_tail, &tg);
        REQUIRE(ts.size() == tg.size());
        for (std::size_t t = 0; t < ts.size(); ++t)
            CHECK((ts[t] - tg[t]).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((ms.alpha - mg.alpha).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("full_batch_deterministic requires b = n") {
    const OuterGram k = toy_gram(Eigen::MatrixXd::Identity(3, 3));
    SgdConfig cfg{0.1, 2, 10, 0, Sampling::full_batch_deterministic, TailMode::paper_tail};
    CHECK_THROWS_AS(sgd_fit(k, Eigen::VectorXd::Zero(3), cfg), input_error);
}

TEST_CASE("gd_fit: diagonal geometric recursion oracle") {
    // Independent coordinates: alpha_t = (1 - (1 - eta/n)^t) y, n = 2, eta = 0.5.
    const OuterGram k = toy_gram(Eigen::MatrixXd::Identity(2, 2));
    const Eigen::VectorXd y = vec({1.0, -1.0});
    const long long T = 40;
    const FittedModel m = gd_fit(k, y, 0.5, T);
    double mean_factor = 0.0;
    for (long long t = 21; t <= 40; ++t) mean_factor += std::pow(0.75, static_cast<double>(t));
    mean_factor /= 20.0;
    CHECK(m.alpha[0] == doctest::Approx((1.0 - mean_factor) * 1.0).epsilon(1e-12));
    CHECK(m.alpha[1] == doctest::Approx((1.0 - mean_factor) * -1.0).epsilon(1e-12));
}

TEST_CASE("gd_fit approaches the interpolant as eta*T grows") {
    SplitMix64 rng(9);
    const int n = 10;
    Eigen::MatrixXd k = random_psd(rng, n);
    k.diagonal().array() += 1.0;  // well conditioned
    const OuterGram g = toy_gram(k);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.normal();
    const FittedModel m = gd_fit(g, y, 0.5, 20000, TailMode::last_iterate);
    CHECK((k * m.alpha - y).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("gd training error is monotone on interpolable data") {
    SplitMix64 rng(13);
    const int n = 8;
    const OuterGram g = toy_gram(random_psd(rng, n));
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.normal();
    TrajectoryRecord traj;
    gd_fit(g, y, 0.2, 100, TailMode::paper_tail, &traj);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& alpha : traj) {
        const double mse = (g.k * alpha - y).squaredNorm() / n;
        CHECK(mse <= prev + 1e-12);
        prev = mse;
    }
}

TEST_CASE("mini-batch gradient is unbiased") {
    SplitMix64 rng(17);
    const int n = 6;
    const OuterGram k = toy_gram(random_psd(rng, n));
    Eigen::VectorXd y(n), alpha0(n);
    for (int i = 0; i < n; ++i) {
        y[i] = rng.normal();
        alpha0[i] = rng.normal();
    }
    // One SGD step from alpha0 vs the full-gradient step, averaged over
    // resampled iterations. Mean update must match within 3 standard errors.
    const Eigen::VectorXd full = (k.k * alpha0 - y) / n;
    const int reps = 10000;
    const int b = 2;
    Eigen::MatrixXd updates(n, reps);
    for (int rep = 0; rep < reps; ++rep) {
        Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
        SplitMix64 g = make_stream(123, stream_tag::sgd_batch, static_cast<std::uint64_t>(rep));
        for (int i = 0; i < b; ++i) {
            const auto j = static_cast<Eigen::Index>(g.uniform_index(n));
            delta[j] += k.k.row(j).dot(alpha0) - y[j];
        }
        updates.col(rep) = delta / b;
    }
    for (int j = 0; j < n; ++j) {
        const double mean = updates.row(j).mean();
        const double sd = std::sqrt((updates.row(j).array() - mean).square().sum() / (reps - 1));
        const double se = sd / std::sqrt(static_cast<double>(reps));
        CHECK(std::abs(mean - full[j]) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("tail window arithmetic") {
    // Even T: exact average over T/2 trailing iterates equals the 2/T factor.
    const OuterGram k = toy_gram(Eigen::MatrixXd::Ones(1, 1));
    TrajectoryRecord traj;
    const FittedModel m = gd_fit(k, vec({1.0}), 0.3, 10, TailMode::paper_tail, &traj);
    double manual = 0.0;
    for (int t = 6; t <= 10; ++t) manual += traj[static_cast<std::size_t>(t)][0];
    CHECK(m.alpha[0] == doctest::Approx(manual * 2.0 / 10.0).epsilon(1e-15));

    // Odd T: divisor is the exact count T - floor(T/2).
    const FittedModel modd = gd_fit(k, vec({1.0}), 0.3, 11, TailMode::paper_tail, &traj);
    manual = 0.0;
    for (int t = 6; t <= 11; ++t) manual += traj[static_cast<std::size_t>(t)][0];
    CHECK(modd.alpha[0] == doctest::Approx(manual / 6.0).epsilon(1e-15));

    const FittedModel mlast = gd_fit(k, vec({1.0}), 0.3, 11, TailMode::last_iterate, &traj);
    CHECK(mlast.alpha[0] == traj.back()[0]);

    const FittedModel mfull = gd_fit(k, vec({1.0}), 0.3, 11, TailMode::full_average, &traj);
    manual = 0.0;
    for (int t = 1; t <= 11; ++t) manual += traj[static_cast<std::size_t>(t)][0];
    CHECK(mfull.alpha[0] == doctest::Approx(manual / 11.0).epsilon(1e-15));
}

TEST_CASE("divergence guard names the step size") {
    const OuterGram k = toy_gram(4.0 * Eigen::MatrixXd::Ones(1, 1));
    SgdConfig cfg{10.0, 1, 1000, 0, Sampling::with_replacement, TailMode::paper_tail};
    CHECK_THROWS_AS(sgd_fit(k, vec({1.0}), cfg), divergence_error);
    CHECK_THROWS_AS(gd_fit(k, vec({1.0}), 10.0, 1000), divergence_error);
    try {
        gd_fit(k, vec({1.0}), 10.0, 1000);
    } catch (const divergence_error& e) {
        CHECK(std::string(e.what()).find("10") != std::string::npos);
        CHECK(std::string(e.what()).find("1/(4 kappa^2)") != std::string::npos);
    }
}

TEST_CASE("krr_fit closed-form examples") {
    const FittedModel m1 = krr_fit(toy_gram(Eigen::MatrixXd::Ones(1, 1)), vec({2.0}), 1.0);
    CHECK(m1.alpha[0] == doctest::Approx(1.0));

    Eigen::MatrixXd k2(2, 2);
    k2 << 1.0, 0.5, 0.5, 1.0;
    const FittedModel m2 = krr_fit(toy_gram(k2), vec({1.0, 0.0}), 0.25);
    CHECK(m2.alpha[0] == doctest::Approx(0.75));
    CHECK(m2.alpha[1] == doctest::Approx(-0.25));

    // lambda -> infinity: alpha -> y / (n lambda)
    const FittedModel m3 = krr_fit(toy_gram(k2), vec({1.0, 0.0}), 1e9);
    CHECK(m3.alpha[0] == doctest::Approx(1.0 / (2.0 * 1e9)).epsilon(1e-6));
    CHECK_THROWS_AS(krr_fit(toy_gram(k2), vec({1.0, 0.0}), 0.0), input_error);
}

TEST_CASE("tail-averaged GD stays close to KRR at lambda = 1/(eta T)") {
    SplitMix64 rng(21);
    const int n = 10;
    Eigen::MatrixXd k = random_psd(rng, n);
    k.diagonal().array() += 0.5;
    const OuterGram g = toy_gram(k);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.normal();

    for (double etaT : {10.0, 100.0}) {
        const double eta = 0.1;
        const auto T = static_cast<long long>(etaT / eta);
        const FittedModel gd = gd_fit(g, y, eta, T);
        const FittedModel kr = krr_fit(g, y, 1.0 / etaT);
        const Eigen::VectorXd pg = k * gd.alpha;
        const Eigen::VectorXd pk = k * kr.alpha;
        const double rms_diff = std::sqrt((pg - pk).squaredNorm() / n);
        const double rms_krr = std::sqrt(pk.squaredNorm() / n);
        CHECK(rms_diff <= 0.25 * rms_krr);
    }
}

TEST_CASE("predict matches a naive per-pair reimplementation") {
    SplitMix64 rng(25);
    const auto base = BaseKernelSpec::make(BaseFamily::gaussian, 1.0, 1);
    const auto outer = OuterKernelSpec::gaussian_on_embedding(1.0);
    auto bags = std::make_shared<std::vector<Bag>>();
    for (int i = 0; i < 5; ++i) {
        Bag b;
        b.samples.resize(6, 1);
        for (int r = 0; r < 6; ++r) b.samples(r, 0) = rng.uniform(-2, 2);
        bags->push_back(std::move(b));
    }
    const OuterGram k = outer_gram(embedding_gram(*bags, base), outer);
    Eigen::VectorXd y(5);
    for (int i = 0; i < 5; ++i) y[i] = rng.normal();
    FittedModel m = krr_fit(k, y, 0.1);
    attach_training_bags(m, bags, base);

    std::vector<Bag> test;
    for (int i = 0; i < 3; ++i) {
        Bag b;
        b.samples.resize(4, 1);
        for (int r = 0; r < 4; ++r) b.samples(r, 0) = rng.uniform(-2, 2);
        test.push_back(std::move(b));
    }
    const Eigen::VectorXd preds = predict(m, test, base);
    for (int i = 0; i < 3; ++i) {
        double manual = 0.0;
        for (int j = 0; j < 5; ++j) {
            const double cross = embed_inner(test[static_cast<std::size_t>(i)],
                                             (*bags)[static_cast<std::size_t>(j)], base);
            const double si = embed_inner(test[static_cast<std::size_t>(i)],
                                          test[static_cast<std::size_t>(i)], base);
            const double sj = embed_inner((*bags)[static_cast<std::size_t>(j)],
                                          (*bags)[static_cast<std::size_t>(j)], base);
            manual += outer_eval_from_geometry(outer, cross, si, sj) * m.alpha[j];
        }
        CHECK(preds[i] == doctest::Approx(manual).epsilon(1e-12));
    }

    // Test bag identical to training bag j: prediction equals (K alpha)[j].
    const Eigen::VectorXd self_pred = predict(m, {(*bags)[2]}, base);
    CHECK(self_pred[0] == doctest::Approx((k.k * m.alpha)[2]).epsilon(1e-12));

    // Zero coefficients predict zero.
    m.alpha.setZero();
    CHECK(predict(m, test, base).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("model norm is nonnegative and bounds predictions") {
    SplitMix64 rng(31);
    const OuterGram k = toy_gram(random_psd(rng, 6),
                                 OuterKernelSpec::gaussian_on_embedding(1.0));
    Eigen::VectorXd y(6);
    for (int i = 0; i < 6; ++i) y[i] = rng.normal();
    const FittedModel m = krr_fit(k, y, 0.3);
    CHECK(m.norm_sq(k) >= 0.0);
    CHECK(m.passes == 1);
}
