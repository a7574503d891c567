#include <cmath>

#include <doctest.h>

#include "helpers.hpp"
#include "ordcausal/multinomial_logit.hpp"

using namespace ordcausal;
using testutil::Rng;

TEST_CASE("intercept-only recovery of observed log odds") {
    Rng rng(19);
    const int n = 5000;
    Eigen::MatrixXd x(n, 1);
    std::vector<int> t(n);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        const double u = rng.uniform();
        t[i] = u < 0.2 ? 1 : (u < 0.5 ? 2 : 3);  // frequencies 0.2, 0.3, 0.5
    }
    const Dataset data = testutil::make_dataset(x, t, Eigen::VectorXd::Zero(n), 3);
    const MultinomialFit fit = fit_multinomial_logit(data);
    REQUIRE(fit.converged);

    const std::vector<int> counts = data.level_counts();
    // slope should vanish: x carried no signal
    CHECK(std::abs(fit.gamma(0, 1)) < 0.1);
    CHECK(std::abs(fit.gamma(1, 1)) < 0.1);
    // intercepts near log(p_t / p_Z), 3 SEs with the closed-form variance
    for (int lvl = 0; lvl < 2; ++lvl) {
        const double target = std::log(static_cast<double>(counts[lvl]) / counts[2]);
        const double se = std::sqrt(1.0 / counts[lvl] + 1.0 / counts[2]);
        CHECK(std::abs(fit.gamma(lvl, 0) - target) < 3.0 * se + 0.05);
    }
}

TEST_CASE("two levels coincide with plain logistic regression") {
    Rng rng(29);
    const int n = 600;
    Eigen::MatrixXd x(n, 2);
    std::vector<int> t(n);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal();
        const double eta = 0.4 + 0.9 * x(i, 0) - 0.6 * x(i, 1);
        t[i] = rng.uniform() < logistic_cdf(eta) ? 1 : 2;
    }
    const Dataset data = testutil::make_dataset(x, t, Eigen::VectorXd::Zero(n), 2);
    const MultinomialFit fit = fit_multinomial_logit(data);
    REQUIRE(fit.converged);

    std::vector<int> y01(n);
    for (int i = 0; i < n; ++i) y01[i] = t[i] == 1 ? 1 : 0;
    const Eigen::VectorXd oracle = testutil::irls_logistic(x, y01);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(fit.gamma(0, j) - oracle[j]) < 1e-6);
}

TEST_CASE("predicted probabilities sum to one") {
    Rng rng(37);
    MultinomialFit fit;
    fit.n_levels = 4;
    fit.gamma = Eigen::MatrixXd(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) fit.gamma(i, j) = rng.normal() * 2.0;
    fit.columns = {0, 1};
    for (int rep = 0; rep < 500; ++rep) {
        Eigen::VectorXd x(2);
        x << rng.normal() * 3.0, rng.normal() * 3.0;
        const Eigen::VectorXd probs = predict_category_probs(fit, x);
        CHECK(probs.minCoeff() > 0.0);
        CHECK(std::abs(probs.sum() - 1.0) < 1e-12);
    }
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(41);
    const int n = 250;
    Eigen::MatrixXd x(n, 2);
    std::vector<int> t(n);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal();
        t[i] = 1 + rng.uniform_int(0, 2);
    }
    const Dataset data = testutil::make_dataset(x, t, Eigen::VectorXd::Zero(n), 3);
    const ColumnSelection cols = all_columns(data);

    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd params(6);
        for (int i = 0; i < 6; ++i) params[i] = rng.normal() * 0.7;
        const auto [f, grad] = multinomial_negloglik_grad(params, data, cols);
        const Eigen::VectorXd fd = testutil::fd_gradient(
            [&](const Eigen::VectorXd& q) {
                return multinomial_negloglik_grad(q, data, cols).first;
            },
            params);
        const double scale = std::max(1.0, fd.lpNorm<Eigen::Infinity>());
        CHECK((grad - fd).lpNorm<Eigen::Infinity>() / scale < 1e-6);
    }
}
