#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// must stay independent of the library code paths they check: brute-force
// pair enumeration for the rank correlation, normal equations for least
// squares, central finite differences for gradients, IRLS for the binary
// logistic reference.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ordcausal/dataset.hpp"
#include "ordcausal/prob.hpp"
#include "ordcausal/rng.hpp"

namespace testutil {

using ordcausal::Dataset;
using ordcausal::Rng;

inline Dataset make_dataset(const Eigen::MatrixXd& x, const std::vector<int>& t,
                            const Eigen::VectorXd& y, int n_levels) {
    Dataset data;
    const int p = static_cast<int>(x.cols());
    for (int j = 0; j < p; ++j) {
        data.covariate_names.push_back("x" + std::to_string(j + 1));
        data.covariate_types.push_back(ordcausal::ColumnType::numeric);
    }
    data.ids.resize(x.rows());
    for (int i = 0; i < x.rows(); ++i) data.ids[i] = i;
    data.x = x;
    data.t = t;
    data.y = y;
    data.n_levels = n_levels;
    return data;
}

// Ordinal assignment by inverse-CDF sampling from the proportional-odds
// model: category = first t with u <= logistic(theta_t - beta'x).
inline int sample_ordinal(const Eigen::VectorXd& theta, double lp, double u) {
    const int z = static_cast<int>(theta.size()) + 1;
    for (int t = 0; t < z - 1; ++t)
        if (u <= ordcausal::logistic_cdf(theta[t] - lp)) return t + 1;
    return z;
}

struct OrdinalDgp {
    Eigen::VectorXd theta;  // Z-1
    Eigen::VectorXd beta;   // p
    Eigen::VectorXd alpha;  // Z level effects on the outcome
    Eigen::VectorXd gamma;  // p outcome slopes
    double sigma = 1.0;
};

// Confounded data: x standard normal, T from the proportional-odds model,
// y = alpha_T + gamma'x + sigma * eps.
inline Dataset generate_ordinal_data(const OrdinalDgp& dgp, int n, Rng& rng) {
    const int p = static_cast<int>(dgp.beta.size());
    const int z = static_cast<int>(dgp.theta.size()) + 1;
    Eigen::MatrixXd x(n, p);
    std::vector<int> t(n);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
        const double lp = dgp.beta.dot(x.row(i));
        t[i] = sample_ordinal(dgp.theta, lp, rng.uniform());
        y[i] = dgp.alpha[t[i] - 1] + dgp.gamma.dot(x.row(i)) + dgp.sigma * rng.normal();
    }
    return make_dataset(x, t, y, z);
}

// O(n^2) concordant/discordant/tie enumeration.
struct BruteTau {
    double tau = 0.0;
    long long s = 0;
};

inline BruteTau brute_force_tau(const std::vector<double>& a, const std::vector<double>& b) {
    const int n = static_cast<int>(a.size());
    long long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double da = a[i] - a[j];
            const double db = b[i] - b[j];
            if (da == 0.0 && db == 0.0) continue;
            if (da == 0.0) {
                ++ties_a;
            } else if (db == 0.0) {
                ++ties_b;
            } else if (da * db > 0.0) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    BruteTau r;
    r.s = concordant - discordant;
    const long long n0 = static_cast<long long>(n) * (n - 1) / 2;
    // pairs tied in a include joint ties; recount directly
    long long n1 = 0, n2 = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (a[i] == a[j]) ++n1;
            if (b[i] == b[j]) ++n2;
        }
    r.tau = static_cast<double>(r.s) /
            std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
    return r;
}

// Central finite differences of a scalar function.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
    Eigen::VectorXd g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        Eigen::VectorXd hi = x, lo = x;
        hi[i] += h;
        lo[i] -= h;
        g[i] = (f(hi) - f(lo)) / (2.0 * h);
    }
    return g;
}

// Normal-equations solve, the independent least-squares route.
inline Eigen::VectorXd normal_equations_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    return (x.transpose() * x).inverse() * (x.transpose() * y);
}

// Binary logistic regression of (y in {0,1}) on [1, x] by IRLS.
inline Eigen::VectorXd irls_logistic(const Eigen::MatrixXd& x, const std::vector<int>& y01,
                                     int max_iter = 50) {
    const int n = static_cast<int>(x.rows());
    Eigen::MatrixXd design(n, x.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x.cols()) = x;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(design.cols());
    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::VectorXd eta = design * beta;
        Eigen::VectorXd mu(n), w(n);
        for (int i = 0; i < n; ++i) {
            mu[i] = ordcausal::logistic_cdf(eta[i]);
            w[i] = std::max(mu[i] * (1.0 - mu[i]), 1e-12);
        }
        Eigen::VectorXd zvec(n);
        for (int i = 0; i < n; ++i) zvec[i] = eta[i] + (y01[i] - mu[i]) / w[i];
        Eigen::MatrixXd xtwx = design.transpose() * w.asDiagonal() * design;
        Eigen::VectorXd next = xtwx.ldlt().solve(design.transpose() * (w.asDiagonal() * zvec));
        if ((next - beta).lpNorm<Eigen::Infinity>() < 1e-12) {
            beta = next;
            break;
        }
        beta = next;
    }
    return beta;
}

}  // namespace testutil
