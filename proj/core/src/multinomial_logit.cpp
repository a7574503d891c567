#include "ordcausal/multinomial_logit.hpp"

#include <cmath>

namespace ordcausal {

namespace {

constexpr double kGradTol = 1e-6;
constexpr int kMaxIterations = 200;
constexpr int kMaxHalvings = 30;
constexpr double kSeparationBound = 50.0;

// Row-stacked parameter vector <-> (Z-1) x d matrix.
Eigen::MatrixXd unstack(const Eigen::VectorXd& params, int q, int d) {
    Eigen::MatrixXd g(q, d);
    for (int t = 0; t < q; ++t) g.row(t) = params.segment(t * d, d).transpose();
    return g;
}

// Per-unit level probabilities for the design row (with implicit eta_Z = 0).
Eigen::VectorXd softmax_probs(const Eigen::MatrixXd& gamma, const Eigen::VectorXd& row) {
    const int q = static_cast<int>(gamma.rows());
    Eigen::VectorXd eta = gamma * row;
    double mx = 0.0;
    for (int t = 0; t < q; ++t) mx = std::max(mx, eta[t]);
    double denom = std::exp(-mx);
    for (int t = 0; t < q; ++t) denom += std::exp(eta[t] - mx);
    Eigen::VectorXd probs(q + 1);
    for (int t = 0; t < q; ++t) probs[t] = std::exp(eta[t] - mx) / denom;
    probs[q] = std::exp(-mx) / denom;
    return probs;
}

double negloglik_only(const Eigen::MatrixXd& design, const std::vector<int>& t, int n_levels,
                      const Eigen::MatrixXd& gamma) {
    double f = 0.0;
    for (int i = 0; i < design.rows(); ++i) {
        const Eigen::VectorXd probs = softmax_probs(gamma, design.row(i).transpose());
        f -= std::log(std::max(probs[t[i] - 1], 1e-300));
    }
    return f;
}

struct Eval {
    double f = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

Eval evaluate(const Eigen::MatrixXd& design, const std::vector<int>& t, int n_levels,
              const Eigen::MatrixXd& gamma, bool want_hess) {
    const int q = n_levels - 1;
    const int d = static_cast<int>(design.cols());
    const int dim = q * d;
    Eval ev;
    ev.grad = Eigen::VectorXd::Zero(dim);
    if (want_hess) ev.hess = Eigen::MatrixXd::Zero(dim, dim);

    for (int i = 0; i < design.rows(); ++i) {
        const Eigen::VectorXd row = design.row(i).transpose();
        const Eigen::VectorXd probs = softmax_probs(gamma, row);
        ev.f -= std::log(std::max(probs[t[i] - 1], 1e-300));
        for (int a = 0; a < q; ++a) {
            const double ind = (t[i] == a + 1) ? 1.0 : 0.0;
            ev.grad.segment(a * d, d) -= (ind - probs[a]) * row;
        }
        if (!want_hess) continue;
        for (int a = 0; a < q; ++a) {
            for (int b = a; b < q; ++b) {
                const double w = probs[a] * ((a == b ? 1.0 : 0.0) - probs[b]);
                if (w == 0.0) continue;
                const Eigen::MatrixXd block = w * (row * row.transpose());
                ev.hess.block(a * d, b * d, d, d) += block;
                if (a != b) ev.hess.block(b * d, a * d, d, d) += block;
            }
        }
    }
    return ev;
}

}  // namespace

MultinomialFit fit_multinomial_logit(const Dataset& data, const ColumnSelection& columns) {
    data.validate();
    const int n = data.n();
    const int p = static_cast<int>(columns.size());
    const int z = data.n_levels;
    const int q = z - 1;
    const int d = 1 + p;
    if (n < p + z) throw RankDeficientDesign("fit_multinomial_logit: need n >= p + Z");
    const std::vector<int> counts = data.level_counts();
    for (int t = 0; t < z; ++t)
        if (counts[t] == 0)
            throw EmptyLevel("fit_multinomial_logit: treatment level " + std::to_string(t + 1) +
                             " has no units");

    const Eigen::MatrixXd raw = select_columns(data, columns);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(p), sd = Eigen::VectorXd::Ones(p);
    for (int j = 0; j < p; ++j) {
        mean[j] = raw.col(j).mean();
        const double ss = (raw.col(j).array() - mean[j]).square().sum();
        sd[j] = (n > 1) ? std::sqrt(ss / (n - 1)) : 0.0;
        if (sd[j] <= 0.0)
            throw RankDeficientDesign("fit_multinomial_logit: constant covariate column " +
                                      std::to_string(columns[j]));
    }
    Eigen::MatrixXd design(n, d);
    design.col(0).setOnes();
    for (int j = 0; j < p; ++j) design.col(j + 1) = (raw.col(j).array() - mean[j]) / sd[j];
    if (p > 0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        qr.setThreshold(1e-10);
        if (qr.rank() < d) throw RankDeficientDesign("fit_multinomial_logit: collinear covariates");
    }

    // Start at the no-covariate MLE: intercepts at observed log odds vs Z.
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(q, d);
    for (int t = 0; t < q; ++t)
        gamma(t, 0) = std::log(static_cast<double>(counts[t]) / counts[z - 1]);

    double f = negloglik_only(design, data.t, z, gamma);
    int iterations = 0;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        Eval ev = evaluate(design, data.t, z, gamma, true);
        if (ev.grad.lpNorm<Eigen::Infinity>() < kGradTol) break;
        Eigen::VectorXd step;
        double ridge = 0.0;
        for (;;) {
            Eigen::MatrixXd h = ev.hess;
            if (ridge > 0.0) h.diagonal().array() += ridge;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
            step = ldlt.solve(-ev.grad);
            if (ldlt.info() == Eigen::Success && ev.grad.dot(step) < 0.0) break;
            ridge = (ridge == 0.0) ? 1e-4 * (1.0 + ev.hess.diagonal().cwiseAbs().maxCoeff())
                                   : ridge * 10.0;
            if (ridge > 1e12) {
                step = -ev.grad;
                break;
            }
        }
        const double slack = 1e-12 * (1.0 + std::abs(f));
        double alpha = 1.0;
        bool improved = false;
        Eigen::MatrixXd trial;
        double f_new = f;
        for (int h = 0; h <= kMaxHalvings; ++h) {
            trial = gamma + alpha * unstack(step, q, d);
            f_new = negloglik_only(design, data.t, z, trial);
            if (std::isfinite(f_new) && f_new <= f + slack) {
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        ++iterations;
        if (!improved) break;
        gamma = trial;
        f = f_new;
        for (int t = 0; t < q; ++t)
            for (int j = 1; j < d; ++j)
                if (std::abs(gamma(t, j)) > kSeparationBound)
                    throw SeparationDetected(
                        "multinomial logit: standardized coefficient exceeded 50");
    }
    const double grad_norm =
        evaluate(design, data.t, z, gamma, false).grad.lpNorm<Eigen::Infinity>();
    const bool converged = grad_norm < kGradTol;

    // Back-transform: slopes divided by sd, intercept absorbs the centering.
    MultinomialFit fit;
    fit.n_levels = z;
    fit.columns = columns;
    fit.gamma.resize(q, d);
    for (int t = 0; t < q; ++t) {
        double shift = 0.0;
        for (int j = 0; j < p; ++j) {
            fit.gamma(t, j + 1) = gamma(t, j + 1) / sd[j];
            shift += fit.gamma(t, j + 1) * mean[j];
        }
        fit.gamma(t, 0) = gamma(t, 0) - shift;
    }
    fit.loglik = -f;
    fit.iterations = iterations;
    fit.converged = converged;
    fit.grad_norm = grad_norm;
    return fit;
}

MultinomialFit fit_multinomial_logit(const Dataset& data) {
    return fit_multinomial_logit(data, all_columns(data));
}

std::pair<double, Eigen::VectorXd> multinomial_negloglik_grad(const Eigen::VectorXd& params,
                                                              const Dataset& data,
                                                              const ColumnSelection& columns) {
    const int q = data.n_levels - 1;
    const int p = static_cast<int>(columns.size());
    const int d = 1 + p;
    if (params.size() != q * d)
        throw InvalidArgument("multinomial_negloglik_grad: params must have length (Z-1)*(1+p)");
    Eigen::MatrixXd design(data.n(), d);
    design.col(0).setOnes();
    design.rightCols(p) = select_columns(data, columns);
    Eval ev = evaluate(design, data.t, data.n_levels, unstack(params, q, d), false);
    return {ev.f, ev.grad};
}

Eigen::VectorXd predict_category_probs(const MultinomialFit& fit, const Eigen::VectorXd& x) {
    if (x.size() + 1 != fit.gamma.cols())
        throw InvalidArgument("predict_category_probs: covariate arity mismatch");
    Eigen::VectorXd row(fit.gamma.cols());
    row[0] = 1.0;
    row.tail(x.size()) = x;
    return softmax_probs(fit.gamma, row);
}

}  // namespace ordcausal
