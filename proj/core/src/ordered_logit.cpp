#include "ordcausal/ordered_logit.hpp"

#include <cmath>

#include "ordcausal/prob.hpp"

namespace ordcausal {

namespace {

constexpr double kGradTol = 1e-8;
constexpr int kMaxIterations = 100;
constexpr int kMaxHalvings = 30;
constexpr double kSeparationBound = 50.0;
constexpr double kMinCellProb = 1e-300;

struct Eval {
    double f = 0.0;          // negative log-likelihood
    Eigen::VectorXd grad;    // in (theta, beta) coordinates
    Eigen::MatrixXd hess;    // same
};

// Thresholds from the increment parameterization.
Eigen::VectorXd thresholds_from(const Eigen::VectorXd& params, int n_thresh) {
    Eigen::VectorXd theta(n_thresh);
    theta[0] = params[0];
    for (int j = 1; j < n_thresh; ++j) theta[j] = theta[j - 1] + std::exp(params[j]);
    return theta;
}

// Negative log-likelihood with derivatives in (theta, beta) space.
Eval evaluate(const Eigen::MatrixXd& x, const std::vector<int>& t, int n_levels,
              const Eigen::VectorXd& theta, const Eigen::VectorXd& beta, bool want_hess) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    const int q = n_levels - 1;
    const int dim = q + p;

    Eval ev;
    ev.grad = Eigen::VectorXd::Zero(dim);
    if (want_hess) ev.hess = Eigen::MatrixXd::Zero(dim, dim);

    const Eigen::VectorXd u = x * beta;
    for (int i = 0; i < n; ++i) {
        const int c = t[i];
        double sa = 1.0, fa = 0.0, da = 0.0;  // upper: CDF, its 1st and 2nd derivative
        double sb = 0.0, fb = 0.0, db = 0.0;  // lower
        if (c < n_levels) {
            sa = logistic_cdf(theta[c - 1] - u[i]);
            fa = sa * (1.0 - sa);
            da = fa * (1.0 - 2.0 * sa);
        }
        if (c > 1) {
            sb = logistic_cdf(theta[c - 2] - u[i]);
            fb = sb * (1.0 - sb);
            db = fb * (1.0 - 2.0 * sb);
        }
        const double pi = std::max(sa - sb, kMinCellProb);
        ev.f -= std::log(pi);

        const double ga = fa / pi;   // dl/dtheta_c
        const double gb = -fb / pi;  // dl/dtheta_{c-1}
        const double gu = -(fa - fb) / pi;
        if (c < n_levels) ev.grad[c - 1] -= ga;
        if (c > 1) ev.grad[c - 2] -= gb;
        ev.grad.tail(p) -= gu * x.row(i).transpose();

        if (!want_hess) continue;
        const double duu = (da - db) / pi - gu * gu;  // d2l/du2
        if (c < n_levels) {
            ev.hess(c - 1, c - 1) -= da / pi - ga * ga;
            const double dau = -da / pi + fa * (fa - fb) / (pi * pi);
            for (int j = 0; j < p; ++j) {
                ev.hess(c - 1, q + j) -= dau * x(i, j);
                ev.hess(q + j, c - 1) -= dau * x(i, j);
            }
        }
        if (c > 1) {
            ev.hess(c - 2, c - 2) -= -db / pi - gb * gb;
            const double dbu = db / pi - fb * (fa - fb) / (pi * pi);
            for (int j = 0; j < p; ++j) {
                ev.hess(c - 2, q + j) -= dbu * x(i, j);
                ev.hess(q + j, c - 2) -= dbu * x(i, j);
            }
        }
        if (c < n_levels && c > 1) {
            const double dab = fa * fb / (pi * pi);
            ev.hess(c - 1, c - 2) -= dab;
            ev.hess(c - 2, c - 1) -= dab;
        }
        ev.hess.bottomRightCorner(p, p) -=
            duu * (x.row(i).transpose() * x.row(i));
    }
    return ev;
}

double negloglik_only(const Eigen::MatrixXd& x, const std::vector<int>& t, int n_levels,
                      const Eigen::VectorXd& params) {
    const int q = n_levels - 1;
    const Eigen::VectorXd theta = thresholds_from(params, q);
    const Eigen::VectorXd beta = params.tail(params.size() - q);
    const Eigen::VectorXd u = x * beta;
    double f = 0.0;
    for (int i = 0; i < static_cast<int>(x.rows()); ++i) {
        const int c = t[i];
        const double sa = (c < n_levels) ? logistic_cdf(theta[c - 1] - u[i]) : 1.0;
        const double sb = (c > 1) ? logistic_cdf(theta[c - 2] - u[i]) : 0.0;
        f -= std::log(std::max(sa - sb, kMinCellProb));
    }
    return f;
}

// Chain rule from (theta, beta) to (theta_1, log-increments, beta).
void to_increment_space(const Eigen::VectorXd& params, int q, const Eigen::VectorXd& grad_tb,
                        const Eigen::MatrixXd* hess_tb, Eigen::VectorXd* grad,
                        Eigen::MatrixXd* hess) {
    const int dim = static_cast<int>(params.size());
    const int p = dim - q;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
    for (int t = 0; t < q; ++t) {
        jac(t, 0) = 1.0;
        for (int j = 1; j <= t; ++j) jac(t, j) = std::exp(params[j]);
    }
    jac.bottomRightCorner(p, p).setIdentity();
    *grad = jac.transpose() * grad_tb;
    if (hess_tb && hess) {
        *hess = jac.transpose() * (*hess_tb) * jac;
        for (int j = 1; j < q; ++j) {
            double acc = 0.0;
            for (int t = j; t < q; ++t) acc += grad_tb[t];
            (*hess)(j, j) += std::exp(params[j]) * acc;
        }
    }
}

struct NewtonResult {
    Eigen::VectorXd params;
    double f = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Damped Newton on the increment parameterization. `scale` holds the
// per-column standard deviations used for the separation check so the
// 50-unit bound always refers to standardized coefficients.
NewtonResult newton_ordered_logit(const Eigen::MatrixXd& x, const std::vector<int>& t,
                                  int n_levels, Eigen::VectorXd params,
                                  const Eigen::VectorXd& scale, double tol, int max_iter) {
    const int q = n_levels - 1;
    const int p = static_cast<int>(x.cols());

    NewtonResult res;
    double f = negloglik_only(x, t, n_levels, params);
    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::VectorXd theta = thresholds_from(params, q);
        const Eigen::VectorXd beta = params.tail(p);
        Eval ev = evaluate(x, t, n_levels, theta, beta, true);
        Eigen::VectorXd grad;
        Eigen::MatrixXd hess;
        to_increment_space(params, q, ev.grad, &ev.hess, &grad, &hess);

        if (grad.lpNorm<Eigen::Infinity>() < tol) break;

        Eigen::VectorXd step;
        double ridge = 0.0;
        for (;;) {
            Eigen::MatrixXd h = hess;
            if (ridge > 0.0) h.diagonal().array() += ridge;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
            step = ldlt.solve(-grad);
            if (ldlt.info() == Eigen::Success && grad.dot(step) < 0.0) break;
            ridge = (ridge == 0.0) ? 1e-4 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff())
                                   : ridge * 10.0;
            if (ridge > 1e12) {  // fall back to steepest descent
                step = -grad;
                break;
            }
        }

        // accept any non-increase; the slack only absorbs float rounding in
        // the quadratic phase where true improvements drop below resolution
        const double slack = 1e-12 * (1.0 + std::abs(f));
        double alpha = 1.0;
        double f_new = f;
        Eigen::VectorXd trial;
        bool improved = false;
        for (int h = 0; h <= kMaxHalvings; ++h) {
            trial = params + alpha * step;
            f_new = negloglik_only(x, t, n_levels, trial);
            if (std::isfinite(f_new) && f_new <= f + slack) {
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        ++res.iterations;
        if (!improved) break;
        params = trial;
        f = f_new;

        for (int j = 0; j < p; ++j)
            if (std::abs(params[q + j] * scale[j]) > kSeparationBound)
                throw SeparationDetected(
                    "ordered logit: standardized |beta| exceeded 50 (quasi-complete separation)");
    }
    // report the gradient at the returned point, not at the last line search
    Eval ev = evaluate(x, t, n_levels, thresholds_from(params, q), params.tail(p), false);
    Eigen::VectorXd grad;
    to_increment_space(params, q, ev.grad, nullptr, &grad, nullptr);
    res.grad_norm = grad.lpNorm<Eigen::Infinity>();
    res.converged = res.grad_norm < tol;
    res.params = params;
    res.f = f;
    return res;
}

Eigen::VectorXd start_params(const Dataset& data, int p) {
    const int z = data.n_levels;
    const std::vector<int> counts = data.level_counts();
    Eigen::VectorXd params = Eigen::VectorXd::Zero(z - 1 + p);
    double cum = 0.0;
    double prev = 0.0;
    for (int t = 0; t < z - 1; ++t) {
        cum += counts[t];
        const double th = logit(cum / data.n());
        if (t == 0)
            params[0] = th;
        else
            params[t] = std::log(th - prev);
        prev = th;
    }
    return params;
}

}  // namespace

OrdinalFit fit_ordered_logit(const Dataset& data, const ColumnSelection& columns) {
    data.validate();
    const int n = data.n();
    const int p = static_cast<int>(columns.size());
    const int z = data.n_levels;
    if (n < p + z)
        throw RankDeficientDesign("fit_ordered_logit: need n >= p + Z");
    const std::vector<int> counts = data.level_counts();
    for (int t = 0; t < z; ++t)
        if (counts[t] == 0)
            throw EmptyLevel("fit_ordered_logit: treatment level " + std::to_string(t + 1) +
                             " has no units");

    const Eigen::MatrixXd raw = select_columns(data, columns);
    Eigen::VectorXd mean(p), sd(p);
    for (int j = 0; j < p; ++j) {
        mean[j] = raw.col(j).mean();
        const double ss = (raw.col(j).array() - mean[j]).square().sum();
        sd[j] = (n > 1) ? std::sqrt(ss / (n - 1)) : 0.0;
        if (sd[j] <= 0.0)
            throw RankDeficientDesign("fit_ordered_logit: constant covariate column " +
                                      std::to_string(columns[j]));
    }
    Eigen::MatrixXd xs = raw;
    for (int j = 0; j < p; ++j) xs.col(j) = (raw.col(j).array() - mean[j]) / sd[j];
    if (p > 0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
        qr.setThreshold(1e-10);
        if (qr.rank() < p)
            throw RankDeficientDesign("fit_ordered_logit: collinear covariates");
    }

    const int q = z - 1;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p);

    // Phase 1: standardized covariates, tightened tolerance.
    NewtonResult st = newton_ordered_logit(xs, data.t, z, start_params(data, p), ones,
                                           kGradTol * 0.1, kMaxIterations);

    // Back-transform to the original covariate scale.
    Eigen::VectorXd params = st.params;
    const Eigen::VectorXd beta_std = st.params.tail(p);
    Eigen::VectorXd beta(p);
    double shift = 0.0;
    for (int j = 0; j < p; ++j) {
        beta[j] = beta_std[j] / sd[j];
        shift += beta[j] * mean[j];
    }
    params[0] = st.params[0] + shift;  // increments are scale-free
    params.tail(p) = beta;

    // Phase 2: polish on the original scale so the reported gradient norm
    // refers to the parameterization callers can evaluate.
    NewtonResult fin = newton_ordered_logit(raw, data.t, z, params, sd, kGradTol,
                                            kMaxIterations - st.iterations);

    OrdinalFit fit;
    fit.n_levels = z;
    fit.columns = columns;
    fit.theta = thresholds_from(fin.params, q);
    fit.beta = fin.params.tail(p);
    fit.loglik = -fin.f;
    fit.grad_norm = fin.grad_norm;
    fit.iterations = st.iterations + fin.iterations;
    fit.converged = fin.converged;

    Eval ev = evaluate(raw, data.t, z, fit.theta, fit.beta, true);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(ev.hess);
    fit.vcov = ldlt.solve(Eigen::MatrixXd::Identity(q + p, q + p));
    return fit;
}

OrdinalFit fit_ordered_logit(const Dataset& data) {
    return fit_ordered_logit(data, all_columns(data));
}

std::pair<double, Eigen::VectorXd> ordered_logit_negloglik_grad(const Eigen::VectorXd& params,
                                                                const Dataset& data,
                                                                const ColumnSelection& columns) {
    const int q = data.n_levels - 1;
    const int p = static_cast<int>(columns.size());
    if (params.size() != q + p)
        throw InvalidArgument("ordered_logit_negloglik_grad: params must have length p + Z - 1");
    const Eigen::MatrixXd x = select_columns(data, columns);
    const Eigen::VectorXd theta = thresholds_from(params, q);
    Eval ev = evaluate(x, data.t, data.n_levels, theta, params.tail(p), false);
    Eigen::VectorXd grad;
    to_increment_space(params, q, ev.grad, nullptr, &grad, nullptr);
    return {ev.f, grad};
}

Eigen::VectorXd increment_params(const OrdinalFit& fit) {
    const int q = fit.n_levels - 1;
    const int p = static_cast<int>(fit.beta.size());
    Eigen::VectorXd params(q + p);
    params[0] = fit.theta[0];
    for (int j = 1; j < q; ++j) params[j] = std::log(fit.theta[j] - fit.theta[j - 1]);
    params.tail(p) = fit.beta;
    return params;
}

double linear_predictor(const OrdinalFit& fit, const Eigen::VectorXd& x) {
    if (x.size() != fit.beta.size())
        throw InvalidArgument("linear_predictor: covariate arity mismatch");
    return fit.beta.dot(x);
}

Eigen::VectorXd linear_predictors(const OrdinalFit& fit, const Dataset& data) {
    return select_columns(data, fit.columns) * fit.beta;
}

Eigen::VectorXd predict_category_probs(const OrdinalFit& fit, const Eigen::VectorXd& x) {
    const double u = linear_predictor(fit, x);
    const int z = fit.n_levels;
    Eigen::VectorXd probs(z);
    double prev = 0.0;
    for (int t = 0; t < z - 1; ++t) {
        const double cdf = logistic_cdf(fit.theta[t] - u);
        probs[t] = cdf - prev;
        prev = cdf;
    }
    probs[z - 1] = 1.0 - prev;
    return probs;
}

}  // namespace ordcausal
