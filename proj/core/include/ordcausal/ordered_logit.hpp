#pragma once

#include <utility>

#include <Eigen/Dense>

#include "ordcausal/dataset.hpp"

namespace ordcausal {

// Proportional-odds model log(P(T<=t)/P(T>t)) = theta_t - beta'x for
// t = 1..Z-1, so larger beta'x means stochastically larger T.
struct OrdinalFit {
    Eigen::VectorXd theta;    // Z-1 thresholds, strictly increasing
    Eigen::VectorXd beta;     // coefficients on the original covariate scale
    ColumnSelection columns;  // dataset columns the model was fit on
    double loglik = 0.0;
    double grad_norm = 0.0;  // max-norm of the negloglik gradient at return
    int iterations = 0;
    bool converged = false;
    Eigen::MatrixXd vcov;  // (Z-1+p)^2, parameter order (theta, beta)
    int n_levels = 0;
};

// Maximum likelihood by damped Newton with step-halving. Thresholds are kept
// monotone by optimizing (theta_1, log increments); covariates are centered
// and scaled internally and coefficients reported on the original scale.
// converged=true iff the gradient max-norm fell below 1e-8 within 100
// iterations; otherwise the best iterate is returned with converged=false.
// Throws EmptyLevel, RankDeficientDesign, SeparationDetected.
OrdinalFit fit_ordered_logit(const Dataset& data, const ColumnSelection& columns);
OrdinalFit fit_ordered_logit(const Dataset& data);

// Objective of the fit, exposed for verification. params has length
// p + Z - 1 laid out as (theta_1, d_2..d_{Z-1}, beta_1..beta_p) with
// theta_t = theta_1 + sum_{j<=t} exp(d_j). Returns (negative log-likelihood,
// analytic gradient) on the original covariate scale.
std::pair<double, Eigen::VectorXd> ordered_logit_negloglik_grad(const Eigen::VectorXd& params,
                                                                const Dataset& data,
                                                                const ColumnSelection& columns);

// Increment-parameterization vector corresponding to a fit.
Eigen::VectorXd increment_params(const OrdinalFit& fit);

// Balancing score b(x) = beta'x. x has the arity of fit.beta.
double linear_predictor(const OrdinalFit& fit, const Eigen::VectorXd& x);

// Scores for every unit, using the fit's stored column selection.
Eigen::VectorXd linear_predictors(const OrdinalFit& fit, const Dataset& data);

// Generalized propensity scores r(t, x) for t = 1..Z as differences of the
// logistic CDF at the thresholds. Positive and summing to 1 within 1e-12.
Eigen::VectorXd predict_category_probs(const OrdinalFit& fit, const Eigen::VectorXd& x);

}  // namespace ordcausal
