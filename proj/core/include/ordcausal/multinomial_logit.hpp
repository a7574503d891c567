#pragma once

#include <utility>

#include <Eigen/Dense>

#include "ordcausal/dataset.hpp"

namespace ordcausal {

// Baseline-category logit log(P(T=t)/P(T=Z)) = gamma_t'(1, x), t = 1..Z-1.
// gamma row t-1 holds (intercept, slopes) for level t against reference Z.
struct MultinomialFit {
    Eigen::MatrixXd gamma;  // (Z-1) x (1+p), original covariate scale
    ColumnSelection columns;
    double loglik = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    int n_levels = 0;
};

// Newton with step-halving, gradient max-norm < 1e-6 within 200 iterations.
// Throws EmptyLevel, RankDeficientDesign, SeparationDetected.
MultinomialFit fit_multinomial_logit(const Dataset& data, const ColumnSelection& columns);
MultinomialFit fit_multinomial_logit(const Dataset& data);

// Objective for verification. params stacks gamma rows (level 1 first), each
// block (intercept, slopes); length (Z-1)*(1+p).
std::pair<double, Eigen::VectorXd> multinomial_negloglik_grad(const Eigen::VectorXd& params,
                                                              const Dataset& data,
                                                              const ColumnSelection& columns);

// Softmax probabilities over the Z levels at covariate vector x (arity p).
Eigen::VectorXd predict_category_probs(const MultinomialFit& fit, const Eigen::VectorXd& x);

}  // namespace ordcausal
