#pragma once

namespace ordcausal {

// Standard normal CDF.
double normal_cdf(double x);

// Two-sided normal p-value, 2*(1 - Phi(|z|)).
double normal_two_sided_p(double z);

// Logistic CDF 1/(1+exp(-x)).
double logistic_cdf(double x);
double logit(double p);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a, x).
double incomplete_gamma(double a, double x);

// Upper tail of the F distribution, Pr(F_{d1,d2} > f).
double f_sf(double f, double d1, double d2);

// Upper tail of the chi-square distribution.
double chisq_sf(double x, double dof);

}  // namespace ordcausal
