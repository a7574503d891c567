#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ordcausal/dataset.hpp"
#include "ordcausal/design.hpp"
#include "ordcausal/ols.hpp"

namespace ordcausal {

struct PairEffect {
    int t = 0;  // higher level
    int s = 0;  // lower level
    double estimate = 0.0;
    double se = 0.0;
};

// All Z(Z-1)/2 pairwise effects in outcome units, canonical order
// (2,1),(3,1),(3,2),(4,1),... Estimates are antisymmetric by construction:
// estimate(t,s) for t < s is the negated stored pair.
struct EffectTable {
    std::string estimator;
    int n_levels = 0;
    std::vector<PairEffect> pairs;
    // provenance
    int K = 0;  // 0 when subclassification is not involved
    std::string elimination;
    std::vector<std::string> adjustment;

    double estimate(int t, int s) const;
    double se(int t, int s) const;
    std::pair<double, double> ci95(int t, int s) const;  // estimate +/- 1.96 se
};

// Canonical (t, s) pair order for Z levels.
std::vector<std::pair<int, int>> level_pairs(int n_levels);

// Within-subclass regression detail: adjusted level means and their
// covariance, from the means model with treatment indicators and covariates.
struct SubclassEffect {
    int k = 0;
    Eigen::VectorXd alpha_hat;  // Z adjusted level means
    Eigen::MatrixXd sigma;      // Z x Z covariance of alpha_hat
    std::vector<PairEffect> pairs;
};

struct GlobalTest {
    double statistic = 0.0;
    int df1 = 0;
    int df2 = 0;
    double p_value = 1.0;
};

// Randomized-block F test for the exposure factor: full model has subclass
// indicators + treatment indicators (+ covariates), reduced drops the
// treatment block. Empty adjustment gives the block-ANOVA form.
GlobalTest global_test(const Dataset& data, const SubclassPartition& partition,
                       const ColumnSelection& adjustment);

// Subclass-weighted mean differences. The SE aggregates within-cell sample
// variances with squared subclass weights.
EffectTable estimate_subclass_means(const Dataset& data, const SubclassPartition& partition);

// Per-subclass OLS of outcome on Z treatment indicators (no intercept) plus
// adjustment covariates; pair effects are indicator contrasts, aggregated
// with weights w_k and SE sqrt(sum w_k^2 var_k).
std::pair<EffectTable, std::vector<SubclassEffect>> estimate_subclass_regression(
    const Dataset& data, const SubclassPartition& partition, const ColumnSelection& adjustment);

struct IptwResult {
    EffectTable table;
    int n_weights_above_10 = 0;
    double max_weight = 0.0;
    int bootstrap_b = 0;
    int resample_retries = 0;
};

// Normalized inverse-probability weighting with GPS weights from the fitted
// proportional-odds model. SEs are the standard deviation of the estimate
// over bootstrap_b nonparametric resamples, refitting the GPS in each one;
// a resample whose refit fails is redrawn (at most 10 retries each).
// bootstrap_b = 0 skips the bootstrap and reports zero SEs.
IptwResult estimate_iptw(const Dataset& data, const OrdinalFit& fit, int bootstrap_b,
                         std::uint64_t seed);

// Raw differences in level means, Welch-style SE.
EffectTable estimate_naive(const Dataset& data);

// One global OLS on treatment indicators (no intercept) plus covariates.
EffectTable estimate_standard_regression(const Dataset& data, const ColumnSelection& adjustment);

}  // namespace ordcausal
