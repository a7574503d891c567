#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ordcausal/dataset.hpp"
#include "ordcausal/design.hpp"
#include "ordcausal/estimation.hpp"

namespace ordcausal {

// A dataset together with every unit's full set of potential outcomes and
// the implied ground-truth pairwise effects.
struct FullPotentialData {
    Dataset base;
    Eigen::MatrixXd po;         // n x Z, po(i, t-1) = Y_i(t)
    Eigen::MatrixXd true_pate;  // Z x Z antisymmetric
};

// Null construction: every potential outcome equals the observed outcome.
FullPotentialData impute_set1(const Dataset& data);

// Nonzero-effect construction: project units on the leading principal
// component of the selected covariates and impute each missing potential
// outcome from the nearest donor (by |PC1 difference|, ties to lowest id)
// observed at that level. With use_correlation the components come from the
// correlation matrix (standardized covariates); otherwise the covariance.
FullPotentialData impute_set2(const Dataset& data, const ColumnSelection& pca_columns,
                              bool use_correlation = true);

// Leading-eigenvector scores with the sign canonicalized so the largest
// absolute loading is positive. Exposed for verification.
Eigen::VectorXd pc1_scores(const Dataset& data, const ColumnSelection& pca_columns,
                           bool use_correlation);

// One simulated dataset: fit a baseline-category logit of the observed
// exposure on a random covariate subset, redraw each unit's exposure from
// its fitted probabilities, and read the outcome off the potential-outcome
// matrix. Covariates are returned intact. Throws NonConvergence when the
// assignment model fails; callers redraw with a derived sub-seed.
Dataset simulate_replication(const FullPotentialData& full, int n_covariates, std::uint64_t seed);

enum class EstimatorKind { subclass_means, subclass_regression, naive, standard_regression, iptw };

struct EstimatorSpec {
    EstimatorKind kind;
    int K = 0;  // subclass estimators only
    std::string label() const;
};

struct StudyConfig {
    EliminationRule elimination = EliminationRule::E1;
    ColumnSelection gps_columns;         // empty = all covariates
    ColumnSelection adjustment_columns;  // regression estimators
    ColumnSelection continuous_columns;  // E3 covariate trimming
    int n_sim_covariates = 15;
    int bootstrap_b = 200;
    int max_retries = 10;
    int threads = 0;  // 0 = library default
};

struct ReplicationResult {
    int m = 0;
    std::map<std::string, EffectTable> tables;              // by estimator label
    std::map<std::string, std::vector<double>> bias;        // canonical pair order
    std::map<std::string, std::vector<int>> coverage;       // 0/1 per pair
    std::map<std::string, int> allcoverage;                 // 0/1
};

struct SimulationSummary {
    struct PairStat {
        int t = 0, s = 0;
        double mean_bias = 0.0;
        double sd_bias = 0.0;
    };
    struct EstimatorSummary {
        std::string estimator;
        std::vector<PairStat> pairs;
        double average_coverage = 0.0;
        double complete_coverage = 0.0;
    };
    int M = 0;
    int n_levels = 0;
    int completed = 0;
    int failed_replications = 0;
    long long total_retries = 0;
    std::vector<EstimatorSummary> estimators;
};

// Runs M replications, each on its own seed-derived RNG stream so the
// summary is identical for a fixed seed regardless of worker count.
SimulationSummary run_study(const FullPotentialData& full,
                            const std::vector<EstimatorSpec>& estimators, int M,
                            const StudyConfig& config, std::uint64_t seed);

// All estimators on one simulated dataset; used by run_study and tests.
ReplicationResult run_replication(const FullPotentialData& full,
                                  const std::vector<EstimatorSpec>& estimators,
                                  const StudyConfig& config, std::uint64_t seed, int m);

}  // namespace ordcausal
