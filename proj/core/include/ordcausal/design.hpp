#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ordcausal/dataset.hpp"
#include "ordcausal/ordered_logit.hpp"

namespace ordcausal {

// Common-support subject elimination.
//   E1: keep everyone.
//   E2: drop units whose linear predictor falls outside the intersection of
//       the per-level score ranges, then refit once.
//   E3: first drop units with any continuous covariate outside the per-level
//       range intersection, refit, then apply the E2 rule.
enum class EliminationRule { E1, E2, E3 };

std::string to_string(EliminationRule rule);
EliminationRule elimination_from_string(const std::string& s);

enum class DropReason { lp_outside_overlap, covariate_outside_overlap };

struct SupportReport {
    std::vector<std::pair<int, DropReason>> dropped;  // (unit id, reason)
    int retained_n = 0;
    OrdinalFit refit;  // the fit downstream stages use
};

// Equal-frequency split of the retained units on the balancing score.
// Subclass indices run 1..K; remainder units go to the lowest-score blocks
// and score ties break by ascending unit id.
struct SubclassPartition {
    int K = 0;
    int n_levels = 0;
    std::vector<int> unit_ids;              // dataset row order
    std::vector<int> subclass_of_row;       // 1..K per row
    std::vector<std::vector<int>> members;  // row indices per subclass
    std::vector<double> boundaries;         // K-1 midpoints between blocks
    std::vector<int> n_k;
    std::vector<double> w_k;  // n_k / n
    Eigen::MatrixXi cell_counts;  // K x Z

    int subclass_of_id(int id) const;
};

struct PartitionValidation {
    bool pass = false;
    std::vector<std::pair<int, int>> violating_cells;  // (k, t), cells below 3+Z
    std::vector<int> violating_subclasses;             // k with n_k <= p+Z
};

// Throws EmptySupport if any treatment level loses all its units.
std::pair<Dataset, SupportReport> trim_common_support(const Dataset& data, const OrdinalFit& fit,
                                                      EliminationRule rule,
                                                      const ColumnSelection& continuous_columns);

SubclassPartition subclassify(const Dataset& data, const Eigen::VectorXd& scores, int K);

// Checks (i) every (subclass, level) cell has at least 3+Z units and
// (ii) every subclass has more than p+Z units.
PartitionValidation validate_partition(const SubclassPartition& partition, int n_levels, int p);

// Largest K <= k_max whose partition validates; 0 when none does.
int max_feasible_K(const Dataset& data, const Eigen::VectorXd& scores, int n_levels, int p,
                   int k_max);

}  // namespace ordcausal
