#include "ordcausal/design.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace ordcausal {

std::string to_string(EliminationRule rule) {
    switch (rule) {
        case EliminationRule::E1: return "E1";
        case EliminationRule::E2: return "E2";
        case EliminationRule::E3: return "E3";
    }
    return "E1";
}

EliminationRule elimination_from_string(const std::string& s) {
    if (s == "E1") return EliminationRule::E1;
    if (s == "E2") return EliminationRule::E2;
    if (s == "E3") return EliminationRule::E3;
    throw InvalidArgument("unknown elimination rule: " + s);
}

namespace {

// Intersection over treatment levels of per-level [min, max] of `values`.
std::pair<double, double> overlap_interval(const Eigen::VectorXd& values,
                                           const std::vector<int>& t, int n_levels) {
    std::vector<double> lo(n_levels, std::numeric_limits<double>::infinity());
    std::vector<double> hi(n_levels, -std::numeric_limits<double>::infinity());
    for (int i = 0; i < values.size(); ++i) {
        lo[t[i] - 1] = std::min(lo[t[i] - 1], values[i]);
        hi[t[i] - 1] = std::max(hi[t[i] - 1], values[i]);
    }
    double l = -std::numeric_limits<double>::infinity();
    double u = std::numeric_limits<double>::infinity();
    for (int z = 0; z < n_levels; ++z) {
        l = std::max(l, lo[z]);
        u = std::min(u, hi[z]);
    }
    return {l, u};
}

void ensure_all_levels(const Dataset& data, const char* stage) {
    const std::vector<int> counts = data.level_counts();
    for (int z = 0; z < data.n_levels; ++z)
        if (counts[z] == 0)
            throw EmptySupport(std::string(stage) + " eliminated every unit at level " +
                               std::to_string(z + 1));
}

}  // namespace

std::pair<Dataset, SupportReport> trim_common_support(const Dataset& data, const OrdinalFit& fit,
                                                      EliminationRule rule,
                                                      const ColumnSelection& continuous_columns) {
    SupportReport report;
    if (rule == EliminationRule::E1) {
        report.retained_n = data.n();
        report.refit = fit;
        return {data, report};
    }

    Dataset current = data;
    if (rule == EliminationRule::E3) {
        // Covariate overlap first, then the linear-predictor rule on a refit.
        std::vector<std::pair<double, double>> bounds;
        bounds.reserve(continuous_columns.size());
        for (int c : continuous_columns)
            bounds.push_back(overlap_interval(current.x.col(c), current.t, current.n_levels));
        std::vector<int> keep;
        for (int i = 0; i < current.n(); ++i) {
            bool inside = true;
            for (std::size_t j = 0; j < continuous_columns.size(); ++j) {
                const double v = current.x(i, continuous_columns[j]);
                if (v < bounds[j].first || v > bounds[j].second) {
                    inside = false;
                    break;
                }
            }
            if (inside)
                keep.push_back(i);
            else
                report.dropped.emplace_back(current.ids[i], DropReason::covariate_outside_overlap);
        }
        current = current.subset(keep);
        ensure_all_levels(current, "E3 covariate trimming");
    }

    // Linear-predictor overlap computed on the fit at hand: the incoming fit
    // for E2, the post-covariate-trim refit for E3.
    OrdinalFit stage_fit = fit;
    if (rule == EliminationRule::E3) stage_fit = fit_ordered_logit(current, fit.columns);

    const Eigen::VectorXd lp = linear_predictors(stage_fit, current);
    const auto [lo, hi] = overlap_interval(lp, current.t, current.n_levels);
    std::vector<int> keep;
    for (int i = 0; i < current.n(); ++i) {
        if (lp[i] < lo || lp[i] > hi)
            report.dropped.emplace_back(current.ids[i], DropReason::lp_outside_overlap);
        else
            keep.push_back(i);
    }
    current = current.subset(keep);
    ensure_all_levels(current, "linear-predictor trimming");

    report.refit = fit_ordered_logit(current, fit.columns);
    report.retained_n = current.n();
    return {current, report};
}

SubclassPartition subclassify(const Dataset& data, const Eigen::VectorXd& scores, int K) {
    const int n = data.n();
    if (K < 1) throw InvalidArgument("subclassify: K must be >= 1");
    if (scores.size() != n) throw InvalidArgument("subclassify: score length mismatch");
    if (n < K) throw InvalidArgument("subclassify: need n >= K");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return data.ids[a] < data.ids[b];
    });

    SubclassPartition part;
    part.K = K;
    part.n_levels = data.n_levels;
    part.unit_ids = data.ids;
    part.subclass_of_row.assign(n, 0);
    part.members.resize(K);
    part.n_k.assign(K, 0);
    part.w_k.assign(K, 0.0);
    part.cell_counts = Eigen::MatrixXi::Zero(K, data.n_levels);

    const int base = n / K;
    const int remainder = n % K;
    int pos = 0;
    for (int k = 0; k < K; ++k) {
        const int size = base + (k < remainder ? 1 : 0);
        part.members[k].reserve(size);
        for (int j = 0; j < size; ++j) {
            const int row = order[pos + j];
            part.subclass_of_row[row] = k + 1;
            part.members[k].push_back(row);
            ++part.cell_counts(k, data.t[row] - 1);
        }
        part.n_k[k] = size;
        part.w_k[k] = static_cast<double>(size) / n;
        if (k > 0) {
            const double upper_prev = scores[order[pos - 1]];
            const double lower_this = scores[order[pos]];
            part.boundaries.push_back(0.5 * (upper_prev + lower_this));
        }
        pos += size;
    }
    return part;
}

int SubclassPartition::subclass_of_id(int id) const {
    for (std::size_t i = 0; i < unit_ids.size(); ++i)
        if (unit_ids[i] == id) return subclass_of_row[i];
    throw InvalidArgument("subclass_of_id: unknown unit id " + std::to_string(id));
}

PartitionValidation validate_partition(const SubclassPartition& partition, int n_levels, int p) {
    PartitionValidation v;
    const int cell_min = 3 + n_levels;
    for (int k = 0; k < partition.K; ++k) {
        for (int z = 0; z < n_levels; ++z)
            if (partition.cell_counts(k, z) < cell_min) v.violating_cells.emplace_back(k + 1, z + 1);
        if (partition.n_k[k] <= p + n_levels) v.violating_subclasses.push_back(k + 1);
    }
    v.pass = v.violating_cells.empty() && v.violating_subclasses.empty();
    return v;
}

int max_feasible_K(const Dataset& data, const Eigen::VectorXd& scores, int n_levels, int p,
                   int k_max) {
    if (k_max < 1) throw InvalidArgument("max_feasible_K: K_max must be >= 1");
    for (int k = std::min(k_max, data.n()); k >= 1; --k) {
        const SubclassPartition part = subclassify(data, scores, k);
        if (validate_partition(part, n_levels, p).pass) return k;
    }
    return 0;
}

}  // namespace ordcausal
