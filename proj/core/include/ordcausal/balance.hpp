#pragma once

#include <string>
#include <vector>

#include "ordcausal/dataset.hpp"
#include "ordcausal/design.hpp"

namespace ordcausal {

// Tie-corrected Kendall rank correlation with its normal test statistic.
struct TauResult {
    double tau = 0.0;
    double z = 0.0;
    double p_value = 1.0;
    int n = 0;
    long long s = 0;  // concordant minus discordant pairs
};

// O(n log n) merge-sort counting with explicit tie blocks; z uses the
// tie-adjusted null variance of S and p is two-sided normal.
// Throws ConstantVector when either input has no variation.
TauResult kendall_tau_b(const std::vector<double>& a, const std::vector<double>& b);

struct BalanceCell {
    TauResult result;
    bool flagged = false;  // covariate (or exposure) constant in this cell
};

// Per-covariate dependence with the exposure: raw, within each subclass,
// and the subclass-size-weighted average over non-flagged cells.
struct BalanceMatrix {
    std::vector<std::string> covariate_names;
    std::vector<std::vector<BalanceCell>> tau_pk;  // [covariate][subclass]
    std::vector<double> tau_bar_p;
    std::vector<double> tau_raw_p;
    std::vector<bool> raw_flagged;
    std::vector<double> w_k;
};

BalanceMatrix balance_audit(const Dataset& data, const SubclassPartition& partition,
                            const ColumnSelection& columns);

// Fraction of non-flagged within-subclass cells with p-value below alpha.
double significant_proportion(const BalanceMatrix& matrix, double alpha);

struct FiveNumberSummary {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
    std::vector<double> outliers;  // beyond 1.5 IQR whiskers
    int n = 0;
};

FiveNumberSummary five_number_summary(std::vector<double> values);

// Plot-ready data: per-cell boxplot summaries of the balancing score and the
// continuous covariates, Love-plot pairs, and the z statistics feeding the
// normality histograms.
struct PlotBundle {
    struct CellBox {
        int k = 0;  // subclass, 1-based
        int t = 0;  // treatment level
        std::string variable;
        FiveNumberSummary summary;
    };
    struct LoveRecord {
        std::string covariate;
        double tau_raw = 0.0;
        double tau_bar = 0.0;
    };
    std::vector<CellBox> boxes;
    std::vector<LoveRecord> love;
    std::vector<double> z_stats;
};

PlotBundle emit_plot_data(const Dataset& data, const SubclassPartition& partition,
                          const OrdinalFit& fit, const ColumnSelection& columns);

}  // namespace ordcausal
