#include "ordcausal/estimation.hpp"

#include <cmath>

#include "ordcausal/ordered_logit.hpp"
#include "ordcausal/prob.hpp"
#include "ordcausal/rng.hpp"

namespace ordcausal {

std::vector<std::pair<int, int>> level_pairs(int n_levels) {
    std::vector<std::pair<int, int>> pairs;
    for (int t = 2; t <= n_levels; ++t)
        for (int s = 1; s < t; ++s) pairs.emplace_back(t, s);
    return pairs;
}

namespace {

const PairEffect& find_pair(const EffectTable& table, int t, int s) {
    for (const auto& p : table.pairs)
        if (p.t == t && p.s == s) return p;
    throw InvalidArgument("EffectTable: no pair (" + std::to_string(t) + "," + std::to_string(s) +
                          ")");
}

// Build a table from per-level values: estimate(t,s) = value[t] - value[s].
EffectTable table_from_levels(const std::string& name, int n_levels,
                              const Eigen::VectorXd& level_value,
                              const std::vector<double>& pair_se) {
    EffectTable table;
    table.estimator = name;
    table.n_levels = n_levels;
    const auto pairs = level_pairs(n_levels);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [t, s] = pairs[i];
        table.pairs.push_back({t, s, level_value[t - 1] - level_value[s - 1], pair_se[i]});
    }
    return table;
}

struct CellStats {
    int n = 0;
    double mean = 0.0;
    double var = 0.0;  // sample variance, 0 when n < 2
};

// Welford accumulation: exact zero mean differences and variance on
// constant inputs, which the degenerate-outcome identities rely on.
CellStats cell_stats(const std::vector<double>& v) {
    CellStats s;
    s.n = static_cast<int>(v.size());
    if (s.n == 0) return s;
    double mean = 0.0, m2 = 0.0;
    int k = 0;
    for (double x : v) {
        ++k;
        const double delta = x - mean;
        mean += delta / k;
        m2 += delta * (x - mean);
    }
    s.mean = mean;
    if (s.n > 1) s.var = m2 / (s.n - 1);
    return s;
}

}  // namespace

double EffectTable::estimate(int t, int s) const {
    if (t == s) return 0.0;
    if (t > s) return find_pair(*this, t, s).estimate;
    return -find_pair(*this, s, t).estimate;
}

double EffectTable::se(int t, int s) const {
    if (t == s) return 0.0;
    return (t > s) ? find_pair(*this, t, s).se : find_pair(*this, s, t).se;
}

std::pair<double, double> EffectTable::ci95(int t, int s) const {
    const double est = estimate(t, s);
    const double sd = se(t, s);
    return {est - 1.96 * sd, est + 1.96 * sd};
}

GlobalTest global_test(const Dataset& data, const SubclassPartition& partition,
                       const ColumnSelection& adjustment) {
    const int n = data.n();
    const int K = partition.K;
    const int z = data.n_levels;
    const int p_adj = static_cast<int>(adjustment.size());

    // full: subclass indicators | treatment indicators (levels 2..Z) | covariates
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, K + (z - 1) + p_adj);
    Eigen::MatrixXd reduced = Eigen::MatrixXd::Zero(n, K + p_adj);
    for (int i = 0; i < n; ++i) {
        const int k = partition.subclass_of_row[i] - 1;
        full(i, k) = 1.0;
        reduced(i, k) = 1.0;
        if (data.t[i] >= 2) full(i, K + data.t[i] - 2) = 1.0;
        for (int j = 0; j < p_adj; ++j) {
            full(i, K + z - 1 + j) = data.x(i, adjustment[j]);
            reduced(i, K + j) = data.x(i, adjustment[j]);
        }
    }
    std::vector<int> protected_cols;
    for (int t = 0; t < z - 1; ++t) protected_cols.push_back(K + t);

    const OlsFit fit_full = fit_ols(data.y, full, protected_cols);
    const OlsFit fit_reduced = fit_ols(data.y, reduced);

    const int df1 = static_cast<int>(fit_full.retained_columns.size()) -
                    static_cast<int>(fit_reduced.retained_columns.size());
    if (df1 <= 0) throw RankDeficientDesign("global_test: exposure block adds no rank");

    GlobalTest test;
    test.df1 = df1;
    test.df2 = fit_full.dof;
    test.statistic = ((fit_reduced.rss - fit_full.rss) / df1) / (fit_full.rss / fit_full.dof);
    if (test.statistic < 0.0) test.statistic = 0.0;  // guard rounding
    test.p_value = f_sf(test.statistic, df1, test.df2);
    return test;
}

EffectTable estimate_subclass_means(const Dataset& data, const SubclassPartition& partition) {
    const int z = data.n_levels;
    const int K = partition.K;

    std::vector<std::vector<CellStats>> cells(K, std::vector<CellStats>(z));
    for (int k = 0; k < K; ++k) {
        std::vector<std::vector<double>> by_level(z);
        for (int r : partition.members[k]) by_level[data.t[r] - 1].push_back(data.y[r]);
        for (int t = 0; t < z; ++t) {
            if (by_level[t].empty())
                throw EmptyCell("estimate_subclass_means: empty cell at subclass " +
                                std::to_string(k + 1) + ", level " + std::to_string(t + 1));
            cells[k][t] = cell_stats(by_level[t]);
        }
    }

    EffectTable table;
    table.estimator = "subclass_means";
    table.n_levels = z;
    table.K = K;
    for (const auto [t, s] : level_pairs(z)) {
        double est = 0.0, var = 0.0;
        for (int k = 0; k < K; ++k) {
            const double w = partition.w_k[k];
            est += w * (cells[k][t - 1].mean - cells[k][s - 1].mean);
            var += w * w *
                   (cells[k][t - 1].var / cells[k][t - 1].n + cells[k][s - 1].var / cells[k][s - 1].n);
        }
        table.pairs.push_back({t, s, est, std::sqrt(var)});
    }
    return table;
}

std::pair<EffectTable, std::vector<SubclassEffect>> estimate_subclass_regression(
    const Dataset& data, const SubclassPartition& partition, const ColumnSelection& adjustment) {
    const int z = data.n_levels;
    const int K = partition.K;
    const int p_adj = static_cast<int>(adjustment.size());
    const auto pairs = level_pairs(z);

    std::vector<SubclassEffect> details;
    details.reserve(K);
    for (int k = 0; k < K; ++k) {
        const auto& rows = partition.members[k];
        const int nk = static_cast<int>(rows.size());
        for (int t = 0; t < z; ++t)
            if (partition.cell_counts(k, t) == 0)
                throw EmptyCell("estimate_subclass_regression: empty cell at subclass " +
                                std::to_string(k + 1) + ", level " + std::to_string(t + 1));

        Eigen::MatrixXd design = Eigen::MatrixXd::Zero(nk, z + p_adj);
        Eigen::VectorXd y(nk);
        for (int i = 0; i < nk; ++i) {
            const int r = rows[i];
            design(i, data.t[r] - 1) = 1.0;
            for (int j = 0; j < p_adj; ++j) design(i, z + j) = data.x(r, adjustment[j]);
            y[i] = data.y[r];
        }
        std::vector<int> protected_cols(z);
        for (int t = 0; t < z; ++t) protected_cols[t] = t;
        OlsFit ols;
        try {
            ols = fit_ols(y, design, protected_cols);
        } catch (const RankDeficientDesign&) {
            throw RankDeficientDesign(
                "estimate_subclass_regression: treatment indicator dropped in subclass " +
                std::to_string(k + 1));
        }

        SubclassEffect eff;
        eff.k = k + 1;
        eff.alpha_hat = ols.coef.head(z);
        eff.sigma = ols.vcov.topLeftCorner(z, z);
        for (const auto [t, s] : pairs) {
            const double var =
                eff.sigma(t - 1, t - 1) + eff.sigma(s - 1, s - 1) - 2.0 * eff.sigma(t - 1, s - 1);
            eff.pairs.push_back(
                {t, s, eff.alpha_hat[t - 1] - eff.alpha_hat[s - 1], std::sqrt(std::max(var, 0.0))});
        }
        details.push_back(std::move(eff));
    }

    EffectTable table;
    table.estimator = "subclass_regression";
    table.n_levels = z;
    table.K = K;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        double est = 0.0, var = 0.0;
        for (int k = 0; k < K; ++k) {
            const double w = partition.w_k[k];
            est += w * details[k].pairs[i].estimate;
            var += w * w * details[k].pairs[i].se * details[k].pairs[i].se;
        }
        table.pairs.push_back({pairs[i].first, pairs[i].second, est, std::sqrt(var)});
    }
    return {table, details};
}

namespace {

// Normalized weighted level means per the ratio form of the IPTW estimator,
// accumulated as a running weighted mean so constant weights reduce to the
// plain group mean computation step for step.
Eigen::VectorXd iptw_level_means(const Dataset& data, const OrdinalFit& fit,
                                 int* n_large_weights, double* max_weight) {
    const int z = data.n_levels;
    const Eigen::MatrixXd x = select_columns(data, fit.columns);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(z), wsum = Eigen::VectorXd::Zero(z);
    for (int i = 0; i < data.n(); ++i) {
        const Eigen::VectorXd probs = predict_category_probs(fit, x.row(i).transpose());
        const double r = probs[data.t[i] - 1];
        if (r <= 0.0)
            throw ZeroProbability("estimate_iptw: zero GPS for unit " +
                                  std::to_string(data.ids[i]));
        const double w = 1.0 / r;
        if (n_large_weights && w > 10.0) ++(*n_large_weights);
        if (max_weight) *max_weight = std::max(*max_weight, w);
        const int lvl = data.t[i] - 1;
        wsum[lvl] += w;
        mean[lvl] += ((data.y[i] - mean[lvl]) * w) / wsum[lvl];
    }
    for (int t = 0; t < z; ++t)
        if (wsum[t] == 0.0)
            throw EmptyLevel("estimate_iptw: no units at level " + std::to_string(t + 1));
    return mean;
}

}  // namespace

IptwResult estimate_iptw(const Dataset& data, const OrdinalFit& fit, int bootstrap_b,
                         std::uint64_t seed) {
    const int z = data.n_levels;
    const int n = data.n();
    const auto pairs = level_pairs(z);

    IptwResult result;
    result.bootstrap_b = bootstrap_b;
    const Eigen::VectorXd means =
        iptw_level_means(data, fit, &result.n_weights_above_10, &result.max_weight);

    std::vector<std::vector<double>> boot(pairs.size());
    for (int b = 0; b < bootstrap_b; ++b) {
        bool done = false;
        for (int retry = 0; retry <= 10 && !done; ++retry) {
            Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(b), retry, 0x1b00ULL);
            std::vector<int> draw(n);
            for (int i = 0; i < n; ++i) draw[i] = rng.uniform_int(0, n - 1);
            Dataset resample = data.subset(draw);
            for (int i = 0; i < n; ++i) resample.ids[i] = i;  // resampled rows get fresh ids
            try {
                const OrdinalFit refit = fit_ordered_logit(resample, fit.columns);
                if (!refit.converged) throw NonConvergence("bootstrap refit did not converge");
                const Eigen::VectorXd m = iptw_level_means(resample, refit, nullptr, nullptr);
                for (std::size_t i = 0; i < pairs.size(); ++i)
                    boot[i].push_back(m[pairs[i].first - 1] - m[pairs[i].second - 1]);
                done = true;
            } catch (const NonConvergence&) {
                ++result.resample_retries;
            } catch (const SeparationDetected&) {
                ++result.resample_retries;
            } catch (const RankDeficientDesign&) {
                ++result.resample_retries;
            } catch (const EmptyLevel&) {
                ++result.resample_retries;
            } catch (const ZeroProbability&) {
                ++result.resample_retries;
            }
        }
        if (!done)
            throw NonConvergence("estimate_iptw: bootstrap resample " + std::to_string(b) +
                                 " failed after 10 retries");
    }

    std::vector<double> ses(pairs.size(), 0.0);
    if (bootstrap_b > 1) {
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            double mean = 0.0;
            for (double v : boot[i]) mean += v;
            mean /= bootstrap_b;
            double ss = 0.0;
            for (double v : boot[i]) ss += (v - mean) * (v - mean);
            ses[i] = std::sqrt(ss / (bootstrap_b - 1));
        }
    }
    result.table = table_from_levels("iptw", z, means, ses);
    return result;
}

EffectTable estimate_naive(const Dataset& data) {
    const int z = data.n_levels;
    std::vector<std::vector<double>> by_level(z);
    for (int i = 0; i < data.n(); ++i) by_level[data.t[i] - 1].push_back(data.y[i]);

    Eigen::VectorXd means(z);
    std::vector<CellStats> stats(z);
    for (int t = 0; t < z; ++t) {
        if (by_level[t].empty())
            throw EmptyLevel("estimate_naive: no units at level " + std::to_string(t + 1));
        stats[t] = cell_stats(by_level[t]);
        means[t] = stats[t].mean;
    }
    const auto pairs = level_pairs(z);
    std::vector<double> ses;
    ses.reserve(pairs.size());
    for (const auto [t, s] : pairs)
        ses.push_back(std::sqrt(stats[t - 1].var / stats[t - 1].n + stats[s - 1].var / stats[s - 1].n));
    return table_from_levels("naive", z, means, ses);
}

EffectTable estimate_standard_regression(const Dataset& data, const ColumnSelection& adjustment) {
    const int z = data.n_levels;
    const int n = data.n();
    const int p_adj = static_cast<int>(adjustment.size());

    const std::vector<int> counts = data.level_counts();
    for (int t = 0; t < z; ++t)
        if (counts[t] == 0)
            throw EmptyLevel("estimate_standard_regression: no units at level " +
                             std::to_string(t + 1));

    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n, z + p_adj);
    for (int i = 0; i < n; ++i) {
        design(i, data.t[i] - 1) = 1.0;
        for (int j = 0; j < p_adj; ++j) design(i, z + j) = data.x(i, adjustment[j]);
    }
    std::vector<int> protected_cols(z);
    for (int t = 0; t < z; ++t) protected_cols[t] = t;
    const OlsFit ols = fit_ols(data.y, design, protected_cols);

    EffectTable table;
    table.estimator = "standard_regression";
    table.n_levels = z;
    for (const auto [t, s] : level_pairs(z)) {
        const double var =
            ols.vcov(t - 1, t - 1) + ols.vcov(s - 1, s - 1) - 2.0 * ols.vcov(t - 1, s - 1);
        table.pairs.push_back(
            {t, s, ols.coef[t - 1] - ols.coef[s - 1], std::sqrt(std::max(var, 0.0))});
    }
    return table;
}

}  // namespace ordcausal
