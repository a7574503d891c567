#include "ordcausal/balance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ordcausal/prob.hpp"

namespace ordcausal {

namespace {

// Sums over tie groups of sorted values: sum g(g-1)/2, g(g-1)(2g+5),
// g(g-1)(g-2) for the tau-b denominator and the null variance of S.
struct TieSums {
    long long pairs = 0;
    long long v_term = 0;
    double triples = 0.0;
    double doubles = 0.0;
};

TieSums tie_sums(const std::vector<double>& sorted) {
    TieSums s;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const long long g = static_cast<long long>(j - i);
        s.pairs += g * (g - 1) / 2;
        s.v_term += g * (g - 1) * (2 * g + 5);
        s.doubles += static_cast<double>(g) * (g - 1);
        s.triples += static_cast<double>(g) * (g - 1) * (g - 2);
        i = j;
    }
    return s;
}

// Counts inversions by b (strictly decreasing pairs) with a stable merge.
long long merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                      std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = (lo + hi) / 2;
    long long inv = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            inv += static_cast<long long>(mid - i);
            buf[k++] = v[j++];
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
    return inv;
}

}  // namespace

TauResult kendall_tau_b(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw InvalidArgument("kendall_tau_b: length mismatch");
    if (n < 2) throw InvalidArgument("kendall_tau_b: need at least 2 observations");
    if (std::equal(a.begin() + 1, a.end(), a.begin()) ||
        std::equal(b.begin() + 1, b.end(), b.begin()))
        throw ConstantVector("kendall_tau_b: constant input vector");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        if (a[i] != a[j]) return a[i] < a[j];
        return b[i] < b[j];
    });

    // ties in a and joint (a, b) ties
    long long n1 = 0, n3 = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i + 1;
            while (j < n && a[order[j]] == a[order[i]]) ++j;
            const long long g = static_cast<long long>(j - i);
            n1 += g * (g - 1) / 2;
            std::size_t u = i;
            while (u < j) {
                std::size_t v = u + 1;
                while (v < j && b[order[v]] == b[order[u]]) ++v;
                const long long gg = static_cast<long long>(v - u);
                n3 += gg * (gg - 1) / 2;
                u = v;
            }
            i = j;
        }
    }

    std::vector<double> bs(n);
    for (std::size_t i = 0; i < n; ++i) bs[i] = b[order[i]];
    std::vector<double> buf(n);
    const long long discordant = merge_count(bs, buf, 0, n);  // bs now sorted

    const TieSums ta = tie_sums([&] {
        std::vector<double> s(a);
        std::sort(s.begin(), s.end());
        return s;
    }());
    const TieSums tb = tie_sums(bs);

    const long long n0 = static_cast<long long>(n) * (n - 1) / 2;
    const long long n2 = tb.pairs;
    const long long s_stat = (n0 - n1 - n2 + n3) - 2 * discordant;

    TauResult res;
    res.n = static_cast<int>(n);
    res.s = s_stat;
    res.tau = static_cast<double>(s_stat) /
              std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));

    const double dn = static_cast<double>(n);
    double var = (dn * (dn - 1.0) * (2.0 * dn + 5.0) - ta.v_term - tb.v_term) / 18.0;
    var += ta.doubles * tb.doubles / (2.0 * dn * (dn - 1.0));
    if (n > 2) var += ta.triples * tb.triples / (9.0 * dn * (dn - 1.0) * (dn - 2.0));
    res.z = (var > 0.0) ? s_stat / std::sqrt(var) : 0.0;
    res.p_value = normal_two_sided_p(res.z);
    return res;
}

namespace {

bool is_constant(const std::vector<double>& v) {
    return std::equal(v.begin() + 1, v.end(), v.begin());
}

}  // namespace

BalanceMatrix balance_audit(const Dataset& data, const SubclassPartition& partition,
                            const ColumnSelection& columns) {
    if (static_cast<int>(partition.subclass_of_row.size()) != data.n())
        throw InvalidArgument("balance_audit: partition does not cover the dataset");

    const int K = partition.K;
    BalanceMatrix m;
    m.w_k = partition.w_k;

    std::vector<double> t_all(data.n());
    for (int i = 0; i < data.n(); ++i) t_all[i] = data.t[i];

    for (int c : columns) {
        m.covariate_names.push_back(data.covariate_names[c]);
        std::vector<double> x_all(data.n());
        for (int i = 0; i < data.n(); ++i) x_all[i] = data.x(i, c);

        if (is_constant(x_all) || is_constant(t_all)) {
            m.raw_flagged.push_back(true);
            m.tau_raw_p.push_back(0.0);
        } else {
            m.raw_flagged.push_back(false);
            m.tau_raw_p.push_back(kendall_tau_b(x_all, t_all).tau);
        }

        std::vector<BalanceCell> row(K);
        double weighted = 0.0, weight_sum = 0.0;
        for (int k = 0; k < K; ++k) {
            std::vector<double> xv, tv;
            xv.reserve(partition.members[k].size());
            tv.reserve(partition.members[k].size());
            for (int r : partition.members[k]) {
                xv.push_back(data.x(r, c));
                tv.push_back(static_cast<double>(data.t[r]));
            }
            if (xv.size() < 2 || is_constant(xv) || is_constant(tv)) {
                row[k].flagged = true;
                continue;
            }
            row[k].result = kendall_tau_b(xv, tv);
            weighted += row[k].result.tau * partition.w_k[k];
            weight_sum += partition.w_k[k];
        }
        m.tau_pk.push_back(std::move(row));
        // flagged cells are excluded with weight renormalization
        m.tau_bar_p.push_back(weight_sum > 0.0 ? weighted / weight_sum : 0.0);
    }
    return m;
}

double significant_proportion(const BalanceMatrix& matrix, double alpha) {
    if (alpha <= 0.0 || alpha >= 1.0)
        throw InvalidArgument("significant_proportion: alpha outside (0,1)");
    long long total = 0, significant = 0;
    for (const auto& row : matrix.tau_pk) {
        for (const auto& cell : row) {
            if (cell.flagged) continue;
            ++total;
            if (cell.result.p_value < alpha) ++significant;
        }
    }
    return total > 0 ? static_cast<double>(significant) / total : 0.0;
}

FiveNumberSummary five_number_summary(std::vector<double> values) {
    FiveNumberSummary s;
    s.n = static_cast<int>(values.size());
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    auto quantile = [&](double p) {
        const double h = p * (values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        if (lo + 1 >= values.size()) return values.back();
        return values[lo] + (h - lo) * (values[lo + 1] - values[lo]);
    };
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr;
    const double hi_fence = s.q3 + 1.5 * iqr;
    for (double v : values)
        if (v < lo_fence || v > hi_fence) s.outliers.push_back(v);
    return s;
}

PlotBundle emit_plot_data(const Dataset& data, const SubclassPartition& partition,
                          const OrdinalFit& fit, const ColumnSelection& columns) {
    PlotBundle bundle;
    const Eigen::VectorXd lp = linear_predictors(fit, data);

    for (int k = 0; k < partition.K; ++k) {
        for (int z = 1; z <= data.n_levels; ++z) {
            std::vector<double> lp_cell;
            std::vector<std::pair<int, std::vector<double>>> cov_cells;
            for (int c : columns)
                if (data.covariate_types[c] == ColumnType::numeric) cov_cells.emplace_back(c, std::vector<double>{});
            for (int r : partition.members[k]) {
                if (data.t[r] != z) continue;
                lp_cell.push_back(lp[r]);
                for (auto& [c, vals] : cov_cells) vals.push_back(data.x(r, c));
            }
            if (lp_cell.empty()) continue;
            bundle.boxes.push_back(
                {k + 1, z, "linear_predictor", five_number_summary(lp_cell)});
            for (auto& [c, vals] : cov_cells)
                bundle.boxes.push_back(
                    {k + 1, z, data.covariate_names[c], five_number_summary(std::move(vals))});
        }
    }

    const BalanceMatrix audit = balance_audit(data, partition, columns);
    for (std::size_t j = 0; j < audit.covariate_names.size(); ++j)
        bundle.love.push_back({audit.covariate_names[j], audit.tau_raw_p[j], audit.tau_bar_p[j]});
    for (const auto& row : audit.tau_pk)
        for (const auto& cell : row)
            if (!cell.flagged) bundle.z_stats.push_back(cell.result.z);
    return bundle;
}

}  // namespace ordcausal
