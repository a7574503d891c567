#include "ordcausal/report.hpp"

#include <cstdio>
#include <sstream>

namespace ordcausal {

namespace {

std::string fmt3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

std::string render_balance_table(const BalanceMatrix& matrix) {
    std::ostringstream out;
    out << "| Covariate | tau (raw) | tau (subclass avg) |\n";
    out << "|---|---:|---:|\n";
    for (std::size_t p = 0; p < matrix.covariate_names.size(); ++p) {
        out << "| " << matrix.covariate_names[p] << " | "
            << (matrix.raw_flagged[p] ? std::string("-") : fmt3(matrix.tau_raw_p[p])) << " | "
            << fmt3(matrix.tau_bar_p[p]) << " |\n";
    }
    return out.str();
}

std::string render_effect_table(const EffectTable& table) {
    std::ostringstream out;
    out << "| Estimator |";
    for (const auto& p : table.pairs) out << " " << p.t << " v " << p.s << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < table.pairs.size(); ++i) out << "---:|";
    out << "\n| " << table.estimator;
    if (table.K > 0) out << " (K=" << table.K << ")";
    out << " |";
    for (const auto& p : table.pairs) {
        const auto [lo, hi] = table.ci95(p.t, p.s);
        const bool significant = lo > 0.0 || hi < 0.0;
        out << " " << fmt3(p.estimate) << " (" << fmt3(p.se) << ")"
            << (significant ? "**" : "") << " |";
    }
    out << "\n";
    return out.str();
}

std::string render_simulation_summary(const SimulationSummary& summary) {
    std::ostringstream out;
    out << "| Estimator | Average | Complete |";
    for (int t = 2; t <= summary.n_levels; ++t) out << " " << t << " v 1 |";
    out << "\n|---|---:|---:|";
    for (int t = 2; t <= summary.n_levels; ++t) out << "---:|";
    out << "\n";
    for (const auto& es : summary.estimators) {
        out << "| " << es.estimator << " | " << fmt3(es.average_coverage) << " | "
            << fmt3(es.complete_coverage) << " |";
        for (int t = 2; t <= summary.n_levels; ++t) {
            for (const auto& ps : es.pairs) {
                if (ps.t == t && ps.s == 1) {
                    out << " " << fmt3(ps.mean_bias) << " (" << fmt3(ps.sd_bias) << ") |";
                    break;
                }
            }
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace ordcausal
