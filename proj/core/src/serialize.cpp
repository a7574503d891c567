#include "ordcausal/serialize.hpp"

#include <algorithm>

namespace ordcausal {

namespace {

Json vector_to_json(const Eigen::VectorXd& v) {
    Json arr = Json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

}  // namespace

Json to_json(const OrdinalFit& fit) {
    Json j;
    j["model"] = "ordered_logit";
    j["n_levels"] = fit.n_levels;
    j["theta"] = vector_to_json(fit.theta);
    j["beta"] = vector_to_json(fit.beta);
    j["columns"] = fit.columns;
    j["loglik"] = fit.loglik;
    j["grad_norm"] = fit.grad_norm;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    return j;
}

Json to_json(const SupportReport& report) {
    Json dropped = Json::array();
    auto sorted = report.dropped;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [id, reason] : sorted) {
        Json d;
        d["id"] = id;
        d["reason"] = reason == DropReason::lp_outside_overlap ? "lp_outside_overlap"
                                                               : "covariate_outside_overlap";
        dropped.push_back(d);
    }
    Json j;
    j["dropped"] = dropped;
    j["dropped_n"] = static_cast<int>(report.dropped.size());
    j["retained_n"] = report.retained_n;
    j["refit"] = to_json(report.refit);
    return j;
}

Json to_json(const SubclassPartition& partition) {
    Json j;
    j["K"] = partition.K;
    j["n_k"] = partition.n_k;
    j["w_k"] = partition.w_k;
    j["boundaries"] = partition.boundaries;
    Json cells = Json::array();
    for (int k = 0; k < partition.K; ++k) {
        Json row = Json::array();
        for (int z = 0; z < partition.cell_counts.cols(); ++z)
            row.push_back(partition.cell_counts(k, z));
        cells.push_back(row);
    }
    j["cell_counts"] = cells;
    // assignment keyed by unit id, ascending
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(partition.unit_ids.size());
    for (std::size_t i = 0; i < partition.unit_ids.size(); ++i)
        pairs.emplace_back(partition.unit_ids[i], partition.subclass_of_row[i]);
    std::sort(pairs.begin(), pairs.end());
    Json assignment = Json::array();
    for (const auto& [id, k] : pairs) {
        Json a;
        a["id"] = id;
        a["subclass"] = k;
        assignment.push_back(a);
    }
    j["assignment"] = assignment;
    return j;
}

Json to_json(const PartitionValidation& validation) {
    Json j;
    j["pass"] = validation.pass;
    Json cells = Json::array();
    for (const auto& [k, t] : validation.violating_cells) {
        Json c;
        c["subclass"] = k;
        c["level"] = t;
        cells.push_back(c);
    }
    j["violating_cells"] = cells;
    j["violating_subclasses"] = validation.violating_subclasses;
    return j;
}

Json to_json(const TauResult& result) {
    Json j;
    j["tau"] = result.tau;
    j["z"] = result.z;
    j["p_value"] = result.p_value;
    j["n"] = result.n;
    j["s"] = result.s;
    return j;
}

Json to_json(const BalanceMatrix& matrix) {
    Json covariates = Json::array();
    for (std::size_t p = 0; p < matrix.covariate_names.size(); ++p) {
        Json c;
        c["covariate"] = matrix.covariate_names[p];
        if (matrix.raw_flagged[p])
            c["tau_raw"] = nullptr;
        else
            c["tau_raw"] = matrix.tau_raw_p[p];
        c["tau_bar"] = matrix.tau_bar_p[p];
        Json cells = Json::array();
        for (const auto& cell : matrix.tau_pk[p]) {
            if (cell.flagged) {
                Json e;
                e["flagged"] = true;
                cells.push_back(e);
            } else {
                Json e = to_json(cell.result);
                e["flagged"] = false;
                cells.push_back(e);
            }
        }
        c["subclasses"] = cells;
        covariates.push_back(c);
    }
    Json j;
    j["covariates"] = covariates;
    j["w_k"] = matrix.w_k;
    return j;
}

namespace {

Json to_json(const FiveNumberSummary& s) {
    Json j;
    j["min"] = s.min;
    j["q1"] = s.q1;
    j["median"] = s.median;
    j["q3"] = s.q3;
    j["max"] = s.max;
    j["n"] = s.n;
    j["outliers"] = s.outliers;
    return j;
}

}  // namespace

Json to_json(const PlotBundle& bundle) {
    Json boxes = Json::array();
    for (const auto& box : bundle.boxes) {
        Json b;
        b["subclass"] = box.k;
        b["level"] = box.t;
        b["variable"] = box.variable;
        b["summary"] = to_json(box.summary);
        boxes.push_back(b);
    }
    Json love = Json::array();
    for (const auto& rec : bundle.love) {
        Json l;
        l["covariate"] = rec.covariate;
        l["tau_raw"] = rec.tau_raw;
        l["tau_bar"] = rec.tau_bar;
        love.push_back(l);
    }
    Json j;
    j["boxplots"] = boxes;
    j["love_plot"] = love;
    j["z_statistics"] = bundle.z_stats;
    return j;
}

Json to_json(const GlobalTest& test) {
    Json j;
    j["statistic"] = test.statistic;
    j["df1"] = test.df1;
    j["df2"] = test.df2;
    j["p_value"] = test.p_value;
    return j;
}

Json to_json(const EffectTable& table) {
    Json pairs = Json::array();
    for (const auto& p : table.pairs) {
        Json e;
        e["t"] = p.t;
        e["s"] = p.s;
        e["estimate"] = p.estimate;
        e["se"] = p.se;
        const auto [lo, hi] = table.ci95(p.t, p.s);
        e["ci95"] = Json::array({lo, hi});
        pairs.push_back(e);
    }
    Json j;
    j["estimator"] = table.estimator;
    j["n_levels"] = table.n_levels;
    Json meta;
    meta["K"] = table.K;
    meta["elimination"] = table.elimination;
    meta["adjustment"] = table.adjustment;
    j["metadata"] = meta;
    j["pairs"] = pairs;
    return j;
}

Json to_json(const IptwResult& result) {
    Json j = to_json(result.table);
    Json diag;
    diag["n_weights_above_10"] = result.n_weights_above_10;
    diag["max_weight"] = result.max_weight;
    diag["bootstrap_b"] = result.bootstrap_b;
    diag["resample_retries"] = result.resample_retries;
    j["weight_diagnostics"] = diag;
    return j;
}

Json to_json(const SimulationSummary& summary) {
    Json estimators = Json::array();
    for (const auto& es : summary.estimators) {
        Json e;
        e["estimator"] = es.estimator;
        e["average_coverage"] = es.average_coverage;
        e["complete_coverage"] = es.complete_coverage;
        Json pairs = Json::array();
        for (const auto& ps : es.pairs) {
            Json p;
            p["t"] = ps.t;
            p["s"] = ps.s;
            p["mean_bias"] = ps.mean_bias;
            p["sd_bias"] = ps.sd_bias;
            pairs.push_back(p);
        }
        e["pairs"] = pairs;
        estimators.push_back(e);
    }
    Json j;
    j["M"] = summary.M;
    j["n_levels"] = summary.n_levels;
    j["completed"] = summary.completed;
    j["failed_replications"] = summary.failed_replications;
    j["total_retries"] = summary.total_retries;
    j["estimators"] = estimators;
    return j;
}

}  // namespace ordcausal
