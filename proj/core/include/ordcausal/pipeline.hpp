#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ordcausal/balance.hpp"
#include "ordcausal/config.hpp"
#include "ordcausal/estimation.hpp"
#include "ordcausal/simulation.hpp"

namespace ordcausal {

// Full design -> balance gate -> estimation run for one elimination rule.
struct AnalysisReport {
    Json provenance;  // config echo, config hash, seed, version
    int rows_read = 0;
    int rows_dropped_missing = 0;
    int n_ingested = 0;
    OrdinalFit gps_fit;       // on the full ingested sample
    SupportReport support;    // trimming trace; refit drives everything below
    int n_retained = 0;

    struct KResult {
        int K = 0;
        SubclassPartition partition;
        PartitionValidation validation;
        BalanceMatrix balance;
        double significant_prop_at_alpha = 0.0;
        double significant_prop_001 = 0.0;
        bool gate_passed = false;
        std::string gate_note;
        PlotBundle plots;
        std::optional<GlobalTest> anova;
        std::map<std::string, GlobalTest> ancova;        // by adjustment label
        std::vector<EffectTable> effects;                // subclass estimators
    };
    std::vector<KResult> per_k;

    // K-independent estimators on the retained sample (estimation stage only)
    std::vector<EffectTable> sample_effects;  // naive, standard regression
    std::optional<IptwResult> iptw;

    bool any_estimation_ran = false;
};

struct SimulationRunReport {
    Json provenance;
    int rows_read = 0;
    int rows_dropped_missing = 0;
    int n_ingested = 0;
    struct SetResult {
        std::string set;  // set1 | set2
        Eigen::MatrixXd true_pate;
        SimulationSummary summary;
    };
    std::vector<SetResult> sets;
};

// mode=analyze runs the gate and, where it passes, global tests and effect
// tables; mode=audit stops after the balance audit. Module errors propagate
// with a "[stage]" prefix on the message.
AnalysisReport run_analysis(const RunConfig& config);

// Builds the configured potential-outcome sets from the ingested base data
// and runs the replication study on each.
SimulationRunReport run_simulation(const RunConfig& config);

Json report_to_json(const AnalysisReport& report);
Json report_to_json(const SimulationRunReport& report);
std::string report_to_markdown(const AnalysisReport& report);
std::string report_to_markdown(const SimulationRunReport& report);

extern const char* const kVersion;

}  // namespace ordcausal
