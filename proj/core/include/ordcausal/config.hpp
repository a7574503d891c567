#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ordcausal/design.hpp"
#include "ordcausal/ingest.hpp"
#include "ordcausal/serialize.hpp"
#include "ordcausal/simulation.hpp"

namespace ordcausal {

// Declarative run description. Loaded from a JSON document; see README for
// the field reference.
struct RunConfig {
    std::string mode;  // analyze | audit | simulate
    std::string input_path;
    CsvSchema schema;

    std::vector<int> k_values{10, 15};
    EliminationRule elimination = EliminationRule::E1;
    std::vector<std::string> adjustments{"A1"};  // subset of {A1, A2}
    double alpha = 0.05;
    double gate_multiplier = 2.0;  // gate fails when prop > multiplier * alpha
    std::uint64_t seed = 0;
    int bootstrap_b = 1000;
    bool run_iptw = true;
    int threads = 0;

    struct Simulation {
        std::vector<std::string> sets{"set1"};  // set1 and/or set2
        int M = 500;
        int n_sim_covariates = 15;
        std::vector<std::string> pca_columns;  // empty = all GPS-model columns
        bool pca_correlation = true;
        std::vector<EstimatorSpec> estimators;
    } simulation;

    // Resolved against an ingested dataset.
    ColumnSelection gps_columns(const Dataset& data) const;
    ColumnSelection adjustment_columns(const Dataset& data, const std::string& which) const;
    ColumnSelection audit_columns(const Dataset& data) const;       // all declared covariates
    ColumnSelection continuous_columns(const Dataset& data) const;  // numeric type
    ColumnSelection pca_columns_resolved(const Dataset& data) const;
};

RunConfig parse_config(const Json& doc);
RunConfig load_config_file(const std::string& path);

// Canonical document for provenance hashing and the round-trip report block.
Json config_to_json(const RunConfig& config);

// FNV-1a 64 hash of a canonical dump, as fixed-width hex.
std::string config_hash(const Json& doc);

}  // namespace ordcausal
