#include "ordcausal/config.hpp"

#include <fstream>

namespace ordcausal {

namespace {

int column_or_throw(const Dataset& data, const std::string& name) {
    const int idx = data.column_index(name);
    if (idx < 0) throw SchemaMismatch("config references unknown covariate '" + name + "'");
    return idx;
}

EstimatorSpec parse_estimator(const Json& e) {
    EstimatorSpec spec;
    const std::string kind = e.at("kind").get<std::string>();
    if (kind == "subclass_means")
        spec.kind = EstimatorKind::subclass_means;
    else if (kind == "subclass_regression")
        spec.kind = EstimatorKind::subclass_regression;
    else if (kind == "naive")
        spec.kind = EstimatorKind::naive;
    else if (kind == "standard_regression")
        spec.kind = EstimatorKind::standard_regression;
    else if (kind == "iptw")
        spec.kind = EstimatorKind::iptw;
    else
        throw InvalidArgument("unknown estimator kind: " + kind);
    if (spec.kind == EstimatorKind::subclass_means ||
        spec.kind == EstimatorKind::subclass_regression) {
        spec.K = e.at("K").get<int>();
        if (spec.K < 1) throw InvalidArgument("estimator K must be >= 1");
    }
    return spec;
}

Json estimator_to_json(const EstimatorSpec& spec) {
    Json e;
    switch (spec.kind) {
        case EstimatorKind::subclass_means: e["kind"] = "subclass_means"; break;
        case EstimatorKind::subclass_regression: e["kind"] = "subclass_regression"; break;
        case EstimatorKind::naive: e["kind"] = "naive"; break;
        case EstimatorKind::standard_regression: e["kind"] = "standard_regression"; break;
        case EstimatorKind::iptw: e["kind"] = "iptw"; break;
    }
    if (spec.K > 0) e["K"] = spec.K;
    return e;
}

}  // namespace

RunConfig parse_config(const Json& doc) {
    RunConfig cfg;
    cfg.mode = doc.at("mode").get<std::string>();
    if (cfg.mode != "analyze" && cfg.mode != "audit" && cfg.mode != "simulate")
        throw InvalidArgument("mode must be analyze, audit, or simulate");
    cfg.input_path = doc.at("input").get<std::string>();

    cfg.schema.outcome_column = doc.at("outcome").get<std::string>();
    const Json& treatment = doc.at("treatment");
    cfg.schema.treatment_column = treatment.at("column").get<std::string>();
    for (const auto& level : treatment.at("levels"))
        cfg.schema.treatment_levels.push_back(level.get<std::string>());
    if (cfg.schema.treatment_levels.size() < 2)
        throw InvalidArgument("need at least 2 treatment levels");

    for (const auto& cov : doc.at("covariates")) {
        ColumnSpec spec;
        spec.name = cov.at("name").get<std::string>();
        spec.type = column_type_from_string(cov.at("type").get<std::string>());
        spec.role = cov.contains("role") ? role_from_string(cov.at("role").get<std::string>())
                                         : CovariateRole::gps;
        cfg.schema.covariates.push_back(spec);
    }
    if (cfg.schema.covariates.empty()) throw InvalidArgument("need at least one covariate");

    if (doc.contains("K")) {
        cfg.k_values.clear();
        for (const auto& k : doc.at("K")) {
            const int kv = k.get<int>();
            if (kv < 1) throw InvalidArgument("K values must be >= 1");
            cfg.k_values.push_back(kv);
        }
        if (cfg.k_values.empty()) throw InvalidArgument("K list must be nonempty");
    }
    if (doc.contains("elimination"))
        cfg.elimination = elimination_from_string(doc.at("elimination").get<std::string>());
    if (doc.contains("adjustment")) {
        cfg.adjustments.clear();
        if (doc.at("adjustment").is_string())
            cfg.adjustments.push_back(doc.at("adjustment").get<std::string>());
        else
            for (const auto& a : doc.at("adjustment"))
                cfg.adjustments.push_back(a.get<std::string>());
        for (const auto& a : cfg.adjustments)
            if (a != "A1" && a != "A2") throw InvalidArgument("adjustment must be A1 or A2");
    }
    if (doc.contains("alpha")) cfg.alpha = doc.at("alpha").get<double>();
    if (cfg.alpha <= 0.0 || cfg.alpha >= 1.0) throw InvalidArgument("alpha outside (0,1)");
    if (doc.contains("gate_multiplier"))
        cfg.gate_multiplier = doc.at("gate_multiplier").get<double>();
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("bootstrap_B")) cfg.bootstrap_b = doc.at("bootstrap_B").get<int>();
    if (cfg.bootstrap_b < 0) throw InvalidArgument("bootstrap_B must be >= 0");
    if (doc.contains("iptw")) cfg.run_iptw = doc.at("iptw").get<bool>();
    if (doc.contains("threads")) cfg.threads = doc.at("threads").get<int>();

    if (doc.contains("simulation")) {
        const Json& sim = doc.at("simulation");
        if (sim.contains("sets")) {
            cfg.simulation.sets.clear();
            for (const auto& s : sim.at("sets")) {
                const std::string name = s.get<std::string>();
                if (name != "set1" && name != "set2")
                    throw InvalidArgument("simulation set must be set1 or set2");
                cfg.simulation.sets.push_back(name);
            }
        }
        if (sim.contains("M")) cfg.simulation.M = sim.at("M").get<int>();
        if (cfg.simulation.M < 1) throw InvalidArgument("simulation M must be >= 1");
        if (sim.contains("n_sim_covariates"))
            cfg.simulation.n_sim_covariates = sim.at("n_sim_covariates").get<int>();
        if (sim.contains("pca_columns"))
            for (const auto& c : sim.at("pca_columns"))
                cfg.simulation.pca_columns.push_back(c.get<std::string>());
        if (sim.contains("pca_correlation"))
            cfg.simulation.pca_correlation = sim.at("pca_correlation").get<bool>();
        if (sim.contains("estimators"))
            for (const auto& e : sim.at("estimators"))
                cfg.simulation.estimators.push_back(parse_estimator(e));
    }
    if (cfg.simulation.estimators.empty()) {
        // the seven-method roster used for estimator comparison
        for (int k : {5, 15}) {
            cfg.simulation.estimators.push_back({EstimatorKind::subclass_means, k});
            cfg.simulation.estimators.push_back({EstimatorKind::subclass_regression, k});
        }
        cfg.simulation.estimators.push_back({EstimatorKind::naive, 0});
        cfg.simulation.estimators.push_back({EstimatorKind::standard_regression, 0});
        cfg.simulation.estimators.push_back({EstimatorKind::iptw, 0});
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
    Json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw InvalidArgument(std::string("config parse error: ") + e.what());
    }
    return parse_config(doc);
}

ColumnSelection RunConfig::gps_columns(const Dataset& data) const {
    ColumnSelection sel;
    for (const auto& cov : schema.covariates)
        if (cov.role == CovariateRole::gps || cov.role == CovariateRole::adjustment_a1)
            sel.push_back(column_or_throw(data, cov.name));
    return sel;
}

ColumnSelection RunConfig::adjustment_columns(const Dataset& data, const std::string& which) const {
    ColumnSelection sel;
    for (const auto& cov : schema.covariates) {
        const bool in_a1 = cov.role == CovariateRole::adjustment_a1;
        const bool in_a2 = cov.role != CovariateRole::audit_only;
        if ((which == "A1" && in_a1) || (which == "A2" && in_a2))
            sel.push_back(column_or_throw(data, cov.name));
    }
    return sel;
}

ColumnSelection RunConfig::audit_columns(const Dataset& data) const {
    ColumnSelection sel;
    for (const auto& cov : schema.covariates) sel.push_back(column_or_throw(data, cov.name));
    return sel;
}

ColumnSelection RunConfig::continuous_columns(const Dataset& data) const {
    ColumnSelection sel;
    for (const auto& cov : schema.covariates)
        if (cov.type == ColumnType::numeric) sel.push_back(column_or_throw(data, cov.name));
    return sel;
}

ColumnSelection RunConfig::pca_columns_resolved(const Dataset& data) const {
    if (simulation.pca_columns.empty()) return gps_columns(data);
    ColumnSelection sel;
    for (const auto& name : simulation.pca_columns) sel.push_back(column_or_throw(data, name));
    return sel;
}

Json config_to_json(const RunConfig& cfg) {
    Json doc;
    doc["mode"] = cfg.mode;
    doc["input"] = cfg.input_path;
    doc["outcome"] = cfg.schema.outcome_column;
    Json treatment;
    treatment["column"] = cfg.schema.treatment_column;
    treatment["levels"] = cfg.schema.treatment_levels;
    doc["treatment"] = treatment;
    Json covariates = Json::array();
    for (const auto& cov : cfg.schema.covariates) {
        Json c;
        c["name"] = cov.name;
        c["type"] = to_string(cov.type);
        c["role"] = to_string(cov.role);
        covariates.push_back(c);
    }
    doc["covariates"] = covariates;
    doc["K"] = cfg.k_values;
    doc["elimination"] = to_string(cfg.elimination);
    doc["adjustment"] = cfg.adjustments;
    doc["alpha"] = cfg.alpha;
    doc["gate_multiplier"] = cfg.gate_multiplier;
    doc["seed"] = cfg.seed;
    doc["bootstrap_B"] = cfg.bootstrap_b;
    doc["iptw"] = cfg.run_iptw;
    // threads is an execution detail: results must not depend on it, so it
    // stays out of the canonical document and the provenance hash
    Json sim;
    sim["sets"] = cfg.simulation.sets;
    sim["M"] = cfg.simulation.M;
    sim["n_sim_covariates"] = cfg.simulation.n_sim_covariates;
    sim["pca_columns"] = cfg.simulation.pca_columns;
    sim["pca_correlation"] = cfg.simulation.pca_correlation;
    Json est = Json::array();
    for (const auto& e : cfg.simulation.estimators) est.push_back(estimator_to_json(e));
    sim["estimators"] = est;
    doc["simulation"] = sim;
    return doc;
}

std::string config_hash(const Json& doc) {
    const std::string dump = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ordcausal
