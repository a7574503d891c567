#include "ordcausal/pipeline.hpp"

#include <sstream>

#include "ordcausal/ordered_logit.hpp"
#include "ordcausal/report.hpp"

namespace ordcausal {

const char* const kVersion = "0.1.0";

namespace {

// Rethrows the active exception with a stage prefix, preserving its type.
[[noreturn]] void rethrow_with_stage(const std::string& stage) {
    auto tag = [&](const std::string& what) { return "[" + stage + "] " + what; };
    try {
        throw;
    } catch (const SchemaMismatch& e) {
        throw SchemaMismatch(tag(e.what()));
    } catch (const UnparseableValue& e) {
        throw UnparseableValue(tag(e.what()));
    } catch (const EmptyAfterFiltering& e) {
        throw EmptyAfterFiltering(tag(e.what()));
    } catch (const SeparationDetected& e) {
        throw SeparationDetected(tag(e.what()));
    } catch (const RankDeficientDesign& e) {
        throw RankDeficientDesign(tag(e.what()));
    } catch (const NonConvergence& e) {
        throw NonConvergence(tag(e.what()));
    } catch (const EmptySupport& e) {
        throw EmptySupport(tag(e.what()));
    } catch (const EmptyLevel& e) {
        throw EmptyLevel(tag(e.what()));
    } catch (const EmptyCell& e) {
        throw EmptyCell(tag(e.what()));
    } catch (const ZeroProbability& e) {
        throw ZeroProbability(tag(e.what()));
    } catch (const ConstantVector& e) {
        throw ConstantVector(tag(e.what()));
    } catch (const InsufficientRows& e) {
        throw InsufficientRows(tag(e.what()));
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(tag(e.what()));
    } catch (const Error& e) {
        throw Error(tag(e.what()));
    }
}

template <typename F>
auto with_stage(const std::string& stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (...) {
        rethrow_with_stage(stage);
    }
}

Json provenance_block(const RunConfig& config) {
    const Json canonical = config_to_json(config);
    Json prov;
    prov["config_hash"] = config_hash(canonical);
    prov["seed"] = config.seed;
    prov["version"] = kVersion;
    prov["config"] = canonical;
    return prov;
}

}  // namespace

AnalysisReport run_analysis(const RunConfig& config) {
    AnalysisReport report;
    report.provenance = provenance_block(config);

    const IngestResult ingested =
        with_stage("ingest", [&] { return ingest(config.input_path, config.schema); });
    const Dataset& data = ingested.data;
    report.rows_read = ingested.rows_read;
    report.rows_dropped_missing = ingested.rows_dropped;
    report.n_ingested = data.n();

    const ColumnSelection gps_cols = config.gps_columns(data);
    report.gps_fit =
        with_stage("gps-fit", [&] { return fit_ordered_logit(data, gps_cols); });

    auto [retained, support] = with_stage("common-support", [&] {
        return trim_common_support(data, report.gps_fit, config.elimination,
                                   config.continuous_columns(data));
    });
    report.support = support;
    report.n_retained = retained.n();

    const Eigen::VectorXd scores = linear_predictors(report.support.refit, retained);
    const ColumnSelection audit_cols = config.audit_columns(retained);
    const bool estimation_enabled = config.mode != "audit";
    bool any_gate_passed = false;

    for (int k_value : config.k_values) {
        AnalysisReport::KResult kr;
        kr.K = k_value;
        kr.partition = with_stage("subclassify", [&] { return subclassify(retained, scores, k_value); });
        kr.validation = validate_partition(kr.partition, retained.n_levels,
                                           static_cast<int>(gps_cols.size()));
        kr.balance = with_stage("balance-audit",
                                [&] { return balance_audit(retained, kr.partition, audit_cols); });
        kr.significant_prop_at_alpha = significant_proportion(kr.balance, config.alpha);
        kr.significant_prop_001 = significant_proportion(kr.balance, 0.01);
        kr.plots = with_stage("plot-data", [&] {
            return emit_plot_data(retained, kr.partition, report.support.refit, audit_cols);
        });

        const double gate_threshold = config.gate_multiplier * config.alpha;
        kr.gate_passed = kr.significant_prop_at_alpha <= gate_threshold;
        if (!kr.gate_passed) {
            std::ostringstream note;
            note << "estimation skipped: significant-test proportion "
                 << kr.significant_prop_at_alpha << " at alpha " << config.alpha
                 << " exceeds the gate threshold " << gate_threshold
                 << "; covariate balance is not adequate at K=" << k_value;
            kr.gate_note = note.str();
        } else if (estimation_enabled) {
            kr.anova = with_stage("global-test",
                                  [&] { return global_test(retained, kr.partition, {}); });
            EffectTable means_table = with_stage("subclass-means", [&] {
                return estimate_subclass_means(retained, kr.partition);
            });
            means_table.elimination = to_string(config.elimination);
            kr.effects.push_back(std::move(means_table));
            for (const auto& adj : config.adjustments) {
                const ColumnSelection adj_cols = config.adjustment_columns(retained, adj);
                kr.ancova.emplace(adj, with_stage("global-test", [&] {
                                      return global_test(retained, kr.partition, adj_cols);
                                  }));
                EffectTable table = with_stage("subclass-regression", [&] {
                    return estimate_subclass_regression(retained, kr.partition, adj_cols).first;
                });
                table.elimination = to_string(config.elimination);
                table.adjustment.push_back(adj);
                kr.effects.push_back(std::move(table));
            }
            any_gate_passed = true;
        }
        report.per_k.push_back(std::move(kr));
    }

    if (estimation_enabled && any_gate_passed) {
        report.any_estimation_ran = true;
        EffectTable naive = with_stage("naive", [&] { return estimate_naive(retained); });
        naive.elimination = to_string(config.elimination);
        report.sample_effects.push_back(std::move(naive));
        for (const auto& adj : config.adjustments) {
            EffectTable table = with_stage("standard-regression", [&] {
                return estimate_standard_regression(retained,
                                                    config.adjustment_columns(retained, adj));
            });
            table.elimination = to_string(config.elimination);
            table.adjustment.push_back(adj);
            report.sample_effects.push_back(std::move(table));
        }
        if (config.run_iptw) {
            report.iptw = with_stage("iptw", [&] {
                return estimate_iptw(retained, report.support.refit, config.bootstrap_b,
                                     config.seed);
            });
            report.iptw->table.elimination = to_string(config.elimination);
        }
    }
    return report;
}

SimulationRunReport run_simulation(const RunConfig& config) {
    SimulationRunReport report;
    report.provenance = provenance_block(config);

    const IngestResult ingested =
        with_stage("ingest", [&] { return ingest(config.input_path, config.schema); });
    const Dataset& data = ingested.data;
    report.rows_read = ingested.rows_read;
    report.rows_dropped_missing = ingested.rows_dropped;
    report.n_ingested = data.n();

    StudyConfig study;
    study.elimination = config.elimination;
    study.gps_columns = config.gps_columns(data);
    study.adjustment_columns = config.adjustment_columns(
        data, config.adjustments.empty() ? "A2" : config.adjustments.front());
    study.continuous_columns = config.continuous_columns(data);
    study.n_sim_covariates = config.simulation.n_sim_covariates;
    study.bootstrap_b = config.bootstrap_b;
    study.threads = config.threads;

    for (const auto& set_name : config.simulation.sets) {
        const FullPotentialData full = with_stage("impute-" + set_name, [&] {
            return set_name == "set1"
                       ? impute_set1(data)
                       : impute_set2(data, config.pca_columns_resolved(data),
                                     config.simulation.pca_correlation);
        });
        SimulationRunReport::SetResult sr;
        sr.set = set_name;
        sr.true_pate = full.true_pate;
        sr.summary = with_stage("study-" + set_name, [&] {
            return run_study(full, config.simulation.estimators, config.simulation.M, study,
                             config.seed);
        });
        report.sets.push_back(std::move(sr));
    }
    return report;
}

Json report_to_json(const AnalysisReport& report) {
    Json j;
    j["provenance"] = report.provenance;
    Json ingest_block;
    ingest_block["rows_read"] = report.rows_read;
    ingest_block["rows_dropped_missing"] = report.rows_dropped_missing;
    ingest_block["n_ingested"] = report.n_ingested;
    j["ingest"] = ingest_block;
    j["gps_fit"] = to_json(report.gps_fit);
    j["support"] = to_json(report.support);
    j["n_retained"] = report.n_retained;

    Json per_k = Json::array();
    for (const auto& kr : report.per_k) {
        Json k;
        k["K"] = kr.K;
        k["partition"] = to_json(kr.partition);
        k["validation"] = to_json(kr.validation);
        k["balance"] = to_json(kr.balance);
        k["significant_prop_at_alpha"] = kr.significant_prop_at_alpha;
        k["significant_prop_001"] = kr.significant_prop_001;
        k["gate_passed"] = kr.gate_passed;
        k["gate_note"] = kr.gate_note;
        if (kr.anova) k["anova"] = to_json(*kr.anova);
        Json ancova;
        for (const auto& [adj, test] : kr.ancova) ancova[adj] = to_json(test);
        k["ancova"] = ancova;
        Json effects = Json::array();
        for (const auto& table : kr.effects) effects.push_back(to_json(table));
        k["effects"] = effects;
        k["plots"] = to_json(kr.plots);
        per_k.push_back(k);
    }
    j["per_k"] = per_k;

    Json sample_effects = Json::array();
    for (const auto& table : report.sample_effects) sample_effects.push_back(to_json(table));
    j["sample_effects"] = sample_effects;
    if (report.iptw) j["iptw"] = to_json(*report.iptw);
    j["any_estimation_ran"] = report.any_estimation_ran;
    return j;
}

Json report_to_json(const SimulationRunReport& report) {
    Json j;
    j["provenance"] = report.provenance;
    Json ingest_block;
    ingest_block["rows_read"] = report.rows_read;
    ingest_block["rows_dropped_missing"] = report.rows_dropped_missing;
    ingest_block["n_ingested"] = report.n_ingested;
    j["ingest"] = ingest_block;
    Json sets = Json::array();
    for (const auto& sr : report.sets) {
        Json s;
        s["set"] = sr.set;
        Json truth = Json::array();
        for (int t = 0; t < sr.true_pate.rows(); ++t) {
            Json row = Json::array();
            for (int c = 0; c < sr.true_pate.cols(); ++c) row.push_back(sr.true_pate(t, c));
            truth.push_back(row);
        }
        s["true_pate"] = truth;
        s["summary"] = to_json(sr.summary);
        sets.push_back(s);
    }
    j["sets"] = sets;
    return j;
}

std::string report_to_markdown(const AnalysisReport& report) {
    std::ostringstream out;
    out << "# Analysis report\n\n";
    out << "- config hash: " << report.provenance["config_hash"].get<std::string>() << "\n";
    out << "- ingested rows: " << report.n_ingested << " (dropped "
        << report.rows_dropped_missing << " with missing values of " << report.rows_read
        << " read)\n";
    out << "- retained after support trimming: " << report.n_retained << "\n\n";
    for (const auto& kr : report.per_k) {
        out << "## K = " << kr.K << "\n\n";
        out << "- validation: " << (kr.validation.pass ? "pass" : "FAIL") << "\n";
        out << "- significant balance tests: " << kr.significant_prop_001 << " at alpha=0.01, "
            << kr.significant_prop_at_alpha << " at configured alpha\n";
        out << "- balance gate: " << (kr.gate_passed ? "pass" : "STOP") << "\n\n";
        if (!kr.gate_passed) {
            out << kr.gate_note << "\n\n";
            continue;
        }
        out << render_balance_table(kr.balance) << "\n";
        if (kr.anova)
            out << "Block ANOVA: F(" << kr.anova->df1 << ", " << kr.anova->df2
                << ") = " << kr.anova->statistic << ", p = " << kr.anova->p_value << "\n\n";
        for (const auto& [adj, test] : kr.ancova)
            out << "Block ANCOVA (" << adj << "): F(" << test.df1 << ", " << test.df2
                << ") = " << test.statistic << ", p = " << test.p_value << "\n\n";
        for (const auto& table : kr.effects) out << render_effect_table(table) << "\n";
        out << "Note: subclass-weighted standard errors can understate sampling variance "
               "because subclass membership is estimated from the same data; regression "
               "adjustment usually narrows the gap.\n\n";
    }
    if (!report.sample_effects.empty()) {
        out << "## Sample-level estimators\n\n";
        for (const auto& table : report.sample_effects) out << render_effect_table(table) << "\n";
    }
    if (report.iptw) {
        out << "## IPTW\n\n";
        out << render_effect_table(report.iptw->table);
        out << "\nweights > 10: " << report.iptw->n_weights_above_10
            << ", max weight: " << report.iptw->max_weight << "\n";
    }
    return out.str();
}

std::string report_to_markdown(const SimulationRunReport& report) {
    std::ostringstream out;
    out << "# Simulation report\n\n";
    out << "- config hash: " << report.provenance["config_hash"].get<std::string>() << "\n";
    out << "- base sample: " << report.n_ingested << " units\n\n";
    for (const auto& sr : report.sets) {
        out << "## " << sr.set << "\n\n";
        out << render_simulation_summary(sr.summary) << "\n";
    }
    return out.str();
}

}  // namespace ordcausal
