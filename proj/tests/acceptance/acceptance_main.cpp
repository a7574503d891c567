// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Self-contained fixtures except the final criterion, which runs only when
// an external NHANES 2005-06 extract is supplied (see README, "External
// data"); without the file it reports SKIP and does not affect the result.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "ordcausal/balance.hpp"
#include "ordcausal/estimation.hpp"
#include "ordcausal/ingest.hpp"
#include "ordcausal/multinomial_logit.hpp"
#include "ordcausal/ordered_logit.hpp"
#include "ordcausal/pipeline.hpp"
#include "ordcausal/serialize.hpp"
#include "ordcausal/simulation.hpp"

using namespace ordcausal;
using testutil::Rng;

namespace {

struct Outcome {
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

// ---------------------------------------------------------------------------
// 1. Published contingency fixture for the rank correlation
// ---------------------------------------------------------------------------
Outcome criterion_tau_fixture() {
    const int yes[5] = {11, 7, 15, 7, 7};
    const int no[5] = {148, 48, 85, 54, 36};
    std::vector<double> a, b;
    for (int lvl = 0; lvl < 5; ++lvl) {
        for (int i = 0; i < yes[lvl]; ++i) {
            a.push_back(1.0);
            b.push_back(lvl + 1);
        }
        for (int i = 0; i < no[lvl]; ++i) {
            a.push_back(0.0);
            b.push_back(lvl + 1);
        }
    }
    const TauResult r = kendall_tau_b(a, b);
    Outcome out;
    out.pass = std::abs(r.tau - 0.09) <= 0.01 && std::abs(r.z - 2.00) <= 0.1;
    std::ostringstream ss;
    ss << "tau=" << r.tau << " (target 0.09 +/- 0.01), z=" << r.z << " (target 2.00 +/- 0.1)";
    out.detail = ss.str();
    return out;
}

// ---------------------------------------------------------------------------
// 2. Rank correlation vs the O(n^2) enumeration oracle
// ---------------------------------------------------------------------------
Outcome criterion_tau_oracle() {
    Rng rng(0xACCE55);
    int checked = 0;
    double worst = 0.0;
    while (checked < 500) {
        const int n = rng.uniform_int(2, 200);
        std::vector<double> a(n), b(n);
        const int ka = rng.uniform_int(2, 10);
        const int kb = rng.uniform_int(2, 10);
        for (int i = 0; i < n; ++i) {
            a[i] = rng.uniform_int(0, ka - 1);
            b[i] = rng.uniform_int(0, kb - 1);
        }
        try {
            const TauResult fast = kendall_tau_b(a, b);
            const testutil::BruteTau oracle = testutil::brute_force_tau(a, b);
            if (fast.s != oracle.s) {
                Outcome out;
                out.detail = "S mismatch at draw " + std::to_string(checked);
                return out;
            }
            worst = std::max(worst, std::abs(fast.tau - oracle.tau));
            ++checked;
        } catch (const ConstantVector&) {
            // degenerate draw, replace it
        }
    }
    Outcome out;
    out.pass = worst < 1e-12;
    out.detail = "500 draws, max |tau - oracle| = " + std::to_string(worst);
    return out;
}

// ---------------------------------------------------------------------------
// 3. Analytic gradients vs central finite differences
// ---------------------------------------------------------------------------
Outcome criterion_gradients() {
    Rng rng(0x6AD);
    testutil::OrdinalDgp dgp;
    dgp.theta = Eigen::VectorXd(3);
    dgp.theta << -1.0, 0.0, 1.2;
    dgp.beta = Eigen::VectorXd(3);
    dgp.beta << 0.7, -0.4, 0.2;
    dgp.alpha = Eigen::VectorXd::Zero(4);
    dgp.gamma = Eigen::VectorXd::Zero(3);
    const Dataset data = testutil::generate_ordinal_data(dgp, 400, rng);
    const ColumnSelection cols = all_columns(data);

    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd params(6);
        for (int i = 0; i < 6; ++i) params[i] = rng.normal() * 0.8;
        const auto [f, grad] = ordered_logit_negloglik_grad(params, data, cols);
        (void)f;
        const Eigen::VectorXd fd = testutil::fd_gradient(
            [&](const Eigen::VectorXd& q) {
                return ordered_logit_negloglik_grad(q, data, cols).first;
            },
            params);
        worst = std::max(worst, (grad - fd).lpNorm<Eigen::Infinity>() /
                                    std::max(1.0, fd.lpNorm<Eigen::Infinity>()));
    }
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd params(12);  // (Z-1) * (1+p) = 3 * 4
        for (int i = 0; i < 12; ++i) params[i] = rng.normal() * 0.6;
        const auto [f, grad] = multinomial_negloglik_grad(params, data, cols);
        (void)f;
        const Eigen::VectorXd fd = testutil::fd_gradient(
            [&](const Eigen::VectorXd& q) {
                return multinomial_negloglik_grad(q, data, cols).first;
            },
            params);
        worst = std::max(worst, (grad - fd).lpNorm<Eigen::Infinity>() /
                                    std::max(1.0, fd.lpNorm<Eigen::Infinity>()));
    }
    Outcome out;
    out.pass = worst < 1e-6;
    out.detail = "max relative error " + std::to_string(worst) + " over 20+20 points";
    return out;
}

// ---------------------------------------------------------------------------
// 4. Coefficient recovery on the generating model
// ---------------------------------------------------------------------------
Outcome criterion_recovery() {
    testutil::OrdinalDgp dgp;
    dgp.theta = Eigen::VectorXd(4);
    dgp.theta << -2, -1, 0, 1;
    dgp.beta = Eigen::VectorXd(3);
    dgp.beta << 1.0, -0.5, 0.25;
    dgp.alpha = Eigen::VectorXd::Zero(5);
    dgp.gamma = Eigen::VectorXd::Zero(3);
    Rng rng(0x5eed);
    const Dataset data = testutil::generate_ordinal_data(dgp, 5000, rng);
    const OrdinalFit fit = fit_ordered_logit(data);

    double worst = 0.0;
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(fit.beta[j] - dgp.beta[j]));
    Outcome out;
    out.pass = fit.converged && worst < 0.1;
    std::ostringstream ss;
    ss << "max |beta_hat - beta| = " << worst << " (limit 0.1), converged="
       << (fit.converged ? "yes" : "no");
    out.detail = ss.str();
    return out;
}

// ---------------------------------------------------------------------------
// 5. Degenerate identities
// ---------------------------------------------------------------------------
Outcome criterion_degenerate() {
    Rng rng(0xDE6);
    Outcome out;
    std::ostringstream ss;

    // (a) K=1 subclass regression with no adjustment vs naive, 1e-10
    Eigen::MatrixXd x(300, 2);
    std::vector<int> t(300);
    Eigen::VectorXd y(300);
    for (int i = 0; i < 300; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal();
        t[i] = 1 + rng.uniform_int(0, 4);
        y[i] = 0.4 * t[i] + rng.normal();
    }
    const Dataset data = testutil::make_dataset(x, t, y, 5);
    const SubclassPartition k1 = subclassify(data, Eigen::VectorXd::Zero(300), 1);
    const EffectTable reg = estimate_subclass_regression(data, k1, {}).first;
    const EffectTable naive = estimate_naive(data);
    double gap_a = 0.0;
    for (const auto [tt, s] : level_pairs(5))
        gap_a = std::max(gap_a, std::abs(reg.estimate(tt, s) - naive.estimate(tt, s)));
    const bool pass_a = gap_a < 1e-10;
    ss << "subclass-reg(K=1) vs naive gap " << gap_a;

    // (b) constant within-level weights: Z=2 with theta=0 gives r = 0.5 for
    // every unit exactly, so the normalized weighting must reproduce naive
    // bit for bit
    Eigen::MatrixXd x2(200, 1);
    std::vector<int> t2(200);
    Eigen::VectorXd y2(200);
    for (int i = 0; i < 200; ++i) {
        x2(i, 0) = rng.normal();
        t2[i] = 1 + rng.uniform_int(0, 1);
        y2[i] = rng.normal() * 3.0 + t2[i];
    }
    const Dataset data2 = testutil::make_dataset(x2, t2, y2, 2);
    OrdinalFit flat;
    flat.n_levels = 2;
    flat.theta = Eigen::VectorXd::Zero(1);
    flat.beta = Eigen::VectorXd::Zero(1);
    flat.columns = {0};
    const IptwResult iptw = estimate_iptw(data2, flat, 0, 1);
    const EffectTable naive2 = estimate_naive(data2);
    const bool pass_b = iptw.table.estimate(2, 1) == naive2.estimate(2, 1);
    ss << "; iptw==naive bitwise " << (pass_b ? "yes" : "NO");

    // (c) null potential outcomes carry zero truth
    const FullPotentialData set1 = impute_set1(data);
    const bool pass_c = set1.true_pate.cwiseAbs().maxCoeff() == 0.0;
    ss << "; set1 truth zero " << (pass_c ? "yes" : "NO");

    out.pass = pass_a && pass_b && pass_c;
    out.detail = ss.str();
    return out;
}

// ---------------------------------------------------------------------------
// 6. Transitivity of every estimator
// ---------------------------------------------------------------------------
Outcome criterion_transitivity() {
    Rng rng(0x7A);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int z = 3 + rng.uniform_int(0, 2);
        const int n = 150 + rng.uniform_int(0, 100);
        Eigen::MatrixXd x(n, 2);
        std::vector<int> t(n);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            x(i, 0) = rng.normal();
            x(i, 1) = rng.normal();
            t[i] = 1 + rng.uniform_int(0, z - 1);
            y[i] = 0.3 * t[i] + 0.8 * x(i, 0) + rng.normal();
        }
        const Dataset data = testutil::make_dataset(x, t, y, z);
        const OrdinalFit fit = fit_ordered_logit(data);
        const SubclassPartition part = subclassify(data, linear_predictors(fit, data), 3);

        std::vector<EffectTable> tables;
        tables.push_back(estimate_naive(data));
        tables.push_back(estimate_standard_regression(data, {0, 1}));
        tables.push_back(estimate_subclass_means(data, part));
        tables.push_back(estimate_subclass_regression(data, part, {0, 1}).first);
        tables.push_back(estimate_iptw(data, fit, 0, 1).table);
        for (const auto& table : tables)
            for (int a = 1; a <= z; ++a)
                for (int b = 1; b <= z; ++b)
                    for (int c = 1; c <= z; ++c)
                        worst = std::max(worst,
                                         std::abs(table.estimate(a, b) + table.estimate(b, c) -
                                                  table.estimate(a, c)));
    }
    Outcome out;
    out.pass = worst < 1e-10;
    out.detail = "max |(t,s)+(s,r)-(t,r)| = " + std::to_string(worst) + " over 100 datasets";
    return out;
}

// ---------------------------------------------------------------------------
// 7. Empirical unbiasedness of the within-subclass estimator
// ---------------------------------------------------------------------------
Outcome criterion_unbiasedness() {
    testutil::OrdinalDgp dgp;
    dgp.theta = Eigen::VectorXd(4);
    dgp.theta << -2, -1, 0, 1;
    dgp.beta = Eigen::VectorXd(4);
    dgp.beta << 0.8, -0.5, 0.4, 0.3;
    dgp.alpha = Eigen::VectorXd(5);
    dgp.alpha << 0.0, 0.5, 1.0, 1.5, 2.0;
    dgp.gamma = Eigen::VectorXd(4);
    dgp.gamma << 1.0, 1.0, -1.0, 0.5;
    Rng rng(0xA11A);

    const int m_total = 500;
    const auto pairs = level_pairs(5);
    Eigen::MatrixXd bias(m_total, static_cast<int>(pairs.size()));
    int m = 0;
    int regenerated = 0;
    while (m < m_total && regenerated <= 200) {
        try {
            const Dataset data = testutil::generate_ordinal_data(dgp, 1000, rng);
            const OrdinalFit fit = fit_ordered_logit(data);
            const SubclassPartition part =
                subclassify(data, linear_predictors(fit, data), 10);
            const EffectTable table =
                estimate_subclass_regression(data, part, {0, 1, 2, 3}).first;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const auto [t, s] = pairs[i];
                bias(m, static_cast<int>(i)) =
                    table.estimate(t, s) - (dgp.alpha[t - 1] - dgp.alpha[s - 1]);
            }
            ++m;
        } catch (const Error&) {
            ++regenerated;
        }
    }

    Outcome out;
    if (m < m_total) {
        out.detail = "too many degenerate draws";
        return out;
    }
    double worst_ratio = 0.0;
    for (int j = 0; j < bias.cols(); ++j) {
        const double mean = bias.col(j).mean();
        const double sd =
            std::sqrt((bias.col(j).array() - mean).square().sum() / (m_total - 1));
        const double mcse = sd / std::sqrt(static_cast<double>(m_total));
        worst_ratio = std::max(worst_ratio, std::abs(mean) / mcse);
    }
    out.pass = worst_ratio <= 3.0;
    std::ostringstream ss;
    ss << "max |mean bias| / MCSE = " << worst_ratio << " across 10 pairs (limit 3), M=500";
    out.detail = ss.str();
    return out;
}

// ---------------------------------------------------------------------------
// 8. Replication study: subclassification w/ regression vs naive and IPTW
// ---------------------------------------------------------------------------
Dataset study_base(int n, Rng& rng) {
    // Eight covariates; assignment follows a single index, outcome is mostly
    // linear with a quadratic term the adjustment set does not include.
    Eigen::MatrixXd x(n, 8);
    std::vector<int> t(n);
    Eigen::VectorXd y(n);
    Eigen::VectorXd theta(4);
    theta << -1.6, -0.6, 0.4, 1.4;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 4; ++j) x(i, j) = rng.normal();
        x(i, 4) = rng.uniform() < 0.4 ? 1.0 : 0.0;
        x(i, 5) = rng.uniform() < 0.5 ? 1.0 : 0.0;
        x(i, 6) = rng.normal();
        x(i, 7) = rng.normal();
        const double lp = 1.0 * x(i, 0) - 0.7 * x(i, 1) + 0.5 * x(i, 4) + 0.3 * x(i, 2);
        t[i] = testutil::sample_ordinal(theta, lp, rng.uniform());
        y[i] = 26.0 + 1.5 * x(i, 0) + 1.0 * x(i, 1) - 1.0 * x(i, 2) + 0.8 * x(i, 4) +
               0.4 * x(i, 0) * x(i, 0) + rng.normal();
    }
    Dataset data = testutil::make_dataset(x, t, y, 5);
    data.covariate_types[4] = ColumnType::binary;
    data.covariate_types[5] = ColumnType::binary;
    return data;
}

Outcome criterion_study() {
    Rng rng(0x57D);
    const Dataset base = study_base(1000, rng);

    std::vector<EstimatorSpec> roster{{EstimatorKind::subclass_means, 15},
                                      {EstimatorKind::subclass_regression, 15},
                                      {EstimatorKind::naive, 0},
                                      {EstimatorKind::standard_regression, 0},
                                      {EstimatorKind::iptw, 0}};
    StudyConfig config;
    config.adjustment_columns = all_columns(base);
    config.n_sim_covariates = 5;
    config.bootstrap_b = 100;

    Outcome out;
    std::ostringstream ss;
    bool pass = true;
    for (const std::string set_name : {"set1", "set2"}) {
        const FullPotentialData full = set_name == "set1"
                                           ? impute_set1(base)
                                           : impute_set2(base, all_columns(base));
        const SimulationSummary summary = run_study(full, roster, 500, config, 0xBA5E);

        auto find = [&](const std::string& label) -> const SimulationSummary::EstimatorSummary& {
            for (const auto& es : summary.estimators)
                if (es.estimator == label) return es;
            throw Error("missing estimator " + label);
        };
        const auto& screg = find("subclass_regression_K15");
        const auto& naive = find("naive");
        const auto& iptw = find("iptw");

        int beats_naive = 0, beats_iptw = 0;
        for (int t = 2; t <= 5; ++t) {
            auto mean_abs = [&](const SimulationSummary::EstimatorSummary& es) {
                for (const auto& ps : es.pairs)
                    if (ps.t == t && ps.s == 1) return std::abs(ps.mean_bias);
                return 0.0;
            };
            if (mean_abs(screg) < mean_abs(naive)) ++beats_naive;
            if (mean_abs(screg) < mean_abs(iptw)) ++beats_iptw;
        }
        bool set_pass = beats_naive >= 3 && beats_iptw >= 3;
        if (set_name == "set1") set_pass = set_pass && screg.average_coverage >= 0.90;
        if (set_name == "set2")
            set_pass = set_pass && screg.average_coverage > iptw.average_coverage;
        pass = pass && set_pass;
        ss << set_name << ": beats naive " << beats_naive << "/4, beats iptw " << beats_iptw
           << "/4";
        if (set_name == "set1") ss << ", coverage " << screg.average_coverage << " (need 0.90)";
        if (set_name == "set2")
            ss << ", coverage " << screg.average_coverage << " vs iptw "
               << iptw.average_coverage;
        ss << " [failed_reps " << summary.failed_replications << "]; ";
    }
    out.pass = pass;
    out.detail = ss.str();
    return out;
}

// ---------------------------------------------------------------------------
// 9. Null calibration of the balance audit
// ---------------------------------------------------------------------------
Outcome criterion_null_calibration() {
    Rng rng(0xCA1);
    long long cells = 0, hits = 0;
    for (int audit = 0; audit < 2000; ++audit) {
        const int n = 1000;
        Eigen::MatrixXd x(n, 1);
        std::vector<int> t(n);
        Eigen::VectorXd scores(n);
        for (int i = 0; i < n; ++i) {
            x(i, 0) = rng.normal();
            t[i] = 1 + rng.uniform_int(0, 4);
            scores[i] = rng.normal();  // design score independent of x and t
        }
        const Dataset data = testutil::make_dataset(x, t, Eigen::VectorXd::Zero(n), 5);
        const SubclassPartition part = subclassify(data, scores, 5);
        const BalanceMatrix m = balance_audit(data, part, {0});
        for (const auto& cell : m.tau_pk[0]) {
            if (cell.flagged) continue;
            ++cells;
            if (cell.result.p_value < 0.05) ++hits;
        }
    }
    const double prop = static_cast<double>(hits) / static_cast<double>(cells);
    const double sd = std::sqrt(0.05 * 0.95 / static_cast<double>(cells));
    Outcome out;
    out.pass = std::abs(prop - 0.05) <= 3.0 * sd;
    std::ostringstream ss;
    ss << "rejection rate " << prop << " over " << cells << " cells (3 SD window " << 3.0 * sd
       << ")";
    out.detail = ss.str();
    return out;
}

// ---------------------------------------------------------------------------
// 10. Determinism of the simulate entry point
// ---------------------------------------------------------------------------
Outcome criterion_determinism() {
    namespace fs = std::filesystem;
    Rng rng(0xD37);
    const Dataset base = study_base(400, rng);

    const fs::path dir = fs::temp_directory_path() / "ordcausal_acceptance";
    fs::create_directories(dir);
    std::ostringstream csv;
    csv << "x1,x2,x3,x4,b1,b2,x7,x8,y,t\n";
    const char* levels[5] = {"l1", "l2", "l3", "l4", "l5"};
    csv.precision(17);
    for (int i = 0; i < base.n(); ++i) {
        for (int j = 0; j < 8; ++j) csv << base.x(i, j) << ",";
        csv << base.y[i] << "," << levels[base.t[i] - 1] << "\n";
    }
    const fs::path data_path = dir / "base.csv";
    {
        std::ofstream f(data_path, std::ios::binary);
        f << csv.str();
    }

    RunConfig cfg;
    cfg.mode = "simulate";
    cfg.input_path = data_path.string();
    cfg.schema.outcome_column = "y";
    cfg.schema.treatment_column = "t";
    cfg.schema.treatment_levels = {"l1", "l2", "l3", "l4", "l5"};
    const char* names[8] = {"x1", "x2", "x3", "x4", "b1", "b2", "x7", "x8"};
    for (int j = 0; j < 8; ++j) {
        ColumnSpec spec;
        spec.name = names[j];
        spec.type = (j == 4 || j == 5) ? ColumnType::binary : ColumnType::numeric;
        cfg.schema.covariates.push_back(spec);
    }
    cfg.seed = 20240606;
    cfg.bootstrap_b = 0;
    cfg.run_iptw = false;
    cfg.simulation.sets = {"set1", "set2"};
    cfg.simulation.M = 50;
    cfg.simulation.n_sim_covariates = 5;
    cfg.simulation.estimators = {{EstimatorKind::naive, 0},
                                 {EstimatorKind::subclass_regression, 5}};

    std::vector<std::string> dumps;
    for (int threads : {1, 2, 0, 1}) {
        cfg.threads = threads;
        dumps.push_back(report_to_json(run_simulation(cfg)).dump());
    }
    fs::remove_all(dir);

    Outcome out;
    out.pass = dumps[0] == dumps[1] && dumps[0] == dumps[2] && dumps[0] == dumps[3];
    out.detail = out.pass ? "4 runs over worker counts {1,2,default,1} byte-identical"
                          : "JSON output differed across runs";
    return out;
}

// ---------------------------------------------------------------------------
// 11. External NHANES extract, when supplied
// ---------------------------------------------------------------------------
CsvSchema nhanes_schema() {
    CsvSchema schema;
    const std::vector<std::pair<std::string, ColumnType>> covariates = {
        {"gender_male", ColumnType::binary},
        {"race_hispanic", ColumnType::binary},
        {"household_size", ColumnType::numeric},
        {"born_to_be_fat", ColumnType::ordinal},
        {"drug_user", ColumnType::binary},
        {"smoker", ColumnType::binary},
        {"safe_sex", ColumnType::binary},
        {"race_black", ColumnType::binary},
        {"heart_disease", ColumnType::binary},
        {"drinks_per_day", ColumnType::numeric},
        {"race_other", ColumnType::binary},
        {"pregnant", ColumnType::binary},
        {"meals_away_sq", ColumnType::numeric},
        {"meals_away", ColumnType::numeric},
        {"prior_bmi", ColumnType::numeric},
        {"age", ColumnType::numeric},
        {"diabetic_medicine", ColumnType::binary},
        {"diabetic", ColumnType::binary},
        {"race_white", ColumnType::binary},
        {"doct_advice_2", ColumnType::binary},
        {"doct_advice_3", ColumnType::binary},
        {"income", ColumnType::ordinal},
        {"weight_thoughts", ColumnType::ordinal},
        {"food_security", ColumnType::ordinal},
        {"doct_advice_1", ColumnType::binary},
        {"doct_advice_4", ColumnType::binary},
        {"healthy_diet", ColumnType::binary},
        {"metabolic_equivalence_sq", ColumnType::numeric},
        {"metabolic_equivalence", ColumnType::numeric},
        {"heard_diet_guidelines", ColumnType::binary},
        {"heard_five_a_day", ColumnType::binary},
        {"education", ColumnType::ordinal},
        {"heard_food_pyramid", ColumnType::binary}};
    for (const auto& [name, type] : covariates)
        schema.covariates.push_back({name, type, CovariateRole::gps});
    schema.outcome_column = "bmi";
    schema.treatment_column = "label_use";
    schema.treatment_levels = {"never", "rare", "some", "most", "always"};
    return schema;
}

Outcome criterion_nhanes() {
    const char* env = std::getenv("ORDCAUSAL_NHANES_CSV");
    std::string path = env ? env : "data/nhanes_2005_06.csv";
    if (!std::filesystem::exists(path)) {
        Outcome out;
        out.skipped = true;
        out.detail = "external NHANES extract not provided (set ORDCAUSAL_NHANES_CSV)";
        return out;
    }

    Outcome out;
    std::ostringstream ss;
    const CsvSchema schema = nhanes_schema();
    const IngestResult ingested = ingest(path, schema);
    const Dataset& data = ingested.data;
    bool pass = data.n() == 4272;
    ss << "n=" << data.n() << " (want 4272)";

    const OrdinalFit fit = fit_ordered_logit(data);
    const auto [e2_data, e2_report] =
        trim_common_support(data, fit, EliminationRule::E2, {});
    pass = pass && std::abs(e2_data.n() - 4142) <= 10;
    ss << "; E2 n=" << e2_data.n() << " (want 4142 +/- 10)";

    ColumnSelection continuous;
    for (int j = 0; j < data.p(); ++j)
        if (data.covariate_types[j] == ColumnType::numeric) continuous.push_back(j);
    const auto [e3_data, e3_report] =
        trim_common_support(data, fit, EliminationRule::E3, continuous);
    pass = pass && std::abs(e3_data.n() - 4076) <= 10;
    ss << "; E3 n=" << e3_data.n() << " (want 4076 +/- 10)";

    const Eigen::VectorXd scores = linear_predictors(fit, data);
    for (int k : {10, 15}) {
        const SubclassPartition part = subclassify(data, scores, k);
        const GlobalTest test = global_test(data, part, all_columns(data));
        pass = pass && test.p_value < 0.01;
        ss << "; ANCOVA K=" << k << " p=" << test.p_value;
    }

    ColumnSelection pca_cols;
    for (int j = 0; j < data.p(); ++j)
        if (data.covariate_names[j] != "meals_away_sq" &&
            data.covariate_names[j] != "metabolic_equivalence_sq")
            pca_cols.push_back(j);
    const double expected[4] = {-0.14, -0.18, -1.20, 0.32};
    bool truth_ok = false;
    for (const bool use_correlation : {true, false}) {
        const FullPotentialData set2 = impute_set2(data, pca_cols, use_correlation);
        bool all_close = true;
        for (int t = 2; t <= 5; ++t)
            all_close =
                all_close && std::abs(set2.true_pate(t - 1, 0) - expected[t - 2]) <= 0.02;
        if (all_close) {
            truth_ok = true;
            ss << "; set2 truths matched (" << (use_correlation ? "correlation" : "covariance")
               << " PCA)";
            break;
        }
    }
    if (!truth_ok) ss << "; set2 truths did not match under either PCA mode";
    pass = pass && truth_ok;

    out.pass = pass;
    out.detail = ss.str();
    return out;
}

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;  // 0 = no stated limit
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "rank correlation on the published contingency fixture", 1.0, criterion_tau_fixture},
        {2, "rank correlation equals the brute-force oracle", 10.0, criterion_tau_oracle},
        {3, "analytic gradients match finite differences", 5.0, criterion_gradients},
        {4, "ordered-logit coefficient recovery", 10.0, criterion_recovery},
        {5, "degenerate estimator identities", 0.0, criterion_degenerate},
        {6, "pairwise estimates are transitive", 0.0, criterion_transitivity},
        {7, "within-subclass estimator is empirically unbiased", 300.0, criterion_unbiasedness},
        {8, "replication study ranks the estimators", 900.0, criterion_study},
        {9, "balance audit is calibrated under the null", 120.0, criterion_null_calibration},
        {10, "simulate is deterministic across worker counts", 0.0, criterion_determinism},
        {11, "external NHANES reproduction", 0.0, criterion_nhanes},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = criterion.time_limit_s <= 0.0 || elapsed <= criterion.time_limit_s;

        std::string status;
        if (outcome.skipped)
            status = "SKIP";
        else if (outcome.pass && in_time)
            status = "PASS";
        else
            status = "FAIL";
        if (status == "FAIL") ++failures;

        std::printf("%s criterion %2d (%7.2fs): %s - %s%s\n", status.c_str(), criterion.id,
                    elapsed, criterion.name.c_str(), outcome.detail.c_str(),
                    (!in_time ? " [over time limit]" : ""));
        std::fflush(stdout);
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed (or skipped pending external data)\n");
    return 0;
}
