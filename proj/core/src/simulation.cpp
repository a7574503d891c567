#include "ordcausal/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ordcausal/multinomial_logit.hpp"
#include "ordcausal/ordered_logit.hpp"
#include "ordcausal/rng.hpp"

namespace ordcausal {

namespace {

Eigen::MatrixXd pate_from_po(const Eigen::MatrixXd& po) {
    const int z = static_cast<int>(po.cols());
    Eigen::MatrixXd pate = Eigen::MatrixXd::Zero(z, z);
    const Eigen::VectorXd level_mean = po.colwise().mean();
    for (int t = 0; t < z; ++t)
        for (int s = 0; s < z; ++s) pate(t, s) = level_mean[t] - level_mean[s];
    return pate;
}

}  // namespace

FullPotentialData impute_set1(const Dataset& data) {
    data.validate();
    FullPotentialData full;
    full.base = data;
    full.po = data.y.replicate(1, data.n_levels);
    full.true_pate = Eigen::MatrixXd::Zero(data.n_levels, data.n_levels);
    return full;
}

Eigen::VectorXd pc1_scores(const Dataset& data, const ColumnSelection& pca_columns,
                           bool use_correlation) {
    const int n = data.n();
    const int p = static_cast<int>(pca_columns.size());
    if (p < 1) throw InvalidArgument("pc1_scores: empty column selection");
    Eigen::MatrixXd x = select_columns(data, pca_columns);
    for (int j = 0; j < p; ++j) {
        const double mean = x.col(j).mean();
        x.col(j).array() -= mean;
        if (use_correlation) {
            const double sd = std::sqrt(x.col(j).squaredNorm() / (n - 1));
            if (sd <= 0.0)
                throw ConstantVector("pc1_scores: constant covariate column " +
                                     std::to_string(pca_columns[j]));
            x.col(j) /= sd;
        }
    }
    const Eigen::MatrixXd cov = x.transpose() * x / (n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw Error("pc1_scores: eigendecomposition failed");
    Eigen::VectorXd v1 = solver.eigenvectors().col(p - 1);  // ascending eigenvalues

    // Canonical sign: the largest-magnitude loading is positive.
    int arg = 0;
    for (int j = 1; j < p; ++j)
        if (std::abs(v1[j]) > std::abs(v1[arg])) arg = j;
    if (v1[arg] < 0.0) v1 = -v1;
    return x * v1;
}

FullPotentialData impute_set2(const Dataset& data, const ColumnSelection& pca_columns,
                              bool use_correlation) {
    data.validate();
    const int n = data.n();
    const int z = data.n_levels;
    const std::vector<int> counts = data.level_counts();
    for (int t = 0; t < z; ++t)
        if (counts[t] == 0)
            throw EmptyLevel("impute_set2: no donors at level " + std::to_string(t + 1));

    const Eigen::VectorXd pc1 = pc1_scores(data, pca_columns, use_correlation);

    // Donor index per level: distinct PC1 values with the lowest unit id and
    // its row at each value, sorted by value.
    struct DonorGroup {
        double value;
        int min_id;
        int row;
    };
    std::vector<std::vector<DonorGroup>> donors(z);
    for (int t = 0; t < z; ++t) {
        std::vector<int> rows;
        for (int i = 0; i < n; ++i)
            if (data.t[i] == t + 1) rows.push_back(i);
        std::sort(rows.begin(), rows.end(), [&](int a, int b) {
            if (pc1[a] != pc1[b]) return pc1[a] < pc1[b];
            return data.ids[a] < data.ids[b];
        });
        for (int r : rows) {
            if (!donors[t].empty() && donors[t].back().value == pc1[r]) continue;
            donors[t].push_back({pc1[r], data.ids[r], r});
        }
    }

    FullPotentialData full;
    full.base = data;
    full.po.resize(n, z);
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < z; ++t) {
            if (data.t[i] == t + 1) {
                full.po(i, t) = data.y[i];
                continue;
            }
            const auto& groups = donors[t];
            auto it = std::lower_bound(
                groups.begin(), groups.end(), pc1[i],
                [](const DonorGroup& g, double v) { return g.value < v; });
            const DonorGroup* best = nullptr;
            auto consider = [&](const DonorGroup& g) {
                if (!best) {
                    best = &g;
                    return;
                }
                const double d_new = std::abs(pc1[i] - g.value);
                const double d_best = std::abs(pc1[i] - best->value);
                if (d_new < d_best || (d_new == d_best && g.min_id < best->min_id)) best = &g;
            };
            if (it != groups.end()) consider(*it);
            if (it != groups.begin()) consider(*std::prev(it));
            full.po(i, t) = data.y[best->row];
        }
    }
    full.true_pate = pate_from_po(full.po);
    return full;
}

Dataset simulate_replication(const FullPotentialData& full, int n_covariates, std::uint64_t seed) {
    const Dataset& base = full.base;
    if (n_covariates < 1 || n_covariates > base.p())
        throw InvalidArgument("simulate_replication: n_covariates outside 1..p");

    Rng rng(seed);
    ColumnSelection subset = rng.sample_without_replacement(base.p(), n_covariates);
    std::sort(subset.begin(), subset.end());

    const MultinomialFit mfit = fit_multinomial_logit(base, subset);
    if (!mfit.converged)
        throw NonConvergence("simulate_replication: assignment model did not converge");

    const Eigen::MatrixXd xsub = select_columns(base, subset);
    Dataset rep = base;
    for (int i = 0; i < base.n(); ++i) {
        const Eigen::VectorXd probs = predict_category_probs(mfit, xsub.row(i).transpose());
        std::vector<double> pv(probs.data(), probs.data() + probs.size());
        const int t_sim = rng.categorical(pv) + 1;
        rep.t[i] = t_sim;
        rep.y[i] = full.po(i, t_sim - 1);
    }
    return rep;
}

std::string EstimatorSpec::label() const {
    switch (kind) {
        case EstimatorKind::subclass_means: return "subclass_means_K" + std::to_string(K);
        case EstimatorKind::subclass_regression:
            return "subclass_regression_K" + std::to_string(K);
        case EstimatorKind::naive: return "naive";
        case EstimatorKind::standard_regression: return "standard_regression";
        case EstimatorKind::iptw: return "iptw";
    }
    return "unknown";
}

namespace {

bool needs_gps(const std::vector<EstimatorSpec>& estimators) {
    for (const auto& e : estimators)
        if (e.kind == EstimatorKind::subclass_means ||
            e.kind == EstimatorKind::subclass_regression || e.kind == EstimatorKind::iptw)
            return true;
    return false;
}

}  // namespace

ReplicationResult run_replication(const FullPotentialData& full,
                                  const std::vector<EstimatorSpec>& estimators,
                                  const StudyConfig& config, std::uint64_t seed, int m) {
    const int z = full.base.n_levels;
    const auto pairs = level_pairs(z);

    const Dataset rep = simulate_replication(full, config.n_sim_covariates, seed);

    ReplicationResult result;
    result.m = m;

    Dataset trimmed;
    OrdinalFit gps;
    std::map<int, SubclassPartition> partitions;
    const Dataset* analysis_data = &rep;
    if (needs_gps(estimators)) {
        const ColumnSelection gps_cols =
            config.gps_columns.empty() ? all_columns(rep) : config.gps_columns;
        const OrdinalFit first = fit_ordered_logit(rep, gps_cols);
        if (!first.converged)
            throw NonConvergence("run_replication: GPS model did not converge");
        auto [data2, report] =
            trim_common_support(rep, first, config.elimination, config.continuous_columns);
        if (!report.refit.converged)
            throw NonConvergence("run_replication: trimmed GPS refit did not converge");
        trimmed = std::move(data2);
        gps = report.refit;
        analysis_data = &trimmed;
        const Eigen::VectorXd scores = linear_predictors(gps, trimmed);
        for (const auto& e : estimators)
            if ((e.kind == EstimatorKind::subclass_means ||
                 e.kind == EstimatorKind::subclass_regression) &&
                !partitions.count(e.K))
                partitions.emplace(e.K, subclassify(trimmed, scores, e.K));
    }

    for (const auto& e : estimators) {
        EffectTable table;
        switch (e.kind) {
            case EstimatorKind::subclass_means:
                table = estimate_subclass_means(*analysis_data, partitions.at(e.K));
                break;
            case EstimatorKind::subclass_regression:
                table = estimate_subclass_regression(*analysis_data, partitions.at(e.K),
                                                     config.adjustment_columns)
                            .first;
                break;
            case EstimatorKind::naive:
                table = estimate_naive(rep);
                break;
            case EstimatorKind::standard_regression:
                table = estimate_standard_regression(rep, config.adjustment_columns);
                break;
            case EstimatorKind::iptw:
                table = estimate_iptw(*analysis_data, gps, config.bootstrap_b,
                                      Rng::derive(seed, 0x1b7fULL).next_u64())
                            .table;
                break;
        }
        const std::string label = e.label();
        std::vector<double> bias(pairs.size());
        std::vector<int> cover(pairs.size());
        int all = 1;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto [t, s] = pairs[i];
            const double truth = full.true_pate(t - 1, s - 1);
            bias[i] = table.estimate(t, s) - truth;
            cover[i] = (std::abs(bias[i]) <= 1.96 * table.se(t, s)) ? 1 : 0;
            if (!cover[i]) all = 0;
        }
        result.tables.emplace(label, std::move(table));
        result.bias.emplace(label, std::move(bias));
        result.coverage.emplace(label, std::move(cover));
        result.allcoverage.emplace(label, all);
    }
    return result;
}

SimulationSummary run_study(const FullPotentialData& full,
                            const std::vector<EstimatorSpec>& estimators, int M,
                            const StudyConfig& config, std::uint64_t seed) {
    if (M < 1) throw InvalidArgument("run_study: M must be >= 1");
    const int z = full.base.n_levels;
    const auto pairs = level_pairs(z);

    struct Slot {
        bool ok = false;
        int retries = 0;
        ReplicationResult result;
    };
    std::vector<Slot> slots(M);
    std::exception_ptr fatal;
    std::atomic<bool> has_fatal{false};

#ifdef _OPENMP
    const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (int m = 0; m < M; ++m) {
        if (has_fatal.load(std::memory_order_relaxed)) continue;
        for (int retry = 0; retry <= config.max_retries; ++retry) {
            try {
                slots[m].result = run_replication(full, estimators, config,
                                                  Rng::derive(seed, m, retry).next_u64(), m);
                slots[m].ok = true;
                break;
            } catch (const NonConvergence&) {
                ++slots[m].retries;
            } catch (const SeparationDetected&) {
                ++slots[m].retries;
            } catch (const RankDeficientDesign&) {
                ++slots[m].retries;
            } catch (const EmptyLevel&) {
                ++slots[m].retries;
            } catch (const EmptyCell&) {
                ++slots[m].retries;
            } catch (const EmptySupport&) {
                ++slots[m].retries;
            } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
                {
                    if (!fatal) fatal = std::current_exception();
                }
                has_fatal.store(true, std::memory_order_relaxed);
                break;
            }
        }
    }
    if (fatal) std::rethrow_exception(fatal);

    SimulationSummary summary;
    summary.M = M;
    summary.n_levels = z;
    for (const auto& slot : slots) {
        if (slot.ok)
            ++summary.completed;
        else
            ++summary.failed_replications;
        summary.total_retries += slot.retries;
    }

    for (const auto& e : estimators) {
        const std::string label = e.label();
        SimulationSummary::EstimatorSummary es;
        es.estimator = label;
        long long covered = 0, cells = 0, complete = 0;
        std::vector<double> sum(pairs.size(), 0.0), sumsq(pairs.size(), 0.0);
        for (const auto& slot : slots) {
            if (!slot.ok) continue;
            const auto& bias = slot.result.bias.at(label);
            const auto& cover = slot.result.coverage.at(label);
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                sum[i] += bias[i];
                sumsq[i] += bias[i] * bias[i];
                covered += cover[i];
                ++cells;
            }
            complete += slot.result.allcoverage.at(label);
        }
        const int mm = summary.completed;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            SimulationSummary::PairStat ps;
            ps.t = pairs[i].first;
            ps.s = pairs[i].second;
            if (mm > 0) ps.mean_bias = sum[i] / mm;
            if (mm > 1)
                ps.sd_bias = std::sqrt(std::max(0.0, (sumsq[i] - mm * ps.mean_bias * ps.mean_bias) /
                                                         (mm - 1)));
            es.pairs.push_back(ps);
        }
        es.average_coverage = cells > 0 ? static_cast<double>(covered) / cells : 0.0;
        es.complete_coverage = mm > 0 ? static_cast<double>(complete) / mm : 0.0;
        summary.estimators.push_back(std::move(es));
    }
    return summary;
}

}  // namespace ordcausal
