#include <benchmark/benchmark.h>

#include "ordcausal/balance.hpp"
#include "ordcausal/design.hpp"
#include "ordcausal/estimation.hpp"
#include "ordcausal/ordered_logit.hpp"
#include "ordcausal/prob.hpp"
#include "ordcausal/rng.hpp"

namespace {

using namespace ordcausal;

Dataset synthetic(int n, int p, int z, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd x(n, p);
    std::vector<int> t(n);
    Eigen::VectorXd y(n);
    Eigen::VectorXd theta = Eigen::VectorXd::LinSpaced(z - 1, -1.5, 1.5);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
        const double lp = 0.8 * x(i, 0) - 0.5 * x(i, 1);
        const double u = rng.uniform();
        t[i] = z;
        for (int k = 0; k < z - 1; ++k)
            if (u <= logistic_cdf(theta[k] - lp)) {
                t[i] = k + 1;
                break;
            }
        y[i] = 0.5 * t[i] + x(i, 0) + rng.normal();
    }
    Dataset data;
    for (int j = 0; j < p; ++j) {
        data.covariate_names.push_back("x" + std::to_string(j));
        data.covariate_types.push_back(ColumnType::numeric);
    }
    data.ids.resize(n);
    for (int i = 0; i < n; ++i) data.ids[i] = i;
    data.x = std::move(x);
    data.t = std::move(t);
    data.y = std::move(y);
    data.n_levels = z;
    return data;
}

void BM_KendallTau(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(1);
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = rng.uniform_int(0, 7);
        b[i] = rng.uniform_int(0, 4);
    }
    for (auto _ : state) benchmark::DoNotOptimize(kendall_tau_b(a, b));
    state.SetComplexityN(n);
}
BENCHMARK(BM_KendallTau)->Range(256, 65536)->Complexity(benchmark::oNLogN);

void BM_FitOrderedLogit(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Dataset data = synthetic(n, 8, 5, 2);
    for (auto _ : state) benchmark::DoNotOptimize(fit_ordered_logit(data));
}
BENCHMARK(BM_FitOrderedLogit)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_SubclassifyAndAudit(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Dataset data = synthetic(n, 8, 5, 3);
    const OrdinalFit fit = fit_ordered_logit(data);
    const Eigen::VectorXd scores = linear_predictors(fit, data);
    for (auto _ : state) {
        const SubclassPartition part = subclassify(data, scores, 15);
        benchmark::DoNotOptimize(balance_audit(data, part, all_columns(data)));
    }
}
BENCHMARK(BM_SubclassifyAndAudit)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_SubclassRegression(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Dataset data = synthetic(n, 8, 5, 4);
    const OrdinalFit fit = fit_ordered_logit(data);
    const SubclassPartition part = subclassify(data, linear_predictors(fit, data), 10);
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_subclass_regression(data, part, all_columns(data)));
}
BENCHMARK(BM_SubclassRegression)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
