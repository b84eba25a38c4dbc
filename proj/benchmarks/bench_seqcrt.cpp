#include "seqcrt/crt.hpp"
#include "seqcrt/elastic_net.hpp"
#include "seqcrt/response.hpp"
#include "seqcrt/selection.hpp"
#include "seqcrt/theory.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace seqcrt;

struct Problem {
  CovariateModel model;
  Dataset data;
};

Problem linear_problem(Index n, Index p) {
  Problem prob{GaussianModel::ar1(p, 0.5), {}};
  RngStream rng(1, 0);
  prob.data.x = sample_rows(prob.model, n, rng);
  prob.data.y = generate_response(prob.data.x, ResponseSpec::standard('a', CovariateFamily::ar1, 5.0, 20), rng).y;
  return prob;
}

void BM_SeqStep(benchmark::State& state) {
  const Index p = state.range(0);
  RngStream rng(2, 0);
  std::vector<double> pv(p);
  for (double& v : pv) v = rng.uniform() < 0.2 ? 0.05 : 0.5;
  const Ordering order = Ordering::identity(p);
  for (auto _ : state) benchmark::DoNotOptimize(seqstep_select(pv, order, {0.1, 0.1}));
  state.SetComplexityN(p);
}
BENCHMARK(BM_SeqStep)->Range(1 << 8, 1 << 16)->Complexity(benchmark::oN);

void BM_Resample(benchmark::State& state) {
  const Index n = 300, p = state.range(0);
  Problem prob = linear_problem(n, p);
  ColumnResampler sampler(prob.model, prob.data.x);
  RngStream rng(3, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.resample(p / 2, 9, rng));
}
BENCHMARK(BM_Resample)->Arg(100)->Arg(300);

void BM_HmmResample(benchmark::State& state) {
  const Index p = state.range(0);
  CovariateModel model = HmmModel::sticky_five_state(p);
  RngStream rng(4, 0);
  Matrix x = sample_rows(model, 300, rng);
  ColumnResampler sampler(model, x);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.resample(p / 2, 9, rng));
}
BENCHMARK(BM_HmmResample)->Arg(100)->Arg(300);

void BM_LassoPath(benchmark::State& state) {
  const Index p = state.range(0);
  Problem prob = linear_problem(300, p);
  Matrix xc = prob.data.x.rowwise() - prob.data.x.colwise().mean();
  Vector yc = prob.data.y.array() - prob.data.y.mean();
  const std::vector<double> grid = log_lambda_grid(lambda_max(xc, yc), 50, 0.01);
  for (auto _ : state) {
    ElasticNetPath path(xc, yc, 1e-6);
    for (double lambda : grid) path.solve(lambda, 1e-7);
    benchmark::DoNotOptimize(path.beta());
  }
}
BENCHMARK(BM_LassoPath)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_CrtVariable(benchmark::State& state) {
  const CrtMode mode = state.range(0) ? CrtMode::original : CrtMode::one_shot;
  Problem prob = linear_problem(300, 100);
  ColumnResampler sampler(prob.model, prob.data.x);
  CrtConfig cfg;
  cfg.mode = mode;
  RngStream rng(5, 0);
  for (auto _ : state) {
    RngStream stream = rng.derive(static_cast<std::uint64_t>(state.iterations()));
    ResampleBundle bundle = crt_resample(sampler, prob.data.x, 7, cfg.randomizations, stream);
    benchmark::DoNotOptimize(crt_pvalue(bundle, prob.data.x, prob.data.y, prob.data.response_kind, cfg, stream));
  }
  state.SetLabel(to_string(mode));
}
BENCHMARK(BM_CrtVariable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AdversarialGlobalNull(benchmark::State& state) {
  AdversarialSpec spec;
  spec.p = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(adversarial_fdr(spec, 100, RngStream(6, 0), 1));
}
BENCHMARK(BM_AdversarialGlobalNull)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_LemmaGrid(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lemma_grid_oracle(0.5, 0.1, 0.01, static_cast<int>(state.range(0)), 6));
}
BENCHMARK(BM_LemmaGrid)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
