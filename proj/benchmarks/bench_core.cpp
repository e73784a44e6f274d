#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "causalabs/abstraction.hpp"
#include "causalabs/eval.hpp"
#include "causalabs/graph.hpp"
#include "causalabs/learn.hpp"
#include "causalabs/rng.hpp"
#include "causalabs/scm.hpp"
#include "causalabs/setcalc.hpp"

using namespace causalabs;

namespace {

Dag reference_graph() {
  return validate_dag(5, {{1, 3}, {2, 3}, {3, 4}, {3, 5}});
}
const TargetFamily kReferenceTargets{
    {VertexSet{3}, VertexSet{3, 4}, VertexSet{4, 5}}};

void BM_sigma_atoms(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(1, 0, 0);
  std::vector<VertexSet> sets;
  for (int k = 0; k < 6; ++k) {
    std::vector<Node> members;
    for (Node v = 1; v <= n; ++v) {
      if (rng.next_uniform() < 0.5) members.push_back(v);
    }
    sets.emplace_back(std::move(members));
  }
  const SetFamily family(n, sets);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sigma_atoms(family));
  }
}
BENCHMARK(BM_sigma_atoms)->Arg(8)->Arg(16)->Arg(32);

void BM_identifiable_abstraction(benchmark::State& state) {
  const Dag g = reference_graph();
  for (auto _ : state) {
    benchmark::DoNotOptimize(identifiable_abstraction(g, kReferenceTargets));
  }
}
BENCHMARK(BM_identifiable_abstraction);

void BM_sample_pairs(benchmark::State& state) {
  const Dag g = reference_graph();
  const LinearGaussianScm scm = sample_scm(g, 3);
  const MixingModel mixing = sample_rotation(5, 3);
  const InterventionModel interventions{kReferenceTargets};
  const std::int64_t rows = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_pairs(scm, interventions, mixing, rows, 3, false));
  }
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_sample_pairs)->Arg(1000)->Arg(10000);

void BM_relaxed_loglik_grad(benchmark::State& state) {
  const Dag g = reference_graph();
  const LinearGaussianScm scm = sample_scm(g, 4);
  const MixingModel mixing = sample_rotation(5, 4);
  const InterventionModel interventions{kReferenceTargets};
  const CounterfactualDataset data =
      sample_pairs(scm, interventions, mixing, state.range(0), 4, false);
  const auto candidates = default_candidate_family(5);

  FitParams params;
  params.skew = Eigen::MatrixXd::Zero(5, 5);
  params.coefficients = Eigen::MatrixXd::Zero(5, 5);
  params.logits = Eigen::VectorXd::Zero(31);
  FitGradient grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(relaxed_loglik_grad(
        params, candidates, data.x, data.x_tilde, 0.1, &grad));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_relaxed_loglik_grad)->Arg(1000)->Arg(20000);

void BM_match_blocks(benchmark::State& state) {
  const Eigen::MatrixXd q = sample_rotation(8, 5).rotation();
  const Partition p(8, {VertexSet{1, 2, 3}, VertexSet{4, 5}, VertexSet{6, 7},
                        VertexSet{8}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(match_blocks(q, p));
  }
}
BENCHMARK(BM_match_blocks);

}  // namespace

BENCHMARK_MAIN();
