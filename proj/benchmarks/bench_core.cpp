#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <cmath>

#include "ptcure/bspline.hpp"
#include "ptcure/mcmc.hpp"
#include "ptcure/model.hpp"
#include "ptcure/posterior.hpp"
#include "ptcure/rng.hpp"
#include "ptcure/simulate.hpp"

using namespace ptcure;

namespace {

const SurvivalDataset& bench_dataset() {
  static const SurvivalDataset data = [] {
    ScenarioConfig scenario = default_scenario(1, 0.25);
    scenario.sample_size = 300;
    Rng rng(split_seed(1234, 0));
    return generate_dataset(scenario, rng).data;
  }();
  return data;
}

const PosteriorEvaluator& bench_evaluator() {
  static const PosteriorEvaluator eval = [] {
    ModelConfig model;
    model.t_rcens = 25.0;
    return PosteriorEvaluator(bench_dataset(), model);
  }();
  return eval;
}

Eigen::VectorXd bench_phi(int num_basis) {
  Eigen::VectorXd phi(num_basis);
  for (int k = 0; k < num_basis; ++k) phi[k] = -1.0 + 0.3 * std::sin(0.7 * k);
  phi[num_basis - 1] = kDefaultFixedPhi;
  return phi;
}

void BM_BasisEval(benchmark::State& state) {
  const KnotGrid grid = build_knot_grid(0.0, 25.0, 12);
  double t = 0.0;
  for (auto _ : state) {
    t = std::fmod(t + 0.37, 25.0);
    benchmark::DoNotOptimize(eval_basis(grid, t));
  }
}
BENCHMARK(BM_BasisEval);

void BM_BaselineTable(benchmark::State& state) {
  const SplineBaseline base = make_spline_baseline(25.0, 12, 300);
  const Eigen::VectorXd phi = bench_phi(12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_baseline_table(base, phi));
  }
}
BENCHMARK(BM_BaselineTable);

void BM_LogLikelihood(benchmark::State& state) {
  const PosteriorEvaluator& eval = bench_evaluator();
  ModelParams params = eval.initial_params();
  params.phi = bench_phi(static_cast<int>(eval.num_basis()));
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval.log_likelihood(params));
  }
}
BENCHMARK(BM_LogLikelihood);

void BM_LikelihoodFromCache(benchmark::State& state) {
  const PosteriorEvaluator& eval = bench_evaluator();
  ModelParams params = eval.initial_params();
  ModelCache cache = eval.make_cache(params);
  for (auto _ : state) {
    eval.refresh_baseline(cache, params.phi);
    benchmark::DoNotOptimize(eval.log_likelihood(cache));
  }
}
BENCHMARK(BM_LikelihoodFromCache);

void BM_McmcIteration(benchmark::State& state) {
  const PosteriorEvaluator& eval = bench_evaluator();
  BlockSampler sampler(eval, eval.initial_params(), PenaltyHypers{});
  const Eigen::Index k = eval.num_basis() - 1;
  const Eigen::Index cure = 1 + eval.data().p();
  const Eigen::Index latency = eval.data().q();
  sampler.set_transforms({Eigen::MatrixXd::Identity(k, k), false},
                         {Eigen::MatrixXd::Identity(cure, cure), false},
                         {Eigen::MatrixXd::Identity(latency, latency), false});
  sampler.set_scales(Eigen::VectorXd::Constant(k + cure + latency, 0.05));
  Rng rng(7);
  for (auto _ : state) {
    int accepted = sampler.update_baseline(rng);
    accepted += sampler.update_cure(rng);
    accepted += sampler.update_latency(rng);
    sampler.draw_hypers(rng);
    benchmark::DoNotOptimize(accepted);
  }
}
BENCHMARK(BM_McmcIteration);

void BM_GibbsTau(benchmark::State& state) {
  const Eigen::VectorXd phi = bench_phi(12);
  const PenaltyMatrix penalty =
      penalty_from_difference(difference_matrix(12, 3), kDefaultRidge);
  const PenaltyHypers hypers;
  Rng rng(11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gibbs_tau(phi, penalty.P, hypers, rng));
  }
}
BENCHMARK(BM_GibbsTau);

}  // namespace

BENCHMARK_MAIN();
