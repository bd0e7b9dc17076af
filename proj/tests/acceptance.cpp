// Acceptance gate for the cure model library.  Every criterion runs end to
// end against library entry points and prints one verdict line, with the
// measured quantities indented underneath.  The exit code is the number of
// failed criteria; skipped criteria do not fail the gate.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "ptcure/bspline.hpp"
#include "ptcure/io.hpp"
#include "ptcure/mcmc.hpp"
#include "ptcure/model.hpp"
#include "ptcure/posterior.hpp"
#include "ptcure/rng.hpp"
#include "ptcure/simulate.hpp"
#include "ptcure/summaries.hpp"
#include "ptcure/weibull.hpp"

using namespace ptcure;
namespace fs = std::filesystem;

namespace {

std::string fmt(const char* pattern, ...) {
  char buffer[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buffer, sizeof(buffer), pattern, args);
  va_end(args);
  return buffer;
}

struct Gate {
  bool ok = true;
  std::string skip_reason;
  std::vector<std::string> notes;

  void check(bool condition, const std::string& what) {
    notes.push_back(std::string(condition ? "ok    " : "FAIL  ") + what);
    if (!condition) ok = false;
  }
  void info(const std::string& what) { notes.push_back("      " + what); }
  void skip(const std::string& reason) { skip_reason = reason; }
};

int pick_threads() {
  if (const char* env = std::getenv("PTCURE_ACCEPT_THREADS")) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

StudyResult run_study(int setting, std::uint64_t seed, int threads) {
  ScenarioConfig config = default_scenario(setting, 0.25);
  config.sample_size = 300;
  config.replicates = 100;
  config.seed = seed;
  config.chain.iterations = 8000;
  config.chain.burnin = 2000;
  config.curve_points = 50;
  config.curve_thin = 50;
  return replicate_study(config, threads);
}

// Criterion 1: with sufficient follow-up, a 100-replicate study at n = 300
// recovers all regression coefficients with small bias, near-nominal 95%
// coverage, and replicate spread close to the reference values.
Gate criterion_sufficient_followup(int threads) {
  Gate gate;
  const StudyResult study = run_study(1, 1001, threads);
  gate.check(study.failures == 0,
             fmt("all 100 replicates fitted (%d failed)", study.failures));
  if (study.table.size() != 5) {
    gate.check(false, fmt("expected 5 parameter rows, got %zu", study.table.size()));
    return gate;
  }
  const double ese_ref[5] = {0.130, 0.112, 0.172, 0.138, 0.221};
  for (int j = 0; j < 5; ++j) {
    const StudyRow& row = study.table[j];
    gate.check(std::abs(row.bias) <= 0.06,
               fmt("%s bias %+.4f, |bias| <= 0.06", row.name.c_str(), row.bias));
    gate.check(row.coverage95 >= 89.0 && row.coverage95 <= 99.0,
               fmt("%s 95%% coverage %.1f in [89, 99]", row.name.c_str(),
                   row.coverage95));
    gate.check(row.ese >= 0.6 * ese_ref[j] && row.ese <= 1.4 * ese_ref[j],
               fmt("%s ese %.4f within 40%% of %.3f", row.name.c_str(), row.ese,
                   ese_ref[j]));
  }
  return gate;
}

// Criterion 2: under short follow-up with disjoint covariate blocks, the
// intercept absorbs the unidentified mass log F0(t_rcens) while the slope
// of each block stays unbiased.
Gate criterion_short_followup(int threads) {
  Gate gate;
  const StudyResult study = run_study(3, 1003, threads);
  gate.check(study.failures == 0,
             fmt("all 100 replicates fitted (%d failed)", study.failures));
  if (study.table.size() != 3) {
    gate.check(false, fmt("expected 3 parameter rows, got %zu", study.table.size()));
    return gate;
  }
  const double drift = std::log(0.9);
  gate.check(std::abs(study.table[0].bias - drift) <= 0.05,
             fmt("beta0 bias %+.4f within 0.05 of %+.4f", study.table[0].bias,
                 drift));
  gate.check(std::abs(study.table[1].bias) <= 0.06,
             fmt("%s bias %+.4f, |bias| <= 0.06", study.table[1].name.c_str(),
                 study.table[1].bias));
  gate.check(std::abs(study.table[2].bias) <= 0.06,
             fmt("%s bias %+.4f, |bias| <= 0.06", study.table[2].name.c_str(),
                 study.table[2].bias));
  return gate;
}

void check_gamma_moments(Gate& gate, const char* name,
                         const std::function<double(Rng&)>& draw, double shape,
                         double rate, std::uint64_t seed) {
  const int n = 100000;
  Rng rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double value = draw(rng);
    sum += value;
    sum_sq += value * value;
  }
  const double mean_hat = sum / n;
  const double var_hat = (sum_sq - n * mean_hat * mean_hat) / (n - 1);
  const double mean = shape / rate;
  const double var = shape / (rate * rate);
  const double se_mean = std::sqrt(var / n);
  const double se_var = var * std::sqrt((2.0 + 6.0 / shape) / n);
  gate.check(std::abs(mean_hat - mean) <= 3.0 * se_mean,
             fmt("%s mean %.6f vs %.6f (3 MC SE = %.6f)", name, mean_hat, mean,
                 3.0 * se_mean));
  gate.check(std::abs(var_hat - var) <= 3.0 * se_var,
             fmt("%s variance %.6f vs %.6f (3 MC SE = %.6f)", name, var_hat,
                 var, 3.0 * se_var));
}

void check_gamma_ks(Gate& gate, const char* name,
                    const std::function<double(Rng&)>& draw, double shape,
                    double rate, std::uint64_t seed_base) {
  const int reps = 100;
  const int n = 2000;
  const double critical = 1.628 / std::sqrt(static_cast<double>(n));
  int passes = 0;
  for (int r = 0; r < reps; ++r) {
    Rng rng(seed_base + static_cast<std::uint64_t>(r));
    std::vector<double> draws(n);
    for (double& value : draws) value = draw(rng);
    const double stat = oracle::ks_statistic(
        draws, [&](double v) { return oracle::gamma_cdf(v, shape, rate); });
    if (stat < critical) ++passes;
  }
  gate.check(passes >= 95,
             fmt("%s KS at level 0.01: %d of %d seeded reps pass", name, passes,
                 reps));
}

// Criterion 3: the two conjugate conditionals, frozen at a fixed state,
// reproduce the analytic Gamma moments and distribution.
Gate criterion_gibbs_exactness() {
  Gate gate;
  const int K = 12;
  Eigen::VectorXd phi(K);
  for (int k = 0; k < K; ++k) phi[k] = -1.0 + 0.4 * std::sin(1.3 * (k + 1));
  phi[K - 1] = kDefaultFixedPhi;
  const PenaltyMatrix penalty =
      penalty_from_difference(difference_matrix(K, 3), kDefaultRidge);

  PenaltyHypers tau_state;
  tau_state.delta = 0.7;
  const double quad = phi.dot(penalty.P * phi);
  const double tau_shape = 0.5 * (tau_state.nu + K);
  const double tau_rate = 0.5 * (tau_state.nu * tau_state.delta + quad);
  const auto tau_draw = [&](Rng& rng) {
    return gibbs_tau(phi, penalty.P, tau_state, rng);
  };

  PenaltyHypers delta_state;
  delta_state.tau = 2.5;
  const double delta_shape = delta_state.a_delta + 0.5 * delta_state.nu;
  const double delta_rate = delta_state.b_delta + 0.5 * delta_state.nu * delta_state.tau;
  const auto delta_draw = [&](Rng& rng) { return gibbs_delta(delta_state, rng); };

  check_gamma_moments(gate, "tau", tau_draw, tau_shape, tau_rate, 42001);
  check_gamma_moments(gate, "delta", delta_draw, delta_shape, delta_rate, 42002);
  check_gamma_ks(gate, "tau", tau_draw, tau_shape, tau_rate, 40000);
  check_gamma_ks(gate, "delta", delta_draw, delta_shape, delta_rate, 41000);
  return gate;
}

// Criterion 4: the same seed, configuration and data produce byte-identical
// draws files across two independent runs.
Gate criterion_reproducibility() {
  Gate gate;
  ScenarioConfig scenario = default_scenario(1, 0.25);
  scenario.sample_size = 250;
  Rng rng(split_seed(7001, 0));
  const GeneratedDataset generated = generate_dataset(scenario, rng);

  ModelConfig model;
  model.t_rcens = scenario.t_rcens;
  ChainConfig chain;
  chain.iterations = 1500;
  chain.burnin = 500;
  chain.seed = 99;

  const ChainOutput first = run_chain(generated.data, model, chain);
  const ChainOutput second = run_chain(generated.data, model, chain);

  const fs::path dir = fs::temp_directory_path();
  const std::string path_a = (dir / "ptcure_acceptance_draws_a.csv").string();
  const std::string path_b = (dir / "ptcure_acceptance_draws_b.csv").string();
  io::write_draws_csv(path_a, first);
  io::write_draws_csv(path_b, second);
  const auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  };
  const std::string bytes_a = slurp(path_a);
  const std::string bytes_b = slurp(path_b);
  gate.check(!bytes_a.empty() && bytes_a == bytes_b,
             fmt("draws files byte-identical across runs (%zu bytes)",
                 bytes_a.size()));
  std::error_code ec;
  fs::remove(path_a, ec);
  fs::remove(path_b, ec);
  return gate;
}

// Criterion 5: hazard-ratio curves agree with a closed-form oracle when the
// exact parametric baseline is substituted, and a spline fit at n = 600
// tracks the true susceptible log hazard ratio over the informative window.
Gate criterion_hazard_ratio_curves(int threads) {
  Gate gate;
  const WeibullDist baseline = weibull_from_moments(8.0, 4.18);

  ModelParams params;
  params.beta0 = 0.75;
  params.beta = Eigen::Vector2d(0.8, -0.5);
  params.gamma = Eigen::Vector2d(0.4, -0.4);
  const Eigen::Vector2d group(0.0, 1.0);
  const Eigen::Vector2d reference(0.0, 0.0);
  const oracle::PromotionProfile prof_g{std::exp(0.75 - 0.5), std::exp(-0.4)};
  const oracle::PromotionProfile prof_r{std::exp(0.75), 1.0};

  const WeibullBaselineCurve curve(baseline);
  double sup_p = 0.0, sup_u = 0.0;
  const int points = 2001;
  for (int i = 0; i < points; ++i) {
    const double t = 20.0 * i / (points - 1);
    const double lib_p = log_hazard_ratio_population(params, curve, group,
                                                     group, reference,
                                                     reference, t);
    const double ref_p = oracle::log_hr_population_ref(baseline, prof_g, prof_r, t);
    sup_p = std::max(sup_p, std::abs(lib_p - ref_p));
    const double lib_u = log_hazard_ratio_susceptible(params, curve, group,
                                                      group, reference,
                                                      reference, t);
    const double ref_u = oracle::log_hr_susceptible_ref(baseline, prof_g, prof_r, t);
    sup_u = std::max(sup_u, std::abs(lib_u - ref_u));
  }
  gate.check(sup_p <= 1e-6,
             fmt("population log hazard ratio sup dev %.2e on [0, 20]", sup_p));
  gate.check(sup_u <= 1e-6,
             fmt("susceptible log hazard ratio sup dev %.2e on [0, 20]", sup_u));

  // Spline fit on one simulated dataset; contrast at the sample median of
  // the continuous covariate, binary covariate switched 1 against 0.
  (void)threads;
  ScenarioConfig scenario = default_scenario(1, 0.25);
  scenario.sample_size = 600;
  scenario.seed = 5150;
  Rng rng(split_seed(scenario.seed, 0));
  const GeneratedDataset generated = generate_dataset(scenario, rng);

  ModelConfig model = scenario.model;
  model.t_rcens = scenario.t_rcens;
  ChainConfig chain = scenario.chain;
  chain.iterations = 8000;
  chain.burnin = 2000;
  chain.seed = split_seed(scenario.seed, 1);
  const ChainOutput out = run_chain(generated.data, model, chain);
  gate.info(fmt("fit at n = 600: mode_converged %d, mean acceptance %.2f",
                out.mode_converged ? 1 : 0, out.acceptance.mean()));

  std::vector<double> w1(generated.data.x.col(0).data(),
                         generated.data.x.col(0).data() + generated.data.n());
  const double median_w1 = sample_quantile(w1, 0.5);
  CovariateProfile prof_group, prof_reference;
  prof_group.x = Eigen::Vector2d(median_w1, 1.0);
  prof_group.z = prof_group.x;
  prof_reference.x = Eigen::Vector2d(median_w1, 0.0);
  prof_reference.z = prof_reference.x;

  const SplineBaseline base =
      make_spline_baseline(model.t_rcens, model.num_basis, model.quadrature_bins);
  const CurveBand band =
      curve_band(out, base, CurveKind::LogHazardRatioSusceptible, prof_group,
                 prof_reference, 200, 10, 0.95);
  gate.check(band.grid.size() > 0 && band.grid[band.grid.size() - 1] >= 18.0,
             fmt("posterior curve covers [1, 18] (ends at %.2f)",
                 band.grid.size() > 0 ? band.grid[band.grid.size() - 1] : 0.0));

  const oracle::PromotionProfile truth_g{
      std::exp(0.75 + 0.8 * median_w1 - 0.5),
      std::exp(0.4 * median_w1 - 0.4)};
  const oracle::PromotionProfile truth_r{std::exp(0.75 + 0.8 * median_w1),
                                         std::exp(0.4 * median_w1)};
  std::vector<double> deviations;
  for (Eigen::Index i = 0; i < band.grid.size(); ++i) {
    const double t = band.grid[i];
    if (t < 1.0 || t > 18.0) continue;
    const double truth =
        oracle::log_hr_susceptible_ref(scenario.baseline, truth_g, truth_r, t);
    deviations.push_back(std::abs(band.median[i] - truth));
  }
  if (deviations.empty()) {
    gate.check(false, "no curve points inside [1, 18]");
    return gate;
  }
  const double mad = sample_quantile(deviations, 0.5);
  gate.check(mad < 0.15,
             fmt("median |fitted - true| log hazard ratio %.4f < 0.15 "
                 "on [1, 18] (%zu points)",
                 mad, deviations.size()));
  return gate;
}

// Criterion 6: structural invariants of the spline basis, the promotion
// formulas, the analytic gradient and the quadrature resolution.
Gate criterion_invariants() {
  Gate gate;

  double unity_dev = 0.0;
  for (const double upper : {25.0, 13.7, 10.6}) {
    const KnotGrid grid = build_knot_grid(0.0, upper, 12);
    for (int i = 0; i <= 2000; ++i) {
      const double t = upper * i / 2000.0;
      unity_dev = std::max(unity_dev, std::abs(eval_basis(grid, t).sum() - 1.0));
    }
  }
  gate.check(unity_dev < 1e-10, fmt("partition of unity dev %.2e", unity_dev));

  const auto spline_params = [](int num_basis) {
    ModelParams params;
    params.phi.resize(num_basis);
    for (int k = 0; k < num_basis; ++k) {
      params.phi[k] = -1.2 + 0.45 * std::sin(0.9 * (k + 1));
    }
    params.phi[num_basis - 1] = kDefaultFixedPhi;
    params.beta0 = 0.75;
    params.beta = Eigen::Vector2d(0.8, -0.5);
    params.gamma = Eigen::Vector2d(0.4, -0.4);
    return params;
  };
  const SplineBaseline base = make_spline_baseline(25.0, 12, 300);
  const ModelParams params = spline_params(12);
  const Eigen::Vector2d x1(0.3, 1.0), z_shared(0.5, 1.0), x2(-0.2, 0.0);

  double constancy_dev = 0.0;
  const double expected_hr = (x1 - x2).dot(params.beta);
  for (int i = 1; i <= 800; ++i) {
    const double t = 25.0 * i / 800.0;
    const double hr = log_hazard_ratio_population(params, base, x1, z_shared,
                                                  x2, z_shared, t);
    constancy_dev = std::max(constancy_dev, std::abs(hr - expected_hr));
  }
  gate.check(constancy_dev < 1e-10,
             fmt("population hazard ratio constant when z blocks match, "
                 "dev %.2e",
                 constancy_dev));

  double floor_margin = 0.0;
  const double cure_prob = std::exp(-theta_mean(params, x1));
  for (int i = 0; i <= 800; ++i) {
    const double t = 25.0 * i / 800.0;
    const double sp = population_survival(params, base, x1, z_shared, t);
    floor_margin = std::min(floor_margin, sp - cure_prob);
  }
  gate.check(floor_margin >= -1e-12,
             fmt("population survival stays above the cure plateau "
                 "(worst margin %.2e)",
                 floor_margin));

  // The vanishing-tail guarantee concerns fitted states: the pinned
  // coefficient and the difference penalty together drive the fitted
  // baseline survival to zero at the bound.
  double worst_tail = 0.0;
  struct Window {
    int setting;
    double t_rcens;
  };
  for (const Window w : {Window{1, 25.0}, Window{3, 13.7}, Window{4, 10.6}}) {
    ScenarioConfig tail_scenario = default_scenario(w.setting, 0.25);
    tail_scenario.sample_size = 250;
    Rng tail_rng(split_seed(61, static_cast<std::uint64_t>(w.setting)));
    const GeneratedDataset tail_data = generate_dataset(tail_scenario, tail_rng);
    ModelConfig tail_model;
    tail_model.t_rcens = w.t_rcens;
    const PosteriorEvaluator tail_eval(tail_data.data, tail_model);
    const ModeResult mode = posterior_mode(tail_eval);
    const double s0 =
        baseline_survival(mode.params, tail_eval.baseline(), w.t_rcens);
    worst_tail = std::max(worst_tail, s0);
  }
  gate.check(worst_tail < 1e-3,
             fmt("fitted baseline survival at the follow-up end %.2e < 1e-3",
                 worst_tail));

  double dual_dev = 0.0;
  for (int i = 1; i <= 400; ++i) {
    const double t = 12.0 * i / 400.0;
    const double hu = susceptible_hazard(params, base, x1, z_shared, t);
    const double hp = population_hazard(params, base, x1, z_shared, t);
    const double sp = population_survival(params, base, x1, z_shared, t);
    const double via_population = hp * sp / (sp - cure_prob);
    dual_dev = std::max(dual_dev, std::abs(hu - via_population) /
                                      std::max(1.0, std::abs(hu)));
  }
  gate.check(dual_dev < 1e-10,
             fmt("susceptible hazard agrees with its population form, "
                 "rel dev %.2e",
                 dual_dev));

  ScenarioConfig scenario = default_scenario(1, 0.25);
  scenario.sample_size = 80;
  Rng rng(split_seed(33, 0));
  const GeneratedDataset generated = generate_dataset(scenario, rng);
  ModelConfig small_model;
  small_model.num_basis = 10;
  small_model.quadrature_bins = 150;
  small_model.t_rcens = scenario.t_rcens;
  const PosteriorEvaluator eval(generated.data, small_model);
  ModelParams at = eval.initial_params();
  for (Eigen::Index k = 0; k + 1 < at.phi.size(); ++k) {
    at.phi[k] += 0.3 * std::sin(static_cast<double>(k + 1));
  }
  at.beta0 = 0.2;
  at.beta = Eigen::Vector2d(0.3, -0.2);
  at.gamma = Eigen::Vector2d(0.15, -0.25);
  PenaltyHypers hypers;
  hypers.tau = 2.5;
  hypers.delta = 0.7;
  const Eigen::VectorXd analytic = eval.gradient(at, hypers);
  const Eigen::VectorXd numeric = oracle::fd_gradient(
      [&](const Eigen::VectorXd& v) {
        return eval.log_posterior(eval.unpack(v), hypers);
      },
      eval.pack(at));
  double grad_dev = 0.0;
  for (Eigen::Index j = 0; j < analytic.size(); ++j) {
    grad_dev = std::max(grad_dev, std::abs(analytic[j] - numeric[j]) /
                                      std::max(1.0, std::abs(analytic[j])));
  }
  gate.check(grad_dev < 1e-4,
             fmt("analytic gradient vs finite differences, rel dev %.2e",
                 grad_dev));

  ModelConfig coarse_model = small_model;
  coarse_model.quadrature_bins = 300;
  ModelConfig fine_model = small_model;
  fine_model.quadrature_bins = 600;
  const PosteriorEvaluator coarse(generated.data, coarse_model);
  const PosteriorEvaluator fine(generated.data, fine_model);
  const double coarse_ll = coarse.log_likelihood(at);
  const double fine_ll = fine.log_likelihood(at);
  const double quad_dev = std::abs(coarse_ll - fine_ll) / std::abs(coarse_ll);
  gate.check(quad_dev < 1e-3,
             fmt("log-likelihood moves %.4f%% when the quadrature grid "
                 "doubles from 300 to 600 bins",
                 100.0 * quad_dev));
  return gate;
}

int find_treatment_column(const std::vector<std::string>& names) {
  for (std::size_t j = 0; j < names.size(); ++j) {
    std::string lower = names[j];
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower.find("ifn") != std::string::npos ||
        lower.find("trt") != std::string::npos ||
        lower.find("treat") != std::string::npos) {
      return static_cast<int>(j);
    }
  }
  return -1;
}

// Criterion 7: qualitative behaviour on the melanoma trial dataset, run
// only when the user has placed the file where the gate can find it.
Gate criterion_clinical_dataset() {
  Gate gate;
  std::vector<std::string> candidates;
  if (const char* env = std::getenv("PTCURE_E1684_PATH")) {
    if (*env != '\0') candidates.push_back(env);
  }
  candidates.push_back("e1684.csv");
  candidates.push_back("data/e1684.csv");
  candidates.push_back("../data/e1684.csv");
  candidates.push_back("../../data/e1684.csv");

  std::string path;
  for (const auto& candidate : candidates) {
    if (fs::exists(candidate)) {
      path = candidate;
      break;
    }
  }
  if (path.empty()) {
    gate.skip("dataset not provided; set PTCURE_E1684_PATH to enable");
    return gate;
  }

  const SurvivalDataset data = io::read_dataset_csv(path);
  const int xi = find_treatment_column(data.x_names);
  const int zi = find_treatment_column(data.z_names);
  if (xi < 0 || zi < 0) {
    gate.skip(path + ": no treatment column (name containing ifn, trt or "
                     "treat) in both covariate blocks");
    return gate;
  }

  const ModelConfig model;
  const ChainConfig chain;
  const ChainOutput out = run_chain(data, model, chain);
  const SummaryResult summary = summarize_chain(out, 0.95);

  const auto find_row = [&](const std::string& name) -> const ParamSummary* {
    for (const auto& row : summary.parameters) {
      if (row.name == name) return &row;
    }
    return nullptr;
  };
  const ParamSummary* cure_row = find_row("beta_" + data.x_names[xi]);
  const ParamSummary* latency_row = find_row("gamma_" + data.z_names[zi]);
  if (cure_row == nullptr || latency_row == nullptr) {
    gate.check(false, "treatment rows missing from the chain summary");
    return gate;
  }
  gate.check(cure_row->upper < 0.0,
             fmt("cure-block %s: 95%% HPD [%.3f, %.3f] negative, excludes 0",
                 cure_row->name.c_str(), cure_row->lower, cure_row->upper));
  gate.check(latency_row->lower <= 0.0 && 0.0 <= latency_row->upper,
             fmt("latency-block %s: 95%% HPD [%.3f, %.3f] contains 0",
                 latency_row->name.c_str(), latency_row->lower,
                 latency_row->upper));

  double worst_z = 0.0;
  std::string worst_name;
  for (const auto& row : geweke_table(out)) {
    const bool regression = row.name == "beta0" ||
                            row.name.rfind("beta_", 0) == 0 ||
                            row.name.rfind("gamma_", 0) == 0;
    if (!regression) continue;
    if (std::abs(row.z) > worst_z) {
      worst_z = std::abs(row.z);
      worst_name = row.name;
    }
  }
  gate.check(worst_z < 1.96,
             fmt("regression Geweke |z| max %.2f (%s) < 1.96", worst_z,
                 worst_name.c_str()));
  return gate;
}

}  // namespace

int main() {
  const int threads = pick_threads();
  std::fprintf(stderr, "[acceptance] replicate studies use %d thread(s)\n",
               threads);

  struct Entry {
    int id;
    const char* title;
    std::function<Gate()> run;
  };
  const std::vector<Entry> entries = {
      {1, "replicate study with sufficient follow-up",
       [&] { return criterion_sufficient_followup(threads); }},
      {2, "replicate study under short follow-up",
       [&] { return criterion_short_followup(threads); }},
      {3, "closed-form Gibbs conditionals", criterion_gibbs_exactness},
      {4, "bitwise reproducibility", criterion_reproducibility},
      {5, "hazard-ratio curves against a closed-form baseline",
       [&] { return criterion_hazard_ratio_curves(threads); }},
      {6, "model invariants", criterion_invariants},
      {7, "clinical dataset (optional)", criterion_clinical_dataset},
  };

  int failures = 0;
  int passes = 0;
  int skips = 0;
  for (const Entry& entry : entries) {
    std::fprintf(stderr, "[acceptance] criterion %d: %s ...\n", entry.id,
                 entry.title);
    const auto started = std::chrono::steady_clock::now();
    Gate gate;
    try {
      gate = entry.run();
    } catch (const std::exception& err) {
      gate.ok = false;
      gate.notes.push_back(std::string("FAIL  unhandled error: ") + err.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    std::fprintf(stderr, "[acceptance] criterion %d finished in %.1f s\n",
                 entry.id, elapsed);

    if (!gate.skip_reason.empty()) {
      std::printf("CRITERION %d: SKIP (%s)\n", entry.id,
                  gate.skip_reason.c_str());
      ++skips;
    } else {
      std::printf("CRITERION %d: %s\n", entry.id, gate.ok ? "PASS" : "FAIL");
      if (gate.ok) {
        ++passes;
      } else {
        ++failures;
      }
    }
    for (const auto& note : gate.notes) {
      std::printf("    %s\n", note.c_str());
    }
    std::fflush(stdout);
  }

  std::printf("acceptance: %d passed, %d failed, %d skipped\n", passes,
              failures, skips);
  return failures;
}
