#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ptcure/io.hpp"
#include "ptcure/mcmc.hpp"
#include "ptcure/simulate.hpp"
#include "ptcure/summaries.hpp"

namespace fs = std::filesystem;
using namespace ptcure;

namespace {

struct CommonCurveOptions {
  int grid_points = 200;
  int thin = 1;
  double level = 0.95;
};

struct FitOptions {
  std::string data_path;
  std::string out_dir = ".";
  std::string from_manifest;
  std::string contrast_name;
  double contrast_high = 1.0;
  double contrast_low = 0.0;
  bool short_followup = false;
  ModelConfig model;
  ChainConfig chain;
  CommonCurveOptions curves;
};

struct ScenarioOptions {
  std::string scenario_path;
  std::string from_manifest;
  std::string out_dir = ".";
  int setting = 0;        // 0 means "not given"
  double cure = -1.0;     // <0 means "not given"
  int sample_size = 0;
  int replicates = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
};

struct CurvesOptions {
  std::string draws_path;
  std::string manifest_path;
  std::string out_dir = ".";
  CommonCurveOptions curves;
};

Eigen::VectorXd column_medians(const Eigen::MatrixXd& design) {
  Eigen::VectorXd medians(design.cols());
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    std::vector<double> column(design.col(j).data(),
                               design.col(j).data() + design.rows());
    medians[j] = sample_quantile(std::move(column), 0.5);
  }
  return medians;
}

// The named covariate switches between the two levels wherever it appears;
// every other covariate sits at its sample median.
io::ResolvedContrast resolve_contrast(const SurvivalDataset& data,
                                      const std::string& name, double high,
                                      double low) {
  io::ResolvedContrast contrast;
  contrast.covariate = name;
  contrast.high = high;
  contrast.low = low;
  contrast.group.x = column_medians(data.x);
  contrast.group.z = column_medians(data.z);
  contrast.reference.x = contrast.group.x;
  contrast.reference.z = contrast.group.z;
  bool found = false;
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    if (data.x_names[j] == name) {
      contrast.group.x[j] = high;
      contrast.reference.x[j] = low;
      found = true;
    }
  }
  for (Eigen::Index j = 0; j < data.q(); ++j) {
    if (data.z_names[j] == name) {
      contrast.group.z[j] = high;
      contrast.reference.z[j] = low;
      found = true;
    }
  }
  if (!found) {
    throw std::invalid_argument("contrast covariate '" + name +
                                "' appears in neither covariate block");
  }
  return contrast;
}

CovariateProfile median_profile(const SurvivalDataset& data) {
  CovariateProfile profile;
  profile.x = column_medians(data.x);
  profile.z = column_medians(data.z);
  return profile;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// Curve artifacts shared by fit and curves: the baseline survival always,
// plus the contrast set when a contrast is available.
std::vector<std::string> write_curve_artifacts(
    const std::string& out_dir, const ChainOutput& chain,
    const SplineBaseline& base, const CommonCurveOptions& opt,
    bool has_contrast, const io::ResolvedContrast& contrast,
    const CovariateProfile* fallback_profile) {
  std::vector<std::string> written;
  const auto emit = [&](const std::string& name, const CurveBand& band) {
    io::write_curve_csv(join_path(out_dir, name), band);
    written.push_back(name);
  };

  emit("curve_s0.csv",
       curve_band(chain, base, CurveKind::BaselineSurvival, {}, {},
                  opt.grid_points, opt.thin, opt.level));
  if (has_contrast) {
    emit("curve_sp_group.csv",
         curve_band(chain, base, CurveKind::PopulationSurvival, contrast.group,
                    {}, opt.grid_points, opt.thin, opt.level));
    emit("curve_sp_reference.csv",
         curve_band(chain, base, CurveKind::PopulationSurvival,
                    contrast.reference, {}, opt.grid_points, opt.thin,
                    opt.level));
    emit("curve_loghr_population.csv",
         curve_band(chain, base, CurveKind::LogHazardRatioPopulation,
                    contrast.group, contrast.reference, opt.grid_points,
                    opt.thin, opt.level));
    emit("curve_loghr_susceptible.csv",
         curve_band(chain, base, CurveKind::LogHazardRatioSusceptible,
                    contrast.group, contrast.reference, opt.grid_points,
                    opt.thin, opt.level));
  } else if (fallback_profile != nullptr) {
    emit("curve_sp.csv",
         curve_band(chain, base, CurveKind::PopulationSurvival,
                    *fallback_profile, {}, opt.grid_points, opt.thin,
                    opt.level));
  }
  return written;
}

int cmd_fit(const FitOptions& options) {
  FitOptions opt = options;
  io::ResolvedContrast contrast;
  bool has_contrast = false;
  if (!opt.from_manifest.empty()) {
    const io::RunManifest source = io::read_manifest(opt.from_manifest);
    opt.model = source.model;
    opt.chain = source.chain;
    if (opt.data_path.empty()) opt.data_path = source.input_path;
    if (source.has_contrast) {
      contrast = source.contrast;
      has_contrast = true;
    }
  }
  if (opt.data_path.empty()) {
    throw std::invalid_argument(
        "fit needs --data (or --from-manifest naming an input)");
  }

  const SurvivalDataset data =
      io::read_dataset_csv(opt.data_path, opt.short_followup);
  if (!opt.contrast_name.empty()) {
    contrast = resolve_contrast(data, opt.contrast_name, opt.contrast_high,
                                opt.contrast_low);
    has_contrast = true;
  }

  fs::create_directories(opt.out_dir);
  io::RunManifest manifest;
  manifest.subcommand = "fit";
  manifest.seed = opt.chain.seed;
  manifest.input_path = opt.data_path;
  manifest.input_hash = io::fnv1a64_file(opt.data_path);
  manifest.chain = opt.chain;
  manifest.has_contrast = has_contrast;
  manifest.contrast = contrast;
  manifest.model = opt.model;
  if (manifest.model.t_rcens <= 0.0) manifest.model.t_rcens = max_time(data);

  ChainOutput chain;
  try {
    chain = run_chain(data, opt.model, opt.chain);
  } catch (const std::runtime_error& err) {
    manifest.status = std::string("failed: ") + err.what();
    io::write_manifest(join_path(opt.out_dir, "manifest.json"), manifest);
    std::cerr << "chain failed: " << err.what() << "\n";
    return 3;
  }

  io::write_draws_csv(join_path(opt.out_dir, "draws.csv"), chain);
  const SummaryResult summary = summarize_chain(chain);
  io::write_summary_csv(join_path(opt.out_dir, "summary.csv"), summary);
  io::write_summary_json(join_path(opt.out_dir, "summary.json"), summary);
  io::write_geweke_csv(join_path(opt.out_dir, "geweke.csv"),
                       geweke_table(chain));
  manifest.outputs = {"draws.csv", "summary.csv", "summary.json", "geweke.csv"};

  const SplineBaseline base = make_spline_baseline(
      manifest.model.t_rcens, manifest.model.num_basis,
      manifest.model.quadrature_bins);
  const CovariateProfile fallback = median_profile(data);
  const std::vector<std::string> curve_files =
      write_curve_artifacts(opt.out_dir, chain, base, opt.curves, has_contrast,
                            contrast, &fallback);
  manifest.outputs.insert(manifest.outputs.end(), curve_files.begin(),
                          curve_files.end());

  io::write_manifest(join_path(opt.out_dir, "manifest.json"), manifest);
  std::cout << "fit complete: " << chain.kept() << " draws kept, mean "
            << "acceptance " << chain.acceptance.mean() << "\n"
            << "artifacts in " << opt.out_dir << "\n";
  if (!chain.mode_converged) {
    std::cerr << "note: mode search stopped before reaching tolerance\n";
  }
  return 0;
}

ScenarioConfig load_scenario(const ScenarioOptions& opt) {
  ScenarioConfig config;
  if (!opt.from_manifest.empty()) {
    const io::RunManifest source = io::read_manifest(opt.from_manifest);
    if (!source.has_scenario) {
      throw std::invalid_argument(opt.from_manifest +
                                  " carries no scenario block");
    }
    config = source.scenario;
  } else if (!opt.scenario_path.empty()) {
    config = io::read_scenario_file(opt.scenario_path);
  } else if (opt.setting > 0) {
    config = default_scenario(opt.setting, opt.cure < 0.0 ? 0.25 : opt.cure);
  } else {
    throw std::invalid_argument(
        "need --scenario, --from-manifest, or --setting");
  }
  if (opt.sample_size > 0) config.sample_size = opt.sample_size;
  if (opt.replicates > 0) config.replicates = opt.replicates;
  if (opt.seed_given) config.seed = opt.seed;
  validate_scenario(config);
  return config;
}

io::RunManifest scenario_manifest(const std::string& subcommand,
                                  const ScenarioConfig& config) {
  io::RunManifest manifest;
  manifest.subcommand = subcommand;
  manifest.seed = config.seed;
  manifest.has_scenario = true;
  manifest.scenario = config;
  manifest.model = config.model;
  manifest.model.t_rcens = config.t_rcens;
  manifest.chain = config.chain;
  return manifest;
}

int cmd_simulate(const ScenarioOptions& opt) {
  const ScenarioConfig config = load_scenario(opt);
  fs::create_directories(opt.out_dir);

  // Stream 0 matches the first replicate of a study with the same seed.
  Rng rng(split_seed(config.seed, 0));
  const GeneratedDataset generated = generate_dataset(config, rng);
  io::write_dataset_csv(join_path(opt.out_dir, "dataset.csv"), generated.data);
  io::write_simulation_sidecar(join_path(opt.out_dir, "truth.csv"), generated);

  io::RunManifest manifest = scenario_manifest("simulate", config);
  manifest.outputs = {"dataset.csv", "truth.csv"};
  io::write_manifest(join_path(opt.out_dir, "manifest.json"), manifest);

  int events = 0;
  for (Eigen::Index i = 0; i < generated.data.n(); ++i) {
    events += generated.data.events[i] > 0.0 ? 1 : 0;
  }
  std::cout << "simulated " << generated.data.n() << " subjects, " << events
            << " events\nartifacts in " << opt.out_dir << "\n";
  return 0;
}

int cmd_replicate(const ScenarioOptions& opt) {
  const ScenarioConfig config = load_scenario(opt);
  fs::create_directories(opt.out_dir);

  const StudyResult study = replicate_study(config, opt.threads);

  io::write_study_table_csv(join_path(opt.out_dir, "study_table.csv"), study,
                            config.cure_fraction, config.setting);
  io::write_replicate_estimates_csv(
      join_path(opt.out_dir, "replicate_estimates.csv"), study);
  io::write_curve_matrix_csv(join_path(opt.out_dir, "curves_s0.csv"),
                             study.curve_grid, study.baseline_survival_curves);
  io::write_curve_matrix_csv(
      join_path(opt.out_dir, "curves_loghr_population.csv"), study.curve_grid,
      study.loghr_population_curves);
  io::write_curve_matrix_csv(
      join_path(opt.out_dir, "curves_loghr_susceptible.csv"), study.curve_grid,
      study.loghr_susceptible_curves);

  io::RunManifest manifest = scenario_manifest("replicate", config);
  manifest.outputs = {"study_table.csv", "replicate_estimates.csv",
                      "curves_s0.csv", "curves_loghr_population.csv",
                      "curves_loghr_susceptible.csv"};
  if (study.failures > 0) {
    manifest.status = "ok (" + std::to_string(study.failures) +
                      " replicate(s) failed and were excluded)";
  }
  io::write_manifest(join_path(opt.out_dir, "manifest.json"), manifest);

  std::cout << "replicates: " << config.replicates - study.failures << " of "
            << config.replicates << " fits succeeded\n";
  for (const auto& row : study.table) {
    std::cout << "  " << row.name << ": bias " << io::format_value(row.bias)
              << ", cv95 " << row.coverage95 << "%\n";
  }
  std::cout << "artifacts in " << opt.out_dir << "\n";
  return study.failures == config.replicates ? 3 : 0;
}

int cmd_curves(const CurvesOptions& opt) {
  const ChainOutput chain = io::read_draws_csv(opt.draws_path);
  const io::RunManifest source = io::read_manifest(opt.manifest_path);
  if (source.model.num_basis != chain.num_basis) {
    throw std::invalid_argument(
        "draws file and manifest disagree on the basis size");
  }
  if (source.model.t_rcens <= 0.0) {
    throw std::invalid_argument(
        "manifest carries no resolved follow-up bound; refit to regenerate it");
  }

  fs::create_directories(opt.out_dir);
  const SplineBaseline base =
      make_spline_baseline(source.model.t_rcens, source.model.num_basis,
                           source.model.quadrature_bins);

  io::RunManifest manifest;
  manifest.subcommand = "curves";
  manifest.seed = source.seed;
  manifest.input_path = opt.draws_path;
  manifest.input_hash = io::fnv1a64_file(opt.draws_path);
  manifest.model = source.model;
  manifest.chain = source.chain;
  manifest.has_contrast = source.has_contrast;
  manifest.contrast = source.contrast;

  manifest.outputs = write_curve_artifacts(opt.out_dir, chain, base, opt.curves,
                                           source.has_contrast, source.contrast,
                                           nullptr);
  io::write_manifest(join_path(opt.out_dir, "manifest.json"), manifest);
  if (!source.has_contrast) {
    std::cerr << "note: manifest has no contrast; only the baseline survival "
                 "band was written\n";
  }
  std::cout << "artifacts in " << opt.out_dir << "\n";
  return 0;
}

void add_model_options(CLI::App* cmd, ModelConfig& model) {
  cmd->add_option("--num-basis", model.num_basis, "Spline basis size")
      ->capture_default_str();
  cmd->add_option("--quadrature-bins", model.quadrature_bins,
                  "Bins for the cumulative hazard")
      ->capture_default_str();
  cmd->add_option("--penalty-order", model.penalty_order,
                  "Difference penalty order")
      ->capture_default_str();
  cmd->add_option("--penalty-ridge", model.penalty_ridge,
                  "Ridge added to the penalty matrix")
      ->capture_default_str();
  cmd->add_option("--fixed-phi", model.fixed_phi,
                  "Pinned value of the last spline coefficient")
      ->capture_default_str();
  cmd->add_option("--sigma2-reg", model.sigma2_reg,
                  "Prior variance of the regression coefficients")
      ->capture_default_str();
  cmd->add_option("--nu", model.nu, "Roughness hyperprior degrees of freedom")
      ->capture_default_str();
  cmd->add_option("--a-delta", model.a_delta, "Gamma prior shape for delta")
      ->capture_default_str();
  cmd->add_option("--b-delta", model.b_delta, "Gamma prior rate for delta")
      ->capture_default_str();
  cmd->add_option("--t-rcens", model.t_rcens,
                  "Upper bound of follow up (0 = largest observed time)")
      ->capture_default_str();
}

void add_chain_options(CLI::App* cmd, ChainConfig& chain) {
  cmd->add_option("--iterations", chain.iterations, "Total chain length")
      ->capture_default_str();
  cmd->add_option("--burnin", chain.burnin, "Burn-in iterations")
      ->capture_default_str();
  cmd->add_option("--seed", chain.seed, "Chain seed")->capture_default_str();
  cmd->add_option("--target-acceptance", chain.target_acceptance,
                  "Adaptation target per coordinate")
      ->capture_default_str();
  cmd->add_option("--adapt-window", chain.adapt_window,
                  "Iterations per adaptation window")
      ->capture_default_str();
  cmd->add_flag_callback(
      "--no-reparametrize", [&chain]() { chain.reparametrize = false; },
      "Propose in the raw coordinates");
  cmd->add_flag_callback(
      "--no-mode-start", [&chain]() { chain.mode_start = false; },
      "Start from the neutral state instead of the posterior mode");
}

void add_curve_options(CLI::App* cmd, CommonCurveOptions& curves) {
  cmd->add_option("--grid-points", curves.grid_points, "Curve grid size")
      ->capture_default_str();
  cmd->add_option("--thin", curves.thin, "Draw thinning for curve bands")
      ->capture_default_str();
  cmd->add_option("--level", curves.level, "Credible band level")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Promotion time cure model: penalized-spline baseline, Bayesian fit"};
  app.require_subcommand(1);

  FitOptions fit_opt;
  CLI::App* fit = app.add_subcommand(
      "fit", "Fit the model to a dataset and write posterior artifacts");
  fit->add_option("--data", fit_opt.data_path, "Input dataset CSV");
  fit->add_option("--out", fit_opt.out_dir, "Output directory")
      ->capture_default_str();
  fit->add_option("--from-manifest", fit_opt.from_manifest,
                  "Reload the full configuration of an earlier run");
  fit->add_flag("--short-followup", fit_opt.short_followup,
                "Reject covariates shared between the two blocks");
  fit->add_option("--contrast", fit_opt.contrast_name,
                  "Covariate defining the hazard-ratio contrast");
  fit->add_option("--contrast-high", fit_opt.contrast_high,
                  "Level of the contrast covariate in the group")
      ->capture_default_str();
  fit->add_option("--contrast-low", fit_opt.contrast_low,
                  "Level of the contrast covariate in the reference")
      ->capture_default_str();
  add_model_options(fit, fit_opt.model);
  add_chain_options(fit, fit_opt.chain);
  add_curve_options(fit, fit_opt.curves);

  ScenarioOptions sim_opt;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Generate one dataset from a scenario");
  ScenarioOptions rep_opt;
  CLI::App* replicate = app.add_subcommand(
      "replicate", "Run a full generate+fit study and aggregate it");
  for (auto [cmd, opt] : {std::pair{simulate, &sim_opt},
                          std::pair{replicate, &rep_opt}}) {
    cmd->add_option("--scenario", opt->scenario_path,
                    "Scenario file (key=value lines)");
    cmd->add_option("--from-manifest", opt->from_manifest,
                    "Reload the scenario of an earlier run");
    cmd->add_option("--setting", opt->setting,
                    "Built-in censoring setting (1-4)");
    cmd->add_option("--cure", opt->cure,
                    "Built-in cure fraction (0.25 or 0.40)");
    cmd->add_option("--n", opt->sample_size, "Subjects per dataset");
    cmd->add_option("--replicates", opt->replicates, "Datasets to generate");
    cmd->add_option("--out", opt->out_dir, "Output directory")
        ->capture_default_str();
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [opt](const std::uint64_t& value) {
          opt->seed = value;
          opt->seed_given = true;
        },
        "Master seed for the study");
  }
  replicate->add_option("--threads", rep_opt.threads,
                        "Worker threads (0 = all cores)")
      ->capture_default_str();

  CurvesOptions curves_opt;
  CLI::App* curves = app.add_subcommand(
      "curves", "Recompute curve bands from an existing draws file");
  curves->add_option("--draws", curves_opt.draws_path, "draws.csv of a fit")
      ->required();
  curves->add_option("--manifest", curves_opt.manifest_path,
                     "manifest.json of the fit that produced the draws")
      ->required();
  curves->add_option("--out", curves_opt.out_dir, "Output directory")
      ->capture_default_str();
  add_curve_options(curves, curves_opt.curves);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_opt);
    if (simulate->parsed()) return cmd_simulate(sim_opt);
    if (replicate->parsed()) return cmd_replicate(rep_opt);
    if (curves->parsed()) return cmd_curves(curves_opt);
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::out_of_range& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
  return 0;
}
