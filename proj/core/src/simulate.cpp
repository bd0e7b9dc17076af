#include "ptcure/simulate.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ptcure/summaries.hpp"

namespace ptcure {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool near(double a, double b) { return std::abs(a - b) < 1e-9; }

TruthParams make_truth(double beta0, std::initializer_list<double> beta,
                       std::initializer_list<double> gamma) {
  TruthParams truth;
  truth.beta0 = beta0;
  truth.beta = Eigen::Map<const Eigen::VectorXd>(beta.begin(),
                                                 static_cast<Eigen::Index>(beta.size()));
  truth.gamma = Eigen::Map<const Eigen::VectorXd>(
      gamma.begin(), static_cast<Eigen::Index>(gamma.size()));
  return truth;
}

}  // namespace

ScenarioConfig default_scenario(int setting, double cure_fraction) {
  if (setting < 1 || setting > 4) {
    throw std::invalid_argument("setting must be 1, 2, 3 or 4");
  }
  ScenarioConfig config;
  config.setting = setting;
  config.cure_fraction = cure_fraction;
  const bool shared = setting <= 2;
  if (shared) {
    if (near(cure_fraction, 0.25)) {
      config.truth = make_truth(0.75, {0.8, -0.5}, {0.4, -0.4});
    } else if (near(cure_fraction, 0.40)) {
      config.truth = make_truth(0.30, {1.00, -0.75}, {0.4, -0.4});
    } else {
      throw std::invalid_argument(
          "no built-in truth for this cure fraction; supply truth values");
    }
    config.t_rcens = 25.0;
  } else {
    if (near(cure_fraction, 0.25)) {
      config.truth = make_truth(0.70, {-0.70}, {0.40});
    } else if (near(cure_fraction, 0.40)) {
      config.truth = make_truth(0.30, {-0.80}, {0.40});
    } else {
      throw std::invalid_argument(
          "no built-in truth for this cure fraction; supply truth values");
    }
    config.t_rcens = setting == 3 ? 13.7 : 10.6;
  }
  return config;
}

void validate_scenario(const ScenarioConfig& config) {
  if (config.setting < 1 || config.setting > 4) {
    throw std::invalid_argument("setting must be 1, 2, 3 or 4");
  }
  if (config.sample_size < 1) throw std::invalid_argument("sample size must be positive");
  if (config.replicates < 1) throw std::invalid_argument("need at least one replicate");
  if (!(config.cure_fraction > 0.0 && config.cure_fraction < 1.0)) {
    throw std::invalid_argument("cure fraction must lie in (0, 1)");
  }
  if (!(config.event_time_cap > 0.0)) {
    throw std::invalid_argument("event time cap must be positive");
  }
  if (!(config.t_rcens > 0.0)) {
    throw std::invalid_argument("follow-up bound must be positive");
  }
  const bool shared = config.setting <= 2;
  const Eigen::Index want = shared ? 2 : 1;
  if (config.truth.beta.size() != want || config.truth.gamma.size() != want) {
    std::ostringstream msg;
    msg << "setting " << config.setting << " uses " << want
        << " covariate(s) per block, truth has " << config.truth.beta.size()
        << " and " << config.truth.gamma.size();
    throw std::invalid_argument(msg.str());
  }
  if (config.curve_points < 2 || config.curve_thin < 1) {
    throw std::invalid_argument("curve grid or thinning is invalid");
  }
}

SimulatedSubject generate_subject(const TruthParams& truth,
                                  const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& z,
                                  const WeibullDist& baseline, double cap,
                                  int setting, Rng& rng) {
  if (x.size() != truth.beta.size() || z.size() != truth.gamma.size()) {
    throw std::invalid_argument("covariates do not match the truth vectors");
  }
  SimulatedSubject subject;
  const double theta = std::exp(truth.beta0 + x.dot(truth.beta));
  const int activations = rng.poisson(theta);

  if (activations == 0) {
    subject.cured = true;
    subject.raw_time = kCuredSentinel;
  } else {
    const double elin = std::exp(z.dot(truth.gamma));
    const double inv_shape = 1.0 / baseline.shape;
    double smallest = 0.0;
    int tries = 0;
    do {
      if (++tries > 1000) {
        throw std::runtime_error(
            "event time cap rejected 1000 consecutive latent draws");
      }
      smallest = std::numeric_limits<double>::infinity();
      for (int j = 0; j < activations; ++j) {
        // S0(t)^elin = u inverted through the cumulative hazard.
        const double cumhaz = -std::log(rng.uniform()) / elin;
        const double t = baseline.scale * std::pow(cumhaz, inv_shape);
        smallest = std::min(smallest, t);
      }
    } while (!(smallest < cap));
    subject.raw_time = smallest;
  }

  const double censor = draw_censoring(setting, rng);
  subject.event = subject.raw_time <= censor ? 1 : 0;
  subject.time = std::min(subject.raw_time, censor);
  return subject;
}

double draw_censoring(int setting, Rng& rng) {
  switch (setting) {
    case 1:
      return 20.0 + 5.0 * rng.uniform();
    case 2: {
      static const WeibullDist dist = weibull_from_moments(22.28, 8.08);
      return dist.quantile(rng.uniform() * dist.cdf(25.0));
    }
    case 3:
    case 4: {
      static const WeibullDist dist = weibull_from_moments(17.9, 6.5);
      const double trunc = setting == 3 ? 13.7 : 10.6;
      return dist.quantile(rng.uniform() * dist.cdf(trunc));
    }
    default:
      throw std::invalid_argument("setting must be 1, 2, 3 or 4");
  }
}

GeneratedDataset generate_dataset(const ScenarioConfig& config, Rng& rng) {
  validate_scenario(config);
  const int n = config.sample_size;
  const bool shared = config.setting <= 2;

  GeneratedDataset out;
  out.data.times.resize(n);
  out.data.events.resize(n);
  out.data.x.resize(n, shared ? 2 : 1);
  out.data.z.resize(n, shared ? 2 : 1);
  out.data.x_names = shared ? std::vector<std::string>{"w1", "w2"}
                            : std::vector<std::string>{"w2"};
  out.data.z_names = shared ? std::vector<std::string>{"w1", "w2"}
                            : std::vector<std::string>{"w1"};
  out.cured.resize(n);
  out.raw_times.resize(n);

  Eigen::VectorXd x(shared ? 2 : 1), z(shared ? 2 : 1);
  for (int i = 0; i < n; ++i) {
    const double w1 = rng.normal();
    const double w2 = rng.bernoulli(0.5);
    if (shared) {
      x << w1, w2;
      z << w1, w2;
    } else {
      x << w2;
      z << w1;
    }
    const SimulatedSubject subject =
        generate_subject(config.truth, x, z, config.baseline,
                         config.event_time_cap, config.setting, rng);
    out.data.times[i] = subject.time;
    out.data.events[i] = subject.event;
    out.data.x.row(i) = x.transpose();
    out.data.z.row(i) = z.transpose();
    out.cured[i] = subject.cured ? 1 : 0;
    out.raw_times[i] = subject.raw_time;
  }
  return out;
}

namespace {

struct StudyContrast {
  CovariateProfile group;
  CovariateProfile reference;
};

// Groups induced by the binary covariate at the median (zero) value of the
// continuous one.
StudyContrast study_contrast(int setting) {
  StudyContrast contrast;
  if (setting <= 2) {
    contrast.group.x = Eigen::Vector2d(0.0, 1.0);
    contrast.group.z = Eigen::Vector2d(0.0, 1.0);
    contrast.reference.x = Eigen::Vector2d(0.0, 0.0);
    contrast.reference.z = Eigen::Vector2d(0.0, 0.0);
  } else {
    contrast.group.x = Eigen::VectorXd::Constant(1, 1.0);
    contrast.group.z = Eigen::VectorXd::Zero(1);
    contrast.reference.x = Eigen::VectorXd::Zero(1);
    contrast.reference.z = Eigen::VectorXd::Zero(1);
  }
  return contrast;
}

}  // namespace

StudyResult replicate_study(const ScenarioConfig& config, int threads) {
  validate_scenario(config);

  ModelConfig model = config.model;
  model.t_rcens = config.t_rcens;
  const SplineBaseline base = make_spline_baseline(
      config.t_rcens, model.num_basis, model.quadrature_bins);
  const StudyContrast contrast = study_contrast(config.setting);

  const int total = config.replicates;
  const Eigen::Index d = 1 + config.truth.beta.size() + config.truth.gamma.size();

  StudyResult result;
  result.parameter_names.push_back("beta0");
  const bool shared = config.setting <= 2;
  const std::vector<std::string> x_names =
      shared ? std::vector<std::string>{"w1", "w2"} : std::vector<std::string>{"w2"};
  const std::vector<std::string> z_names =
      shared ? std::vector<std::string>{"w1", "w2"} : std::vector<std::string>{"w1"};
  for (const auto& name : x_names) result.parameter_names.push_back("beta_" + name);
  for (const auto& name : z_names) result.parameter_names.push_back("gamma_" + name);

  result.fits.assign(total, ReplicateFit{});
  result.curve_grid =
      Eigen::VectorXd::LinSpaced(config.curve_points, 0.0, config.t_rcens);
  result.baseline_survival_curves =
      Eigen::MatrixXd::Constant(config.curve_points, total, kNaN);
  result.loghr_population_curves =
      Eigen::MatrixXd::Constant(config.curve_points, total, kNaN);
  result.loghr_susceptible_curves =
      Eigen::MatrixXd::Constant(config.curve_points, total, kNaN);

  const auto run_one = [&](int k) {
    ReplicateFit fit;
    fit.index = k;
    try {
      Rng data_rng(split_seed(config.seed, 2 * static_cast<std::uint64_t>(k)));
      const GeneratedDataset gen = generate_dataset(config, data_rng);

      ChainConfig chain_config = config.chain;
      chain_config.seed =
          split_seed(config.seed, 2 * static_cast<std::uint64_t>(k) + 1);
      const ChainOutput chain = run_chain(gen.data, model, chain_config);

      fit.medians.resize(d);
      fit.lo90.resize(d);
      fit.hi90.resize(d);
      fit.lo95.resize(d);
      fit.hi95.resize(d);
      for (Eigen::Index j = 0; j < d; ++j) {
        const Eigen::Index col = chain.regression_column(j);
        std::vector<double> draws(chain.draws.col(col).data(),
                                  chain.draws.col(col).data() + chain.kept());
        fit.medians[j] = sample_quantile(draws, 0.5);
        fit.lo90[j] = sample_quantile(draws, 0.05);
        fit.hi90[j] = sample_quantile(draws, 0.95);
        fit.lo95[j] = sample_quantile(draws, 0.025);
        fit.hi95[j] = sample_quantile(draws, 0.975);
      }

      const CurveBand s0 =
          curve_band(chain, base, CurveKind::BaselineSurvival, {}, {},
                     config.curve_points, config.curve_thin);
      result.baseline_survival_curves.col(k).head(s0.grid.size()) = s0.median;
      const CurveBand hrp = curve_band(
          chain, base, CurveKind::LogHazardRatioPopulation, contrast.group,
          contrast.reference, config.curve_points, config.curve_thin);
      result.loghr_population_curves.col(k).head(hrp.grid.size()) = hrp.median;
      const CurveBand hru = curve_band(
          chain, base, CurveKind::LogHazardRatioSusceptible, contrast.group,
          contrast.reference, config.curve_points, config.curve_thin);
      result.loghr_susceptible_curves.col(k).head(hru.grid.size()) = hru.median;

      fit.ok = true;
    } catch (const std::exception& err) {
      fit.ok = false;
      fit.error = err.what();
    }
    result.fits[k] = std::move(fit);
  };

  int workers = threads == 0
                    ? static_cast<int>(std::thread::hardware_concurrency())
                    : threads;
  workers = std::max(1, std::min(workers, total));
  if (workers == 1) {
    for (int k = 0; k < total; ++k) run_one(k);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (int k = next.fetch_add(1); k < total; k = next.fetch_add(1)) {
          run_one(k);
        }
      });
    }
    for (auto& worker : pool) worker.join();
  }

  Eigen::VectorXd truth(d);
  truth[0] = config.truth.beta0;
  truth.segment(1, config.truth.beta.size()) = config.truth.beta;
  truth.tail(config.truth.gamma.size()) = config.truth.gamma;

  std::vector<const ReplicateFit*> ok_fits;
  for (const auto& fit : result.fits) {
    if (fit.ok) ok_fits.push_back(&fit);
  }
  result.failures = total - static_cast<int>(ok_fits.size());
  if (ok_fits.empty()) {
    throw std::runtime_error("every replicate failed to fit");
  }

  const double count = static_cast<double>(ok_fits.size());
  for (Eigen::Index j = 0; j < d; ++j) {
    StudyRow row;
    row.name = result.parameter_names[j];
    row.truth = truth[j];
    double sum = 0.0, sum_sq_err = 0.0;
    int in90 = 0, in95 = 0;
    for (const ReplicateFit* fit : ok_fits) {
      const double est = fit->medians[j];
      sum += est;
      sum_sq_err += (est - truth[j]) * (est - truth[j]);
      if (fit->lo90[j] <= truth[j] && truth[j] <= fit->hi90[j]) ++in90;
      if (fit->lo95[j] <= truth[j] && truth[j] <= fit->hi95[j]) ++in95;
    }
    const double mean = sum / count;
    row.bias = mean - truth[j];
    row.coverage90 = 100.0 * in90 / count;
    row.coverage95 = 100.0 * in95 / count;
    double spread = 0.0;
    for (const ReplicateFit* fit : ok_fits) {
      spread += (fit->medians[j] - mean) * (fit->medians[j] - mean);
    }
    row.ese = count > 1 ? std::sqrt(spread / (count - 1.0)) : 0.0;
    row.rmse = std::sqrt(sum_sq_err / count);
    result.table.push_back(std::move(row));
  }
  return result;
}

}  // namespace ptcure
