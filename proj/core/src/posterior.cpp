#include "ptcure/posterior.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ptcure {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_config(const ModelConfig& config) {
  if (config.num_basis <= config.penalty_order) {
    throw std::invalid_argument("basis size must exceed the penalty order");
  }
  if (config.quadrature_bins < 1) {
    throw std::invalid_argument("need at least one quadrature bin");
  }
  if (!(config.sigma2_reg > 0.0)) {
    throw std::invalid_argument("regression prior variance must be positive");
  }
  if (!(config.nu > 0.0) || !(config.a_delta > 0.0) || !(config.b_delta > 0.0)) {
    throw std::invalid_argument("hyperprior constants must be positive");
  }
  if (!std::isfinite(config.fixed_phi)) {
    throw std::invalid_argument("pinned tail coefficient must be finite");
  }
}

void check_params(const ModelParams& params, const SurvivalDataset& data,
                  const ModelConfig& config) {
  if (params.phi.size() != config.num_basis) {
    throw std::invalid_argument("coefficient vector does not match the basis size");
  }
  if (params.beta.size() != data.p() || params.gamma.size() != data.q()) {
    throw std::invalid_argument("regression coefficients do not match the data");
  }
}

}  // namespace

PosteriorEvaluator::PosteriorEvaluator(SurvivalDataset data, ModelConfig config)
    : data_(std::move(data)), config_(config) {
  check_config(config_);
  if (config_.t_rcens <= 0.0) config_.t_rcens = max_time(data_);
  validate_dataset(data_, config_.t_rcens);

  base_ = make_spline_baseline(config_.t_rcens, config_.num_basis,
                               config_.quadrature_bins);
  penalty_ = penalty_from_difference(
      difference_matrix(config_.num_basis, config_.penalty_order),
      config_.penalty_ridge);

  const Eigen::Index n = data_.n();
  basis_obs_.resize(n, config_.num_basis);
  bin_obs_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    basis_obs_.row(i) = eval_basis(base_.knots, data_.times[i]);
    bin_obs_[i] = base_.quad.bin_of(data_.times[i]);
  }
}

ModelParams PosteriorEvaluator::initial_params() const {
  ModelParams params;
  const double events = data_.events.sum();
  const double exposure = data_.times.sum();
  const double crude_log_hazard = std::log(std::max(events, 0.5) / exposure);
  params.phi = Eigen::VectorXd::Constant(config_.num_basis, crude_log_hazard);
  params.phi[config_.num_basis - 1] = config_.fixed_phi;
  params.beta = Eigen::VectorXd::Zero(data_.p());
  params.gamma = Eigen::VectorXd::Zero(data_.q());
  return params;
}

ModelCache PosteriorEvaluator::make_cache(const ModelParams& params) const {
  check_params(params, data_, config_);
  ModelCache cache;
  refresh_baseline(cache, params.phi);
  refresh_cure(cache, params.beta0, params.beta);
  refresh_latency(cache, params.gamma);
  return cache;
}

void PosteriorEvaluator::refresh_baseline(ModelCache& cache,
                                          const Eigen::VectorXd& phi) const {
  cache.table = build_baseline_table(base_, phi);
  cache.log_h0_obs = basis_obs_ * phi;
  const Eigen::Index n = data_.n();
  cache.log_s0_obs.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cache.log_s0_obs[i] = cache.table.log_survival_at_bin(bin_obs_[i]);
  }
}

void PosteriorEvaluator::refresh_cure(ModelCache& cache, double beta0,
                                      const Eigen::VectorXd& beta) const {
  cache.lin_cure = ((data_.x * beta).array() + beta0).matrix();
  cache.theta = cache.lin_cure.array().exp().matrix();
}

void PosteriorEvaluator::refresh_latency(ModelCache& cache,
                                         const Eigen::VectorXd& gamma) const {
  cache.lin_latency = data_.z * gamma;
  cache.elin = cache.lin_latency.array().exp().matrix();
}

namespace {

// nu_i * log hp(t_i) + log Sp(t_i) for one subject, all pieces cached.
double subject_loglik(const ModelCache& cache, const Eigen::VectorXd& events,
                      Eigen::Index i) {
  const double scaled_log_s0 = cache.elin[i] * cache.log_s0_obs[i];
  const double failed_mass = -std::expm1(scaled_log_s0);
  return events[i] * (cache.lin_cure[i] + cache.lin_latency[i] +
                      cache.log_h0_obs[i] + scaled_log_s0) -
         cache.theta[i] * failed_mass;
}

}  // namespace

double PosteriorEvaluator::log_likelihood(const ModelCache& cache) const {
  double total = 0.0;
  for (Eigen::Index i = 0; i < data_.n(); ++i) {
    const double term = subject_loglik(cache, data_.events, i);
    if (!std::isfinite(term)) return -std::numeric_limits<double>::infinity();
    total += term;
  }
  return total;
}

double PosteriorEvaluator::log_likelihood(const ModelParams& params) const {
  const ModelCache cache = make_cache(params);
  double total = 0.0;
  for (Eigen::Index i = 0; i < data_.n(); ++i) {
    const double term = subject_loglik(cache, data_.events, i);
    if (!std::isfinite(term)) {
      std::ostringstream msg;
      msg << "log-likelihood is non-finite at subject " << i + 1;
      throw std::runtime_error(msg.str());
    }
    total += term;
  }
  return total;
}

double PosteriorEvaluator::log_penalty_prior(const Eigen::VectorXd& phi,
                                             double tau) const {
  if (!(tau > 0.0)) throw std::invalid_argument("roughness precision must be positive");
  const double quad_form = phi.dot(penalty_.P * phi);
  return 0.5 * config_.num_basis * std::log(tau) - 0.5 * tau * quad_form;
}

double PosteriorEvaluator::log_regression_prior(const ModelParams& params) const {
  const double sigma2 = config_.sigma2_reg;
  const Eigen::Index count = 1 + params.beta.size() + params.gamma.size();
  double sq = params.beta0 * params.beta0 + params.beta.squaredNorm() +
              params.gamma.squaredNorm();
  return -0.5 * count * (kLog2Pi + std::log(sigma2)) - 0.5 * sq / sigma2;
}

double PosteriorEvaluator::log_hyper_prior(const PenaltyHypers& hypers) const {
  return log_gamma_density(hypers.tau, 0.5 * hypers.nu,
                           0.5 * hypers.nu * hypers.delta) +
         log_gamma_density(hypers.delta, hypers.a_delta, hypers.b_delta);
}

double PosteriorEvaluator::log_gamma_density(double value, double shape,
                                             double rate) {
  if (!(value > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(value) - rate * value;
}

double PosteriorEvaluator::log_posterior(const ModelParams& params,
                                         const PenaltyHypers& hypers) const {
  return log_likelihood(params) + log_penalty_prior(params.phi, hypers.tau) +
         log_hyper_prior(hypers) + log_regression_prior(params);
}

Eigen::VectorXd PosteriorEvaluator::gradient(const ModelParams& params,
                                             const PenaltyHypers& hypers) const {
  const ModelCache cache = make_cache(params);
  const Eigen::Index n = data_.n();
  const int num_basis = config_.num_basis;
  const int bins = base_.quad.bins;
  const double sigma2 = config_.sigma2_reg;

  // alive_uncured = S0(t_i)^elin_i, failed_mass = 1 - alive_uncured.
  Eigen::VectorXd alive_uncured(n), failed_mass(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scaled = cache.elin[i] * cache.log_s0_obs[i];
    alive_uncured[i] = std::exp(scaled);
    failed_mass[i] = -std::expm1(scaled);
  }

  // Cure block: residual nu_i - theta_i * failed_mass_i.
  const Eigen::VectorXd resid =
      data_.events - cache.theta.cwiseProduct(failed_mass);

  // Baseline block.  The cumulative hazard at t_i sums full bins up to the
  // bin of t_i, so its derivative in phi_k gathers the same bins; the inner
  // double sum is reordered into one pass over bins via suffix totals.
  Eigen::VectorXd dphi = basis_obs_.transpose() * data_.events;
  Eigen::VectorXd per_subject =
      cache.elin.cwiseProduct(data_.events + cache.theta.cwiseProduct(alive_uncured));
  Eigen::VectorXd bucket = Eigen::VectorXd::Zero(bins);
  for (Eigen::Index i = 0; i < n; ++i) bucket[bin_obs_[i] - 1] += per_subject[i];
  Eigen::VectorXd suffix(bins);
  double acc = 0.0;
  for (int j = bins - 1; j >= 0; --j) {
    acc += bucket[j];
    suffix[j] = acc;
  }
  const Eigen::VectorXd bin_hazard_mass =
      (cache.table.log_hazard_mid.array().exp() * base_.quad.width).matrix();
  dphi.noalias() -=
      base_.quad.basis_at_midpoints.transpose() * bin_hazard_mass.cwiseProduct(suffix);
  dphi.noalias() -= hypers.tau * (penalty_.P * params.phi);

  const double dbeta0 = resid.sum() - params.beta0 / sigma2;
  const Eigen::VectorXd dbeta =
      data_.x.transpose() * resid - params.beta / sigma2;

  Eigen::VectorXd latency_coef(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scaled = cache.elin[i] * cache.log_s0_obs[i];
    latency_coef[i] = data_.events[i] * (1.0 + scaled) +
                      cache.theta[i] * alive_uncured[i] * scaled;
  }
  const Eigen::VectorXd dgamma =
      data_.z.transpose() * latency_coef - params.gamma / sigma2;

  Eigen::VectorXd grad(free_dim());
  grad.head(num_basis - 1) = dphi.head(num_basis - 1);
  grad[num_basis - 1] = dbeta0;
  grad.segment(num_basis, data_.p()) = dbeta;
  grad.tail(data_.q()) = dgamma;
  return grad;
}

double PosteriorEvaluator::dlogpost_dlogtau(const ModelParams& params,
                                            const PenaltyHypers& hypers) const {
  const double quad_form = params.phi.dot(penalty_.P * params.phi);
  return 0.5 * config_.num_basis + 0.5 * hypers.nu - 1.0 -
         0.5 * hypers.tau * (quad_form + hypers.nu * hypers.delta);
}

Eigen::VectorXd PosteriorEvaluator::pack(const ModelParams& params) const {
  Eigen::VectorXd free(free_dim());
  const int num_basis = config_.num_basis;
  free.head(num_basis - 1) = params.phi.head(num_basis - 1);
  free[num_basis - 1] = params.beta0;
  free.segment(num_basis, data_.p()) = params.beta;
  free.tail(data_.q()) = params.gamma;
  return free;
}

ModelParams PosteriorEvaluator::unpack(const Eigen::VectorXd& free) const {
  if (free.size() != free_dim()) {
    throw std::invalid_argument("free-coordinate vector has the wrong length");
  }
  const int num_basis = config_.num_basis;
  ModelParams params;
  params.phi.resize(num_basis);
  params.phi.head(num_basis - 1) = free.head(num_basis - 1);
  params.phi[num_basis - 1] = config_.fixed_phi;
  params.beta0 = free[num_basis - 1];
  params.beta = free.segment(num_basis, data_.p());
  params.gamma = free.tail(data_.q());
  return params;
}

}  // namespace ptcure
