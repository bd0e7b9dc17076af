#pragma once

#include <Eigen/Dense>

#include "ptcure/data.hpp"
#include "ptcure/model.hpp"

namespace ptcure {

// Everything that pins down the model for a given dataset: spline layout,
// roughness penalty, and prior constants.  t_rcens = 0 means "use the
// largest observed time".
struct ModelConfig {
  int num_basis = 12;
  int quadrature_bins = 300;
  int penalty_order = 3;
  double penalty_ridge = kDefaultRidge;
  double fixed_phi = kDefaultFixedPhi;
  double sigma2_reg = 1e4;
  double nu = 2.0;
  double a_delta = 1e-4;
  double b_delta = 1e-4;
  double t_rcens = 0.0;
};

// Derived per-subject quantities the samplers reuse between proposals.
// Split by the parameter block that invalidates them.
struct ModelCache {
  // baseline block (phi)
  BaselineTable table;
  Eigen::VectorXd log_s0_obs;   // n, floored log baseline survival at t_i
  Eigen::VectorXd log_h0_obs;   // n, log baseline hazard at t_i
  // cure block (beta0, beta)
  Eigen::VectorXd lin_cure;     // n, beta0 + x_i'beta
  Eigen::VectorXd theta;        // n
  // latency block (gamma)
  Eigen::VectorXd lin_latency;  // n, z_i'gamma
  Eigen::VectorXd elin;         // n
};

// Log-likelihood, log-posterior and gradient for one dataset under one
// configuration.  Construction validates the data and precomputes the
// basis at every observed time and quadrature midpoint.
class PosteriorEvaluator {
 public:
  PosteriorEvaluator(SurvivalDataset data, ModelConfig config);

  const SurvivalDataset& data() const { return data_; }
  const ModelConfig& config() const { return config_; }
  const SplineBaseline& baseline() const { return base_; }
  const PenaltyMatrix& penalty() const { return penalty_; }
  const Eigen::MatrixXd& basis_at_times() const { return basis_obs_; }

  Eigen::Index num_basis() const { return config_.num_basis; }
  // Free coordinates: all phi but the pinned last one, beta0, beta, gamma.
  Eigen::Index free_dim() const {
    return num_basis() - 1 + 1 + data_.p() + data_.q();
  }

  // Neutral starting state: constant baseline log-hazard at the crude event
  // rate, all regression coefficients zero, pinned tail in place.
  ModelParams initial_params() const;

  // Throws std::runtime_error naming the first subject whose contribution
  // is non-finite.
  double log_likelihood(const ModelParams& params) const;
  double log_posterior(const ModelParams& params, const PenaltyHypers& hypers) const;

  // Gradient of the log-posterior over the free coordinates in the order
  // (phi without the pinned entry, beta0, beta, gamma).
  Eigen::VectorXd gradient(const ModelParams& params,
                           const PenaltyHypers& hypers) const;
  // Derivative of the log-posterior in log tau, used when the mode is
  // searched with tau on the log scale.
  double dlogpost_dlogtau(const ModelParams& params,
                          const PenaltyHypers& hypers) const;

  // Cache machinery for the samplers.  log_likelihood(cache) returns
  // -infinity instead of throwing when a contribution is non-finite, so a
  // Metropolis step can simply reject.
  ModelCache make_cache(const ModelParams& params) const;
  void refresh_baseline(ModelCache& cache, const Eigen::VectorXd& phi) const;
  void refresh_cure(ModelCache& cache, double beta0,
                    const Eigen::VectorXd& beta) const;
  void refresh_latency(ModelCache& cache, const Eigen::VectorXd& gamma) const;
  double log_likelihood(const ModelCache& cache) const;

  // Prior pieces.  The penalty prior keeps the tau^(K/2) normalizer since
  // tau is sampled; constants free of all sampled quantities are dropped.
  double log_penalty_prior(const Eigen::VectorXd& phi, double tau) const;
  double log_regression_prior(const ModelParams& params) const;
  double log_hyper_prior(const PenaltyHypers& hypers) const;
  static double log_gamma_density(double value, double shape, double rate);

  // Packing between ModelParams and the free-coordinate vector used by the
  // optimizer and the whitened proposals.
  Eigen::VectorXd pack(const ModelParams& params) const;
  ModelParams unpack(const Eigen::VectorXd& free) const;

 private:
  SurvivalDataset data_;
  ModelConfig config_;
  SplineBaseline base_;
  PenaltyMatrix penalty_;
  Eigen::MatrixXd basis_obs_;  // n x K
  Eigen::VectorXi bin_obs_;    // n
};

}  // namespace ptcure
