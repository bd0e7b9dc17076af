#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ptcure/posterior.hpp"
#include "ptcure/rng.hpp"

namespace ptcure {

// Settings of one Metropolis-within-Gibbs run.  Proposal scales adapt in
// windows of adapt_window iterations during burn-in only, so the kept part
// of the chain comes from a fixed kernel.
struct ChainConfig {
  int iterations = 23000;
  int burnin = 3000;
  std::uint64_t seed = 1;
  double target_acceptance = 0.44;
  int adapt_window = 100;
  double min_scale = 1e-8;
  double max_scale = 1e4;
  bool reparametrize = true;
  bool mode_start = true;
  double mode_fixed_delta = 1.0;
  int mode_max_iterations = 200;
  double mode_gradient_tol = 1e-6;
};

// Local maximizer of the log-posterior over the free coordinates with tau
// on the log scale and delta held fixed.  neg_hessian is the finite
// difference negative Hessian at the final point, free coordinates first,
// log tau last.
struct ModeResult {
  ModelParams params;
  double tau = 1.0;
  double log_posterior = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd neg_hessian;
  bool converged = false;
  int iterations = 0;
};

ModeResult posterior_mode(const PosteriorEvaluator& eval,
                          double fixed_delta = 1.0, int max_iterations = 200,
                          double gradient_tol = 1e-6);

// Proposal directions for one block, the columns of inverse(L)' where
// L L' is the Cholesky factor of the block of the negative Hessian.  A
// block that stays non definite under ridge escalation falls back to the
// identity and says so.
struct BlockTransform {
  Eigen::MatrixXd directions;
  bool identity_fallback = false;
};

BlockTransform reparametrization_from_hessian(const Eigen::MatrixXd& neg_hessian_block);

// Conjugate draws for the penalty hyperlevel.
double gibbs_tau(const Eigen::VectorXd& phi, const Eigen::MatrixXd& penalty,
                 const PenaltyHypers& hypers, Rng& rng);
double gibbs_delta(const PenaltyHypers& hypers, Rng& rng);

// One proposal-scale update from the acceptance rate of a finished window.
// Early windows move the scale at full strength, later ones more gently.
double adapt_scale(double scale, double accept_rate, double target,
                   int window_index, double min_scale, double max_scale);

// Random-walk Metropolis over the three parameter blocks, one univariate
// move per coordinate along that block's proposal directions.  The state
// caches per-subject quantities so a proposal only recomputes the block it
// touches.
class BlockSampler {
 public:
  BlockSampler(const PosteriorEvaluator& eval, ModelParams init,
               PenaltyHypers hypers);

  // Proposal geometry; scales has one entry per Metropolis coordinate in
  // the order (baseline free coords, beta0 and beta, gamma).
  void set_transforms(BlockTransform baseline, BlockTransform cure,
                      BlockTransform latency);
  void set_scales(const Eigen::VectorXd& scales);
  const Eigen::VectorXd& scales() const { return scales_; }
  Eigen::Index num_coords() const { return scales_.size(); }

  const ModelParams& params() const { return params_; }
  const PenaltyHypers& hypers() const { return hypers_; }
  double log_likelihood() const { return loglik_; }

  // One sweep of univariate moves through a block; returns accepted moves.
  int update_baseline(Rng& rng);
  int update_cure(Rng& rng);
  int update_latency(Rng& rng);
  // Conjugate refresh of tau then delta.
  void draw_hypers(Rng& rng);

  // Per-coordinate accept counts since the last reset, for adaptation.
  const Eigen::ArrayXi& window_accepts() const { return window_accepts_; }
  void reset_window() { window_accepts_.setZero(); }
  const Eigen::ArrayXi& total_accepts() const { return total_accepts_; }

 private:
  int update_block(int block, Rng& rng);

  const PosteriorEvaluator* eval_;
  ModelParams params_;
  PenaltyHypers hypers_;
  ModelCache cache_;
  ModelCache scratch_;
  double loglik_ = 0.0;
  std::vector<BlockTransform> transforms_;
  Eigen::VectorXd scales_;
  Eigen::ArrayXi window_accepts_;
  Eigen::ArrayXi total_accepts_;
  int coord_offset_[3] = {0, 0, 0};
};

// Posterior draws after burn-in plus run diagnostics.  Column layout:
// the full coefficient vector (pinned tail included, so any draw rebuilds
// its baseline), beta0, beta, gamma, tau, delta.
struct ChainOutput {
  std::vector<std::string> names;
  Eigen::MatrixXd draws;
  int num_basis = 0;
  int p = 0;
  int q = 0;
  double fixed_phi = kDefaultFixedPhi;
  std::uint64_t seed = 0;
  int iterations = 0;
  int burnin = 0;
  Eigen::VectorXd acceptance;   // per Metropolis coordinate
  Eigen::VectorXd final_scales;
  std::vector<std::string> coord_labels;
  bool reparametrized = false;
  bool identity_fallback = false;
  bool mode_converged = true;

  Eigen::Index kept() const { return draws.rows(); }
  Eigen::Index columns() const { return draws.cols(); }
  ModelParams params_at(Eigen::Index row) const;
  double tau_at(Eigen::Index row) const { return draws(row, num_basis + 1 + p + q); }
  double delta_at(Eigen::Index row) const { return draws(row, num_basis + 2 + p + q); }
  // Column index of a regression coefficient: 0 = beta0, then beta, gamma.
  Eigen::Index regression_column(Eigen::Index j) const { return num_basis + j; }
};

ChainOutput run_chain(const SurvivalDataset& data, const ModelConfig& model,
                      const ChainConfig& chain);

}  // namespace ptcure
