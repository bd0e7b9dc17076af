#include "ptcure/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ptcure {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

PenaltyHypers make_hypers(const ModelConfig& config, double tau, double delta) {
  PenaltyHypers hypers;
  hypers.tau = tau;
  hypers.delta = delta;
  hypers.nu = config.nu;
  hypers.a_delta = config.a_delta;
  hypers.b_delta = config.b_delta;
  return hypers;
}

// Log-posterior over (free coordinates, log tau) with delta held fixed.
// Any failure to evaluate counts as minus infinity so line searches back
// away from bad regions instead of aborting.
double extended_value(const PosteriorEvaluator& eval, const Eigen::VectorXd& v,
                      double delta) {
  const Eigen::Index d = eval.free_dim();
  const double tau = std::exp(v[d]);
  if (!(tau > 0.0) || !std::isfinite(tau)) return kNegInf;
  try {
    const ModelParams params = eval.unpack(v.head(d));
    const double value =
        eval.log_posterior(params, make_hypers(eval.config(), tau, delta));
    return std::isfinite(value) ? value : kNegInf;
  } catch (const std::runtime_error&) {
    return kNegInf;
  }
}

Eigen::VectorXd extended_gradient(const PosteriorEvaluator& eval,
                                  const Eigen::VectorXd& v, double delta) {
  const Eigen::Index d = eval.free_dim();
  const ModelParams params = eval.unpack(v.head(d));
  const PenaltyHypers hypers = make_hypers(eval.config(), std::exp(v[d]), delta);
  Eigen::VectorXd grad(d + 1);
  grad.head(d) = eval.gradient(params, hypers);
  grad[d] = eval.dlogpost_dlogtau(params, hypers);
  return grad;
}

// Central differences of the analytic gradient, symmetrized.
Eigen::MatrixXd fd_neg_hessian(const PosteriorEvaluator& eval,
                               const Eigen::VectorXd& v, double delta) {
  const Eigen::Index d1 = v.size();
  Eigen::MatrixXd hess(d1, d1);
  for (Eigen::Index j = 0; j < d1; ++j) {
    const double h = 1e-4 * std::max(1.0, std::abs(v[j]));
    Eigen::VectorXd vp = v, vm = v;
    vp[j] += h;
    vm[j] -= h;
    hess.col(j) =
        (extended_gradient(eval, vp, delta) - extended_gradient(eval, vm, delta)) /
        (2.0 * h);
  }
  hess = 0.5 * (hess + hess.transpose()).eval();
  return -hess;
}

}  // namespace

ModeResult posterior_mode(const PosteriorEvaluator& eval, double fixed_delta,
                          int max_iterations, double gradient_tol) {
  const Eigen::Index d = eval.free_dim();
  Eigen::VectorXd v(d + 1);
  v.head(d) = eval.pack(eval.initial_params());
  v[d] = 0.0;  // tau = 1

  double value = extended_value(eval, v, fixed_delta);
  if (!std::isfinite(value)) {
    throw std::runtime_error("log-posterior is non-finite at the starting point");
  }

  ModeResult result;
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    const Eigen::VectorXd grad = extended_gradient(eval, v, fixed_delta);
    if (grad.lpNorm<Eigen::Infinity>() < gradient_tol) break;

    const Eigen::MatrixXd neg_hess = fd_neg_hessian(eval, v, fixed_delta);
    const double diag_scale =
        std::max(1.0, neg_hess.diagonal().cwiseAbs().maxCoeff());

    // Newton direction with escalating ridge until the system is definite
    // and the step points uphill.
    Eigen::VectorXd step;
    bool have_step = false;
    double ridge = 0.0;
    for (int attempt = 0; attempt < 12 && !have_step; ++attempt) {
      Eigen::MatrixXd damped = neg_hess;
      damped.diagonal().array() += ridge;
      Eigen::LLT<Eigen::MatrixXd> llt(damped);
      if (llt.info() == Eigen::Success) {
        step = llt.solve(grad);
        if (grad.dot(step) > 0.0 && step.allFinite()) have_step = true;
      }
      ridge = ridge == 0.0 ? 1e-8 * diag_scale : ridge * 10.0;
    }
    if (!have_step) step = grad;

    double alpha = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Eigen::VectorXd candidate = v + alpha * step;
      const double candidate_value = extended_value(eval, candidate, fixed_delta);
      if (candidate_value > value) {
        v = candidate;
        value = candidate_value;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }

  result.iterations = iter;
  result.params = eval.unpack(v.head(d));
  result.tau = std::exp(v[d]);
  result.log_posterior = value;
  result.gradient = extended_gradient(eval, v, fixed_delta);
  result.neg_hessian = fd_neg_hessian(eval, v, fixed_delta);
  result.converged = result.gradient.lpNorm<Eigen::Infinity>() < gradient_tol;
  return result;
}

BlockTransform reparametrization_from_hessian(const Eigen::MatrixXd& neg_hessian_block) {
  const Eigen::Index d = neg_hessian_block.rows();
  BlockTransform transform;
  if (d == 0) {
    transform.directions.resize(0, 0);
    return transform;
  }
  if (neg_hessian_block.cols() != d) {
    throw std::invalid_argument("Hessian block must be square");
  }
  const Eigen::MatrixXd sym =
      0.5 * (neg_hessian_block + neg_hessian_block.transpose());
  const double diag_scale = std::max(1.0, sym.diagonal().cwiseAbs().maxCoeff());

  double ridge = 0.0;
  for (int attempt = 0; attempt < 10; ++attempt) {
    Eigen::MatrixXd damped = sym;
    damped.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(damped);
    if (llt.info() == Eigen::Success) {
      const Eigen::MatrixXd lower = llt.matrixL();
      transform.directions = lower.transpose()
                                 .triangularView<Eigen::Upper>()
                                 .solve(Eigen::MatrixXd::Identity(d, d));
      if (transform.directions.allFinite()) return transform;
    }
    ridge = ridge == 0.0 ? 1e-10 * diag_scale : ridge * 100.0;
  }
  transform.directions = Eigen::MatrixXd::Identity(d, d);
  transform.identity_fallback = true;
  return transform;
}

double gibbs_tau(const Eigen::VectorXd& phi, const Eigen::MatrixXd& penalty,
                 const PenaltyHypers& hypers, Rng& rng) {
  const double shape = 0.5 * (static_cast<double>(phi.size()) + hypers.nu);
  const double rate = 0.5 * (phi.dot(penalty * phi) + hypers.nu * hypers.delta);
  return rng.gamma(shape, rate);
}

double gibbs_delta(const PenaltyHypers& hypers, Rng& rng) {
  const double shape = hypers.a_delta + 0.5 * hypers.nu;
  const double rate = hypers.b_delta + 0.5 * hypers.nu * hypers.tau;
  return rng.gamma(shape, rate);
}

double adapt_scale(double scale, double accept_rate, double target,
                   int window_index, double min_scale, double max_scale) {
  const double strength = std::min(1.0, 10.0 / std::max(window_index, 1));
  const double updated = scale * std::exp(strength * (accept_rate - target));
  return std::clamp(updated, min_scale, max_scale);
}

BlockSampler::BlockSampler(const PosteriorEvaluator& eval, ModelParams init,
                           PenaltyHypers hypers)
    : eval_(&eval), params_(std::move(init)), hypers_(hypers) {
  loglik_ = eval_->log_likelihood(params_);  // throws on a bad start
  cache_ = eval_->make_cache(params_);
  scratch_ = cache_;

  const Eigen::Index baseline_dim = eval_->num_basis() - 1;
  const Eigen::Index cure_dim = 1 + eval_->data().p();
  const Eigen::Index latency_dim = eval_->data().q();
  transforms_.resize(3);
  transforms_[0].directions =
      Eigen::MatrixXd::Identity(baseline_dim, baseline_dim);
  transforms_[1].directions = Eigen::MatrixXd::Identity(cure_dim, cure_dim);
  transforms_[2].directions =
      Eigen::MatrixXd::Identity(latency_dim, latency_dim);
  coord_offset_[0] = 0;
  coord_offset_[1] = static_cast<int>(baseline_dim);
  coord_offset_[2] = static_cast<int>(baseline_dim + cure_dim);

  const Eigen::Index coords = baseline_dim + cure_dim + latency_dim;
  scales_ = Eigen::VectorXd::Ones(coords);
  window_accepts_ = Eigen::ArrayXi::Zero(coords);
  total_accepts_ = Eigen::ArrayXi::Zero(coords);
}

void BlockSampler::set_transforms(BlockTransform baseline, BlockTransform cure,
                                  BlockTransform latency) {
  const Eigen::Index dims[3] = {eval_->num_basis() - 1, 1 + eval_->data().p(),
                                eval_->data().q()};
  const BlockTransform* blocks[3] = {&baseline, &cure, &latency};
  for (int b = 0; b < 3; ++b) {
    if (blocks[b]->directions.rows() != dims[b] ||
        blocks[b]->directions.cols() != dims[b]) {
      throw std::invalid_argument("proposal directions have the wrong shape");
    }
  }
  transforms_[0] = std::move(baseline);
  transforms_[1] = std::move(cure);
  transforms_[2] = std::move(latency);
}

void BlockSampler::set_scales(const Eigen::VectorXd& scales) {
  if (scales.size() != scales_.size()) {
    throw std::invalid_argument("scale vector has the wrong length");
  }
  if (!(scales.array() > 0.0).all()) {
    throw std::invalid_argument("proposal scales must be positive");
  }
  scales_ = scales;
}

int BlockSampler::update_baseline(Rng& rng) { return update_block(0, rng); }
int BlockSampler::update_cure(Rng& rng) { return update_block(1, rng); }
int BlockSampler::update_latency(Rng& rng) { return update_block(2, rng); }

int BlockSampler::update_block(int block, Rng& rng) {
  const Eigen::Index dim = transforms_[block].directions.cols();
  if (dim == 0) return 0;

  // Non-proposed blocks of the scratch cache must mirror the current state
  // before the sweep refreshes the proposed one.
  scratch_ = cache_;

  int accepted = 0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Eigen::Index coord = coord_offset_[block] + j;
    const double step = scales_[coord] * rng.normal();
    const Eigen::VectorXd move = step * transforms_[block].directions.col(j);

    double log_ratio = 0.0;
    double candidate_loglik = 0.0;
    Eigen::VectorXd phi_cand;
    double beta0_cand = 0.0;
    Eigen::VectorXd beta_cand, gamma_cand;

    switch (block) {
      case 0: {
        phi_cand = params_.phi;
        phi_cand.head(dim) += move;
        eval_->refresh_baseline(scratch_, phi_cand);
        candidate_loglik = eval_->log_likelihood(scratch_);
        log_ratio = candidate_loglik +
                    eval_->log_penalty_prior(phi_cand, hypers_.tau) - loglik_ -
                    eval_->log_penalty_prior(params_.phi, hypers_.tau);
        break;
      }
      case 1: {
        beta0_cand = params_.beta0 + move[0];
        beta_cand = params_.beta + move.tail(dim - 1);
        eval_->refresh_cure(scratch_, beta0_cand, beta_cand);
        candidate_loglik = eval_->log_likelihood(scratch_);
        const double sq_cur =
            params_.beta0 * params_.beta0 + params_.beta.squaredNorm();
        const double sq_cand =
            beta0_cand * beta0_cand + beta_cand.squaredNorm();
        log_ratio = candidate_loglik - loglik_ -
                    0.5 * (sq_cand - sq_cur) / eval_->config().sigma2_reg;
        break;
      }
      default: {
        gamma_cand = params_.gamma + move;
        eval_->refresh_latency(scratch_, gamma_cand);
        candidate_loglik = eval_->log_likelihood(scratch_);
        log_ratio = candidate_loglik - loglik_ -
                    0.5 * (gamma_cand.squaredNorm() - params_.gamma.squaredNorm()) /
                        eval_->config().sigma2_reg;
        break;
      }
    }

    if (std::log(rng.uniform()) < log_ratio) {
      switch (block) {
        case 0:
          params_.phi = phi_cand;
          break;
        case 1:
          params_.beta0 = beta0_cand;
          params_.beta = beta_cand;
          break;
        default:
          params_.gamma = gamma_cand;
          break;
      }
      std::swap(cache_, scratch_);
      loglik_ = candidate_loglik;
      ++accepted;
      ++window_accepts_[coord];
      ++total_accepts_[coord];
    }
  }
  return accepted;
}

void BlockSampler::draw_hypers(Rng& rng) {
  hypers_.tau = gibbs_tau(params_.phi, eval_->penalty().P, hypers_, rng);
  hypers_.delta = gibbs_delta(hypers_, rng);
}

ModelParams ChainOutput::params_at(Eigen::Index row) const {
  ModelParams params;
  params.phi = draws.row(row).head(num_basis).transpose();
  params.beta0 = draws(row, num_basis);
  params.beta = draws.row(row).segment(num_basis + 1, p).transpose();
  params.gamma = draws.row(row).segment(num_basis + 1 + p, q).transpose();
  return params;
}

ChainOutput run_chain(const SurvivalDataset& data, const ModelConfig& model,
                      const ChainConfig& chain) {
  if (chain.iterations <= 0 || chain.burnin < 0 ||
      chain.burnin >= chain.iterations) {
    throw std::invalid_argument(
        "need iterations > burnin >= 0 to keep at least one draw");
  }
  if (chain.adapt_window < 1) {
    throw std::invalid_argument("adaptation window must be at least 1");
  }
  if (!(chain.target_acceptance > 0.0 && chain.target_acceptance < 1.0)) {
    throw std::invalid_argument("target acceptance must lie in (0, 1)");
  }

  const PosteriorEvaluator eval(data, model);
  Rng rng(chain.seed);

  ModelParams start = eval.initial_params();
  double tau0 = 1.0;
  bool mode_converged = true;
  ModeResult mode;
  if (chain.mode_start) {
    mode = posterior_mode(eval, chain.mode_fixed_delta,
                          chain.mode_max_iterations, chain.mode_gradient_tol);
    start = mode.params;
    tau0 = mode.tau;
    mode_converged = mode.converged;
  }

  BlockSampler sampler(eval, start,
                       make_hypers(eval.config(), tau0, chain.mode_fixed_delta));

  const int num_basis = eval.config().num_basis;
  const Eigen::Index p = data.p();
  const Eigen::Index q = data.q();
  bool identity_fallback = false;
  if (chain.reparametrize && chain.mode_start) {
    BlockTransform baseline = reparametrization_from_hessian(
        mode.neg_hessian.block(0, 0, num_basis - 1, num_basis - 1));
    BlockTransform cure = reparametrization_from_hessian(
        mode.neg_hessian.block(num_basis - 1, num_basis - 1, 1 + p, 1 + p));
    BlockTransform latency = reparametrization_from_hessian(
        mode.neg_hessian.block(num_basis + p, num_basis + p, q, q));
    identity_fallback = baseline.identity_fallback || cure.identity_fallback ||
                        latency.identity_fallback;
    sampler.set_transforms(std::move(baseline), std::move(cure),
                           std::move(latency));
  }

  ChainOutput out;
  out.num_basis = num_basis;
  out.p = static_cast<int>(p);
  out.q = static_cast<int>(q);
  out.fixed_phi = eval.config().fixed_phi;
  out.seed = chain.seed;
  out.iterations = chain.iterations;
  out.burnin = chain.burnin;
  out.reparametrized = chain.reparametrize && chain.mode_start;
  out.identity_fallback = identity_fallback;
  out.mode_converged = mode_converged;

  out.names.reserve(num_basis + 3 + p + q);
  for (int k = 0; k < num_basis; ++k) {
    out.names.push_back("phi_" + std::to_string(k + 1));
  }
  out.names.push_back("beta0");
  for (Eigen::Index j = 0; j < p; ++j) out.names.push_back("beta_" + data.x_names[j]);
  for (Eigen::Index j = 0; j < q; ++j) out.names.push_back("gamma_" + data.z_names[j]);
  out.names.push_back("tau");
  out.names.push_back("delta");

  out.coord_labels.reserve(sampler.num_coords());
  for (int k = 0; k + 1 < num_basis; ++k) {
    out.coord_labels.push_back("baseline_" + std::to_string(k + 1));
  }
  out.coord_labels.push_back("beta0");
  for (Eigen::Index j = 0; j < p; ++j) {
    out.coord_labels.push_back("beta_" + data.x_names[j]);
  }
  for (Eigen::Index j = 0; j < q; ++j) {
    out.coord_labels.push_back("gamma_" + data.z_names[j]);
  }

  const Eigen::Index kept = chain.iterations - chain.burnin;
  out.draws.resize(kept, num_basis + 1 + p + q + 2);

  Eigen::VectorXd scales = sampler.scales();
  Eigen::ArrayXi accepts_at_burnin = Eigen::ArrayXi::Zero(sampler.num_coords());
  int window_index = 0;

  for (int t = 1; t <= chain.iterations; ++t) {
    sampler.update_baseline(rng);
    sampler.draw_hypers(rng);
    sampler.update_cure(rng);
    sampler.update_latency(rng);

    if (t <= chain.burnin && t % chain.adapt_window == 0) {
      ++window_index;
      const Eigen::ArrayXd rates =
          sampler.window_accepts().cast<double>() / chain.adapt_window;
      for (Eigen::Index c = 0; c < scales.size(); ++c) {
        scales[c] = adapt_scale(scales[c], rates[c], chain.target_acceptance,
                                window_index, chain.min_scale, chain.max_scale);
      }
      sampler.set_scales(scales);
      sampler.reset_window();
    }
    if (t == chain.burnin) accepts_at_burnin = sampler.total_accepts();

    if (t > chain.burnin) {
      const Eigen::Index row = t - chain.burnin - 1;
      const ModelParams& params = sampler.params();
      out.draws.row(row).head(num_basis) = params.phi.transpose();
      out.draws(row, num_basis) = params.beta0;
      out.draws.row(row).segment(num_basis + 1, p) = params.beta.transpose();
      out.draws.row(row).segment(num_basis + 1 + p, q) = params.gamma.transpose();
      out.draws(row, num_basis + 1 + p + q) = sampler.hypers().tau;
      out.draws(row, num_basis + 2 + p + q) = sampler.hypers().delta;
    }
  }

  out.acceptance = ((sampler.total_accepts() - accepts_at_burnin).cast<double>() /
                    static_cast<double>(kept))
                       .matrix();
  out.final_scales = sampler.scales();
  return out;
}

}  // namespace ptcure
