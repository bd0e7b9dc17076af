#include "ptcure/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ptcure {

namespace {

// Below this activation mean the cure probability is 1 to double precision
// and conditioning on susceptibility is meaningless.
constexpr double kThetaTiny = 1e-12;

void check_profile(const ModelParams& params, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& z) {
  if (x.size() != params.beta.size()) {
    std::ostringstream msg;
    msg << "covariate profile has " << x.size() << " cure entries, model has "
        << params.beta.size();
    throw std::invalid_argument(msg.str());
  }
  if (z.size() != params.gamma.size()) {
    std::ostringstream msg;
    msg << "covariate profile has " << z.size() << " latency entries, model has "
        << params.gamma.size();
    throw std::invalid_argument(msg.str());
  }
}

double latency_scale(const ModelParams& params, const Eigen::VectorXd& z) {
  return std::exp(z.dot(params.gamma));
}

}  // namespace

int QuadratureGrid::bin_of(double t) const {
  if (!(t > 0.0) || t > upper * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "time " << t << " outside the integration range (0, " << upper << "]";
    throw std::out_of_range(msg.str());
  }
  const int bin = static_cast<int>(std::ceil(t / width));
  return std::min(std::max(bin, 1), bins);
}

SplineBaseline make_spline_baseline(double t_rcens, int num_basis,
                                    int quadrature_bins) {
  if (quadrature_bins < 1) throw std::invalid_argument("need at least one quadrature bin");
  SplineBaseline base;
  base.knots = build_knot_grid(0.0, t_rcens, num_basis);

  QuadratureGrid& quad = base.quad;
  quad.bins = quadrature_bins;
  quad.upper = t_rcens;
  quad.width = t_rcens / quadrature_bins;
  quad.midpoints.resize(quadrature_bins);
  quad.basis_at_midpoints.resize(quadrature_bins, num_basis);
  for (int j = 0; j < quadrature_bins; ++j) {
    quad.midpoints[j] = (j + 0.5) * quad.width;
    quad.basis_at_midpoints.row(j) = eval_basis(base.knots, quad.midpoints[j]);
  }
  return base;
}

double BaselineTable::log_survival_at_bin(int bin) const {
  return std::max(-cum_hazard[bin], kLogSurvivalFloor);
}

BaselineTable build_baseline_table(const SplineBaseline& base,
                                   const Eigen::VectorXd& phi) {
  if (phi.size() != base.knots.num_basis) {
    throw std::invalid_argument("coefficient vector does not match the basis size");
  }
  BaselineTable table;
  table.log_hazard_mid = base.quad.basis_at_midpoints * phi;
  const int bins = base.quad.bins;
  table.cum_hazard.resize(bins + 1);
  table.cum_hazard[0] = 0.0;
  double acc = 0.0;
  for (int j = 0; j < bins; ++j) {
    acc += std::exp(table.log_hazard_mid[j]) * base.quad.width;
    table.cum_hazard[j + 1] = acc;
  }
  return table;
}

namespace {

double table_log_survival(const BaselineTable& table, const SplineBaseline& base,
                          double t) {
  if (t == 0.0) return 0.0;
  return table.log_survival_at_bin(base.quad.bin_of(t));
}

}  // namespace

double baseline_hazard(const ModelParams& params, const SplineBaseline& base,
                       double t) {
  return std::exp(eval_basis(base.knots, t).dot(params.phi));
}

double baseline_survival(const ModelParams& params, const SplineBaseline& base,
                         double t) {
  return baseline_survival(build_baseline_table(base, params.phi), base, t);
}

double baseline_survival(const BaselineTable& table, const SplineBaseline& base,
                         double t) {
  return std::exp(table_log_survival(table, base, t));
}

SplineBaselineCurve::SplineBaselineCurve(const SplineBaseline& base,
                                         const Eigen::VectorXd& phi)
    : base_(&base), phi_(phi), table_(build_baseline_table(base, phi)) {}

BaselinePoint SplineBaselineCurve::at(double t) const {
  BaselinePoint point;
  point.hazard = std::exp(eval_basis(base_->knots, t).dot(phi_));
  point.log_survival = table_log_survival(table_, *base_, t);
  return point;
}

BaselinePoint WeibullBaselineCurve::at(double t) const {
  BaselinePoint point;
  point.hazard = dist_.hazard(t);
  point.log_survival = std::max(-dist_.cumulative_hazard(t), kLogSurvivalFloor);
  return point;
}

double theta_mean(const ModelParams& params, const Eigen::VectorXd& x) {
  if (x.size() != params.beta.size()) {
    throw std::invalid_argument("covariate profile does not match the cure slopes");
  }
  return std::exp(params.beta0 + x.dot(params.beta));
}

namespace promotion {

double log_population_survival(double theta, double elin, double log_s0) {
  // 1 - S0^elin without cancellation for small exponents.
  const double failed_mass = -std::expm1(elin * log_s0);
  return -theta * failed_mass;
}

double log_population_hazard(double theta, double elin, double hazard0,
                             double log_s0) {
  return std::log(theta) + std::log(elin) + std::log(hazard0) + elin * log_s0;
}

double uncured_given_alive(double theta, double elin, double log_s0) {
  return -std::expm1(-theta * std::exp(elin * log_s0));
}

double susceptible_survival(double theta, double elin, double log_s0) {
  const double alive_uncured = std::exp(elin * log_s0);
  return std::exp(-theta) * std::expm1(theta * alive_uncured) / (-std::expm1(-theta));
}

}  // namespace promotion

double population_survival(const ModelParams& params, const BaselineCurve& baseline,
                           const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                           double t) {
  check_profile(params, x, z);
  const double theta = theta_mean(params, x);
  const double elin = latency_scale(params, z);
  return std::exp(promotion::log_population_survival(
      theta, elin, baseline.at(t).log_survival));
}

double population_hazard(const ModelParams& params, const BaselineCurve& baseline,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                         double t) {
  check_profile(params, x, z);
  const double theta = theta_mean(params, x);
  const double elin = latency_scale(params, z);
  const BaselinePoint point = baseline.at(t);
  return theta * elin * point.hazard * std::exp(elin * point.log_survival);
}

double susceptible_survival(const ModelParams& params, const BaselineCurve& baseline,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                            double t) {
  check_profile(params, x, z);
  const double theta = theta_mean(params, x);
  if (theta < kThetaTiny) {
    throw std::domain_error(
        "activation mean is numerically zero; everyone is cured and the "
        "susceptible survival is undefined");
  }
  const double elin = latency_scale(params, z);
  return promotion::susceptible_survival(theta, elin,
                                         baseline.at(t).log_survival);
}

double susceptible_hazard(const ModelParams& params, const BaselineCurve& baseline,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                          double t) {
  check_profile(params, x, z);
  const double theta = theta_mean(params, x);
  if (theta < kThetaTiny) {
    throw std::domain_error(
        "activation mean is numerically zero; everyone is cured and the "
        "susceptible hazard is undefined");
  }
  const double elin = latency_scale(params, z);
  const BaselinePoint point = baseline.at(t);
  const double uncured = promotion::uncured_given_alive(theta, elin,
                                                        point.log_survival);
  if (!(uncured > 0.0)) {
    throw std::domain_error(
        "population survival has reached its cure plateau; the susceptible "
        "hazard is undefined this far out");
  }
  return theta * elin * point.hazard * std::exp(elin * point.log_survival) /
         uncured;
}

double log_hazard_ratio_population(const ModelParams& params,
                                   const BaselineCurve& baseline,
                                   const Eigen::VectorXd& x1, const Eigen::VectorXd& z1,
                                   const Eigen::VectorXd& x2, const Eigen::VectorXd& z2,
                                   double t, bool* boundary_flag) {
  check_profile(params, x1, z1);
  check_profile(params, x2, z2);
  const double log_s0 = baseline.at(t).log_survival;
  if (boundary_flag != nullptr) {
    *boundary_flag = log_s0 <= kLogSurvivalFloor;
  }
  const double elin1 = latency_scale(params, z1);
  const double elin2 = latency_scale(params, z2);
  return (x1 - x2).dot(params.beta) + (z1 - z2).dot(params.gamma) +
         (elin1 - elin2) * log_s0;
}

double log_hazard_ratio_susceptible(const ModelParams& params,
                                    const BaselineCurve& baseline,
                                    const Eigen::VectorXd& x1, const Eigen::VectorXd& z1,
                                    const Eigen::VectorXd& x2, const Eigen::VectorXd& z2,
                                    double t) {
  check_profile(params, x1, z1);
  check_profile(params, x2, z2);
  const double log_s0 = baseline.at(t).log_survival;
  const double theta1 = theta_mean(params, x1);
  const double theta2 = theta_mean(params, x2);
  const double elin1 = latency_scale(params, z1);
  const double elin2 = latency_scale(params, z2);
  const double uncured1 = promotion::uncured_given_alive(theta1, elin1, log_s0);
  const double uncured2 = promotion::uncured_given_alive(theta2, elin2, log_s0);
  if (!(uncured1 > 0.0) || !(uncured2 > 0.0)) {
    throw std::domain_error(
        "population survival has reached its cure plateau; the susceptible "
        "hazard ratio is undefined this far out");
  }
  // The baseline hazard enters both hazards identically and cancels.
  return (x1 - x2).dot(params.beta) + (z1 - z2).dot(params.gamma) +
         (elin1 - elin2) * log_s0 - std::log(uncured1) + std::log(uncured2);
}

double population_survival(const ModelParams& params, const SplineBaseline& base,
                           const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                           double t) {
  return population_survival(params, SplineBaselineCurve(base, params.phi), x, z, t);
}

double population_hazard(const ModelParams& params, const SplineBaseline& base,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                         double t) {
  return population_hazard(params, SplineBaselineCurve(base, params.phi), x, z, t);
}

double susceptible_survival(const ModelParams& params, const SplineBaseline& base,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                            double t) {
  return susceptible_survival(params, SplineBaselineCurve(base, params.phi), x, z, t);
}

double susceptible_hazard(const ModelParams& params, const SplineBaseline& base,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                          double t) {
  return susceptible_hazard(params, SplineBaselineCurve(base, params.phi), x, z, t);
}

double log_hazard_ratio_population(const ModelParams& params, const SplineBaseline& base,
                                   const Eigen::VectorXd& x1, const Eigen::VectorXd& z1,
                                   const Eigen::VectorXd& x2, const Eigen::VectorXd& z2,
                                   double t, bool* boundary_flag) {
  return log_hazard_ratio_population(params, SplineBaselineCurve(base, params.phi),
                                     x1, z1, x2, z2, t, boundary_flag);
}

double log_hazard_ratio_susceptible(const ModelParams& params, const SplineBaseline& base,
                                    const Eigen::VectorXd& x1, const Eigen::VectorXd& z1,
                                    const Eigen::VectorXd& x2, const Eigen::VectorXd& z2,
                                    double t) {
  return log_hazard_ratio_susceptible(params, SplineBaselineCurve(base, params.phi),
                                      x1, z1, x2, z2, t);
}

}  // namespace ptcure
