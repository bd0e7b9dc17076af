#pragma once

#include <Eigen/Dense>
#include <memory>

#include "ptcure/bspline.hpp"
#include "ptcure/weibull.hpp"

namespace ptcure {

// Last spline coefficient pinned to this value so the baseline hazard
// stays large past the follow-up window and the baseline survival is
// driven to zero there.
inline constexpr double kDefaultFixedPhi = 10.0;

// Floor applied to log baseline survival before it enters any formula.
inline constexpr double kLogSurvivalFloor = -700.0;

// State of the model: spline coefficients for the baseline log-hazard,
// intercept and slopes of the cure part, slopes of the latency part.
// phi[K-1] is pinned (see kDefaultFixedPhi) and never sampled.
struct ModelParams {
  Eigen::VectorXd phi;     // K
  double beta0 = 0.0;
  Eigen::VectorXd beta;    // p
  Eigen::VectorXd gamma;   // q
};

// Roughness penalty state and its hyperprior constants.  tau and delta are
// sampled; nu, a_delta, b_delta stay fixed.  Gamma distributions are in
// shape/rate form throughout.
struct PenaltyHypers {
  double tau = 1.0;
  double delta = 1.0;
  double nu = 2.0;
  double a_delta = 1e-4;
  double b_delta = 1e-4;
};

// Equal-width rectangle rule on (0, upper] used for the cumulative baseline
// hazard.  Bin j (1-based) covers (boundaries[j-1], boundaries[j]].
struct QuadratureGrid {
  int bins = 0;
  double width = 0.0;
  double upper = 0.0;
  Eigen::VectorXd midpoints;          // bins
  Eigen::MatrixXd basis_at_midpoints; // bins x K

  // Index of the bin whose full width is charged for a time t in (0, upper].
  // Throws std::out_of_range outside that interval.
  int bin_of(double t) const;
};

// Spline baseline bound to its knot layout and integration grid.
struct SplineBaseline {
  KnotGrid knots;
  QuadratureGrid quad;
};

SplineBaseline make_spline_baseline(double t_rcens, int num_basis = 12,
                                    int quadrature_bins = 300);

// Per-bin baseline quantities for one phi.  cum_hazard has bins + 1 entries
// with cum_hazard[0] = 0; log survival at a time inside bin j charges the
// full widths of bins 1..j.
struct BaselineTable {
  Eigen::VectorXd log_hazard_mid;  // bins
  Eigen::VectorXd cum_hazard;      // bins + 1

  double log_survival_at_bin(int bin) const;
};

BaselineTable build_baseline_table(const SplineBaseline& base,
                                   const Eigen::VectorXd& phi);

// Baseline hazard at t from the exact basis expansion (not binned).
double baseline_hazard(const ModelParams& params, const SplineBaseline& base,
                       double t);

// Baseline survival at t from the binned cumulative hazard.
double baseline_survival(const ModelParams& params, const SplineBaseline& base,
                         double t);
double baseline_survival(const BaselineTable& table, const SplineBaseline& base,
                         double t);

// A baseline distribution reduced to the two ingredients the promotion
// formulas need at one time point.  Implementations exist for the spline
// baseline and for closed-form distributions, so every formula downstream
// can be exercised against exact references.
struct BaselinePoint {
  double hazard = 0.0;
  double log_survival = 0.0;
};

class BaselineCurve {
 public:
  virtual ~BaselineCurve() = default;
  virtual BaselinePoint at(double t) const = 0;
};

// Spline baseline with a cached bin table; valid for one phi.
class SplineBaselineCurve final : public BaselineCurve {
 public:
  SplineBaselineCurve(const SplineBaseline& base, const Eigen::VectorXd& phi);
  BaselinePoint at(double t) const override;

 private:
  const SplineBaseline* base_;
  Eigen::VectorXd phi_;
  BaselineTable table_;
};

class WeibullBaselineCurve final : public BaselineCurve {
 public:
  explicit WeibullBaselineCurve(const WeibullDist& dist) : dist_(dist) {}
  BaselinePoint at(double t) const override;

 private:
  WeibullDist dist_;
};

// Mean of the Poisson activation count given covariates x; exp(-theta) is
// the cure probability.
double theta_mean(const ModelParams& params, const Eigen::VectorXd& x);

// Promotion time quantities for one covariate profile.  The (params, base)
// overloads rebuild the bin table per call and suit one-off evaluations;
// hot paths hold a BaselineCurve or work on cached tables directly.
double population_survival(const ModelParams& params, const BaselineCurve& baseline,
                           const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                           double t);
double population_hazard(const ModelParams& params, const BaselineCurve& baseline,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                         double t);

// Survival and hazard conditional on being susceptible.  Throw
// std::domain_error when theta is numerically zero or the conditioning
// probability underflows (deep plateau).
double susceptible_survival(const ModelParams& params, const BaselineCurve& baseline,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                            double t);
double susceptible_hazard(const ModelParams& params, const BaselineCurve& baseline,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                          double t);

// Log hazard ratios between two covariate profiles.  If boundary_flag is
// non-null it is set when the log baseline survival hit its floor, which
// happens only in the far right tail of the follow-up window.
double log_hazard_ratio_population(const ModelParams& params,
                                   const BaselineCurve& baseline,
                                   const Eigen::VectorXd& x1, const Eigen::VectorXd& z1,
                                   const Eigen::VectorXd& x2, const Eigen::VectorXd& z2,
                                   double t, bool* boundary_flag = nullptr);
double log_hazard_ratio_susceptible(const ModelParams& params,
                                    const BaselineCurve& baseline,
                                    const Eigen::VectorXd& x1, const Eigen::VectorXd& z1,
                                    const Eigen::VectorXd& x2, const Eigen::VectorXd& z2,
                                    double t);

// Convenience overloads on the spline baseline.
double population_survival(const ModelParams& params, const SplineBaseline& base,
                           const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                           double t);
double population_hazard(const ModelParams& params, const SplineBaseline& base,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                         double t);
double susceptible_survival(const ModelParams& params, const SplineBaseline& base,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                            double t);
double susceptible_hazard(const ModelParams& params, const SplineBaseline& base,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                          double t);
double log_hazard_ratio_population(const ModelParams& params, const SplineBaseline& base,
                                   const Eigen::VectorXd& x1, const Eigen::VectorXd& z1,
                                   const Eigen::VectorXd& x2, const Eigen::VectorXd& z2,
                                   double t, bool* boundary_flag = nullptr);
double log_hazard_ratio_susceptible(const ModelParams& params, const SplineBaseline& base,
                                    const Eigen::VectorXd& x1, const Eigen::VectorXd& z1,
                                    const Eigen::VectorXd& x2, const Eigen::VectorXd& z2,
                                    double t);

namespace promotion {

// Scalar promotion formulas shared by every overload above.  theta is the
// activation mean, elin = exp(z'gamma), log_s0 = log baseline survival.

// log of the population survival exp(-theta * (1 - S0(t)^elin)).
double log_population_survival(double theta, double elin, double log_s0);

// log of the population hazard theta * elin * h0(t) * S0(t)^elin.
double log_population_hazard(double theta, double elin, double hazard0,
                             double log_s0);

// P(uncured | alive at t) = 1 - exp(-theta) / Sp(t); the denominator of the
// susceptible hazard.  Returns a value in [0, 1).
double uncured_given_alive(double theta, double elin, double log_s0);

double susceptible_survival(double theta, double elin, double log_s0);

}  // namespace promotion

}  // namespace ptcure
