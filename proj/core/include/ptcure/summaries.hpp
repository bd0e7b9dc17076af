#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ptcure/mcmc.hpp"
#include "ptcure/model.hpp"

namespace ptcure {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Shortest interval containing ceil(level * m) of the m draws; ties go to
// the leftmost window.
Interval hpd_interval(std::vector<double> draws, double level = 0.95);

// Order-statistic quantile with linear interpolation.
double sample_quantile(std::vector<double> draws, double prob);

// Mean difference between an early and a late stretch of the chain, scaled
// by batch-means standard errors.  Near zero for a stationary chain.
double geweke_z(const Eigen::VectorXd& draws, double first_fraction = 0.10,
                double last_fraction = 0.50, int batches = 20);

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double lower = 0.0;   // HPD bounds at the requested level
  double upper = 0.0;
};

struct SummaryResult {
  double level = 0.95;
  std::vector<ParamSummary> parameters;
};

SummaryResult summarize_chain(const ChainOutput& chain, double level = 0.95);

struct GewekeRow {
  std::string name;
  double z = 0.0;
};

std::vector<GewekeRow> geweke_table(const ChainOutput& chain);

// Posterior curve machinery.  A profile fixes one covariate configuration;
// ratio curves compare profile against reference.
struct CovariateProfile {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
};

enum class CurveKind {
  BaselineSurvival,
  PopulationSurvival,
  SusceptibleSurvival,
  LogHazardRatioPopulation,
  LogHazardRatioSusceptible,
};

// Pointwise median and central credible band over the kept draws.  Points
// where fewer than half of the draws yield a defined value (deep in the
// cure plateau) are trimmed off the right end of the grid.
struct CurveBand {
  CurveKind kind = CurveKind::BaselineSurvival;
  Eigen::VectorXd grid;
  Eigen::VectorXd median;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

CurveBand curve_band(const ChainOutput& chain, const SplineBaseline& base,
                     CurveKind kind, const CovariateProfile& profile,
                     const CovariateProfile& reference, int grid_points = 200,
                     int thin = 1, double level = 0.95);

}  // namespace ptcure
