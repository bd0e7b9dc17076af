#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace ptcure {

// Right-censored survival data with two covariate blocks: x drives the
// cure probability (intercept kept separate), z drives the latency
// distribution and must not contain an intercept column.
struct SurvivalDataset {
  Eigen::VectorXd times;    // n, strictly positive
  Eigen::VectorXd events;   // n, 1 = failure observed, 0 = right-censored
  Eigen::MatrixXd x;        // n x p
  Eigen::MatrixXd z;        // n x q
  std::vector<std::string> x_names;
  std::vector<std::string> z_names;

  Eigen::Index n() const { return times.size(); }
  Eigen::Index p() const { return x.cols(); }
  Eigen::Index q() const { return z.cols(); }
};

// Checks positivity of times (and <= t_rcens when t_rcens > 0), 0/1 events,
// matching dimensions, and that X'X and Z'Z are full rank.  Throws
// std::invalid_argument naming the offending column or subject.
void validate_dataset(const SurvivalDataset& data, double t_rcens = 0.0);

// Largest observed time; the default upper bound of follow up when no
// explicit value is configured.
double max_time(const SurvivalDataset& data);

}  // namespace ptcure
