#pragma once

#include <Eigen/Dense>

namespace ptcure {

// Cubic B-spline basis on equidistant knots spanning [lower, upper].
//
// The interior grid has num_basis - 3 intervals and is extended by three
// exterior knots on each side with the same spacing, so every basis function
// is a translate of the cardinal cubic B-spline.  Evaluation at a knot uses
// the interval to its right, except t == upper which uses the last interval.
struct KnotGrid {
  double lower = 0.0;
  double upper = 0.0;
  int num_basis = 0;       // K
  double spacing = 0.0;    // (upper - lower) / (K - 3)
  Eigen::VectorXd knots;   // K + 4 knots, from lower - 3h to upper + 3h
};

KnotGrid build_knot_grid(double lower, double upper, int num_basis);

// (b_1(t), ..., b_K(t)).  Throws std::out_of_range outside [lower, upper].
// At most 4 entries are nonzero and they sum to 1.
Eigen::VectorXd eval_basis(const KnotGrid& grid, double t);

// r-th order forward finite-difference matrix, (K - r) x K.  Row i carries
// the alternating binomial pattern starting at column i, e.g. (1, -3, 3, -1)
// for r = 3.  order must be in {1, 2, 3} and < num_basis.
Eigen::MatrixXd difference_matrix(int num_basis, int order);

// Roughness penalty P = D'D + ridge * I.  P is symmetric positive definite
// for any ridge > 0 since D'D is positive semi-definite.
struct PenaltyMatrix {
  int order = 0;
  Eigen::MatrixXd D;
  Eigen::MatrixXd P;
  double ridge = 0.0;
};

inline constexpr double kDefaultRidge = 1e-6;

PenaltyMatrix penalty_from_difference(const Eigen::MatrixXd& D, double ridge);

}  // namespace ptcure
