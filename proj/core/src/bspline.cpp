#include "ptcure/bspline.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ptcure {

namespace {

// Cardinal cubic B-spline with knots 0..4, nonzero on (0, 4).
double cardinal_cubic(double u) {
  if (u <= 0.0 || u >= 4.0) {
    // Exact zero at the support boundary: the cubic pieces vanish there.
    return 0.0;
  }
  if (u < 1.0) {
    return u * u * u / 6.0;
  }
  if (u < 2.0) {
    const double v = u - 1.0;
    return (1.0 + 3.0 * v + 3.0 * v * v - 3.0 * v * v * v) / 6.0;
  }
  if (u < 3.0) {
    const double v = u - 2.0;
    return (4.0 - 6.0 * v * v + 3.0 * v * v * v) / 6.0;
  }
  const double v = 1.0 - (u - 3.0);
  return v * v * v / 6.0;
}

}  // namespace

KnotGrid build_knot_grid(double lower, double upper, int num_basis) {
  if (!(upper > lower)) {
    throw std::invalid_argument("build_knot_grid: interval length must be positive");
  }
  if (num_basis < 4) {
    throw std::invalid_argument("build_knot_grid: cubic basis needs num_basis >= 4");
  }
  KnotGrid grid;
  grid.lower = lower;
  grid.upper = upper;
  grid.num_basis = num_basis;
  grid.spacing = (upper - lower) / static_cast<double>(num_basis - 3);
  grid.knots.resize(num_basis + 4);
  for (int i = 0; i < num_basis + 4; ++i) {
    grid.knots[i] = lower + (i - 3) * grid.spacing;
  }
  return grid;
}

Eigen::VectorXd eval_basis(const KnotGrid& grid, double t) {
  if (t < grid.lower || t > grid.upper) {
    throw std::out_of_range("eval_basis: t = " + std::to_string(t) +
                            " outside [" + std::to_string(grid.lower) + ", " +
                            std::to_string(grid.upper) + "]");
  }
  const int K = grid.num_basis;
  const double s = (t - grid.lower) / grid.spacing;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(K);
  // Basis k is the cardinal spline shifted to start at knot k - 3.
  for (int k = 0; k < K; ++k) {
    const double u = s + 3.0 - k;
    if (u > 0.0 && u < 4.0) b[k] = cardinal_cubic(u);
  }
  return b;
}

Eigen::MatrixXd difference_matrix(int num_basis, int order) {
  if (order < 1 || order > 3) {
    throw std::invalid_argument("difference_matrix: order must be in {1, 2, 3}");
  }
  if (num_basis <= order) {
    throw std::invalid_argument("difference_matrix: need num_basis > order");
  }
  // Alternating binomial coefficients, e.g. (1, -3, 3, -1) for order 3.
  Eigen::VectorXd coef(order + 1);
  double binom = 1.0;
  for (int j = 0; j <= order; ++j) {
    coef[j] = (j % 2 == 0) ? binom : -binom;
    binom = binom * (order - j) / (j + 1.0);
  }
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(num_basis - order, num_basis);
  for (int i = 0; i < num_basis - order; ++i) {
    for (int j = 0; j <= order; ++j) D(i, i + j) = coef[j];
  }
  return D;
}

PenaltyMatrix penalty_from_difference(const Eigen::MatrixXd& D, double ridge) {
  if (!(ridge > 0.0)) {
    throw std::invalid_argument("penalty_from_difference: ridge must be > 0");
  }
  PenaltyMatrix pen;
  pen.order = static_cast<int>(D.cols() - D.rows());
  pen.ridge = ridge;
  pen.D = D;
  pen.P = D.transpose() * D;
  pen.P.diagonal().array() += ridge;
  // Force exact symmetry against accumulation order differences.
  pen.P = ((pen.P + pen.P.transpose()) / 2.0).eval();
  return pen;
}

}  // namespace ptcure
