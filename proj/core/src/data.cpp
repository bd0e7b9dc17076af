#include "ptcure/data.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ptcure {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

// Rank of the design via column-pivoted QR; the default threshold scales
// with the matrix norm, which is what we want for near-duplicate columns.
bool full_column_rank(const Eigen::MatrixXd& design) {
  if (design.cols() == 0) return true;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  return qr.rank() == design.cols();
}

}  // namespace

void validate_dataset(const SurvivalDataset& data, double t_rcens) {
  const Eigen::Index n = data.n();
  require(n > 0, "dataset is empty");
  require(data.events.size() == n, "times and events have different lengths");
  require(data.x.rows() == n, "cure covariate block has wrong row count");
  require(data.z.rows() == n, "latency covariate block has wrong row count");
  require(static_cast<Eigen::Index>(data.x_names.size()) == data.p(),
          "cure covariate names do not match column count");
  require(static_cast<Eigen::Index>(data.z_names.size()) == data.q(),
          "latency covariate names do not match column count");

  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = data.times[i];
    if (!(std::isfinite(t) && t > 0.0)) {
      std::ostringstream msg;
      msg << "subject " << i + 1 << ": time must be finite and positive, got " << t;
      throw std::invalid_argument(msg.str());
    }
    if (t_rcens > 0.0 && t > t_rcens) {
      std::ostringstream msg;
      msg << "subject " << i + 1 << ": time " << t
          << " exceeds the follow-up bound " << t_rcens;
      throw std::invalid_argument(msg.str());
    }
    const double ev = data.events[i];
    if (ev != 0.0 && ev != 1.0) {
      std::ostringstream msg;
      msg << "subject " << i + 1 << ": event indicator must be 0 or 1, got " << ev;
      throw std::invalid_argument(msg.str());
    }
  }
  require(data.x.allFinite(), "cure covariates contain non-finite values");
  require(data.z.allFinite(), "latency covariates contain non-finite values");

  // The cure linear predictor carries an intercept, so collinearity is
  // checked on the intercept-augmented block.
  Eigen::MatrixXd cure_design(n, data.p() + 1);
  cure_design.col(0).setOnes();
  cure_design.rightCols(data.p()) = data.x;
  require(full_column_rank(cure_design),
          "cure design (intercept plus x columns) is rank deficient");
  require(full_column_rank(data.z), "latency design (z columns) is rank deficient");
}

double max_time(const SurvivalDataset& data) {
  if (data.n() == 0) throw std::invalid_argument("dataset is empty");
  return data.times.maxCoeff();
}

}  // namespace ptcure
