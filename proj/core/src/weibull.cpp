#include "ptcure/weibull.hpp"

#include <cmath>
#include <stdexcept>

namespace ptcure {

double WeibullDist::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  return -std::expm1(-std::pow(t / scale, shape));
}

double WeibullDist::survival(double t) const {
  if (t <= 0.0) return 1.0;
  return std::exp(-std::pow(t / scale, shape));
}

double WeibullDist::hazard(double t) const {
  return shape / scale * std::pow(t / scale, shape - 1.0);
}

double WeibullDist::density(double t) const {
  return hazard(t) * survival(t);
}

double WeibullDist::cumulative_hazard(double t) const {
  if (t <= 0.0) return 0.0;
  return std::pow(t / scale, shape);
}

double WeibullDist::quantile(double p) const {
  if (p < 0.0 || p >= 1.0) {
    throw std::domain_error("WeibullDist::quantile: p must be in [0, 1)");
  }
  return scale * std::pow(-std::log1p(-p), 1.0 / shape);
}

double WeibullDist::mean() const {
  return scale * std::tgamma(1.0 + 1.0 / shape);
}

double WeibullDist::sd() const {
  const double g1 = std::tgamma(1.0 + 1.0 / shape);
  const double g2 = std::tgamma(1.0 + 2.0 / shape);
  return scale * std::sqrt(g2 - g1 * g1);
}

namespace {

// log of Gamma(1 + 2/k) / Gamma(1 + 1/k)^2, equals log(1 + cv^2).
double log_moment_ratio(double k) {
  return std::lgamma(1.0 + 2.0 / k) - 2.0 * std::lgamma(1.0 + 1.0 / k);
}

}  // namespace

WeibullDist weibull_from_moments(double mean, double sd) {
  if (!(mean > 0.0) || !(sd > 0.0)) {
    throw std::invalid_argument("weibull_from_moments: mean and sd must be > 0");
  }
  const double target = std::log1p((sd / mean) * (sd / mean));
  double lo = 1e-2, hi = 1e3;
  // log_moment_ratio is strictly decreasing in k.
  if (log_moment_ratio(lo) < target || log_moment_ratio(hi) > target) {
    throw std::domain_error("weibull_from_moments: coefficient of variation out of range");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_moment_ratio(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-14 * hi) break;
  }
  WeibullDist w;
  w.shape = 0.5 * (lo + hi);
  w.scale = mean / std::tgamma(1.0 + 1.0 / w.shape);
  return w;
}

}  // namespace ptcure
