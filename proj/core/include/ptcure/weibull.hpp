#pragma once

namespace ptcure {

// Weibull(shape k, scale lambda): S(t) = exp(-(t/lambda)^k).
struct WeibullDist {
  double shape = 1.0;
  double scale = 1.0;

  double cdf(double t) const;
  double survival(double t) const;
  double hazard(double t) const;
  double density(double t) const;
  double cumulative_hazard(double t) const;
  // Quantile of the CDF, F^{-1}(p) for p in [0, 1).
  double quantile(double p) const;

  double mean() const;
  double sd() const;
};

// Solve the two moment equations
//   mean = scale * Gamma(1 + 1/shape)
//   var  = scale^2 * (Gamma(1 + 2/shape) - Gamma(1 + 1/shape)^2)
// by bracketed bisection on the coefficient of variation, which is a
// strictly decreasing function of the shape.  Residual below 1e-10.
WeibullDist weibull_from_moments(double mean, double sd);

}  // namespace ptcure
