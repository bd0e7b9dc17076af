#include "ptcure/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ptcure {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double quantile_of_sorted(const std::vector<double>& sorted, double prob) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = prob * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Variance of a segment mean from near-equal batches; falls back to the
// iid estimate when the segment cannot hold two batches.
double batch_means_variance(const Eigen::VectorXd& segment, int batches) {
  const Eigen::Index len = segment.size();
  const int usable = static_cast<int>(
      std::min<Eigen::Index>(batches, len));
  if (usable < 2) {
    if (len < 2) return 0.0;
    const double mean = segment.mean();
    const double ss = (segment.array() - mean).square().sum();
    return ss / static_cast<double>(len - 1) / static_cast<double>(len);
  }
  Eigen::VectorXd means(usable);
  for (int b = 0; b < usable; ++b) {
    const Eigen::Index begin = len * b / usable;
    const Eigen::Index end = len * (b + 1) / usable;
    means[b] = segment.segment(begin, end - begin).mean();
  }
  const double center = means.mean();
  const double ss = (means.array() - center).square().sum();
  return ss / static_cast<double>(usable - 1) / static_cast<double>(usable);
}

}  // namespace

Interval hpd_interval(std::vector<double> draws, double level) {
  if (draws.empty()) throw std::invalid_argument("no draws to summarize");
  if (!(level > 0.0 && level <= 1.0)) {
    throw std::invalid_argument("interval level must lie in (0, 1]");
  }
  std::sort(draws.begin(), draws.end());
  const std::size_t m = draws.size();
  const std::size_t want = std::min<std::size_t>(
      m, static_cast<std::size_t>(
             std::ceil(level * static_cast<double>(m))));
  const std::size_t window = std::max<std::size_t>(want, 1);

  std::size_t best = 0;
  double best_width = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + window <= m; ++i) {
    const double width = draws[i + window - 1] - draws[i];
    if (width < best_width) {
      best_width = width;
      best = i;
    }
  }
  return {draws[best], draws[best + window - 1]};
}

double sample_quantile(std::vector<double> draws, double prob) {
  if (draws.empty()) throw std::invalid_argument("no draws to summarize");
  prob = std::clamp(prob, 0.0, 1.0);
  std::sort(draws.begin(), draws.end());
  return quantile_of_sorted(draws, prob);
}

double geweke_z(const Eigen::VectorXd& draws, double first_fraction,
                double last_fraction, int batches) {
  const Eigen::Index m = draws.size();
  if (m < 10) throw std::invalid_argument("chain too short for a Geweke score");
  if (!(first_fraction > 0.0 && last_fraction > 0.0 &&
        first_fraction + last_fraction <= 1.0)) {
    throw std::invalid_argument("window fractions must be positive and "
                                "sum to at most 1");
  }
  const Eigen::Index len_a =
      std::max<Eigen::Index>(1, static_cast<Eigen::Index>(first_fraction * m));
  const Eigen::Index len_b =
      std::max<Eigen::Index>(1, static_cast<Eigen::Index>(last_fraction * m));
  const Eigen::VectorXd head = draws.head(len_a);
  const Eigen::VectorXd tail = draws.tail(len_b);
  const double diff = head.mean() - tail.mean();
  const double var =
      batch_means_variance(head, batches) + batch_means_variance(tail, batches);
  if (var <= 0.0) {
    return diff == 0.0 ? 0.0
                       : std::copysign(
                             std::numeric_limits<double>::infinity(), diff);
  }
  return diff / std::sqrt(var);
}

SummaryResult summarize_chain(const ChainOutput& chain, double level) {
  SummaryResult result;
  result.level = level;
  const Eigen::Index m = chain.kept();
  if (m == 0) throw std::invalid_argument("chain holds no draws");
  result.parameters.reserve(chain.names.size());
  for (Eigen::Index j = 0; j < chain.columns(); ++j) {
    std::vector<double> column(chain.draws.col(j).data(),
                               chain.draws.col(j).data() + m);
    ParamSummary row;
    row.name = chain.names[j];
    row.mean = chain.draws.col(j).mean();
    row.sd = m > 1 ? std::sqrt((chain.draws.col(j).array() - row.mean)
                                   .square()
                                   .sum() /
                               static_cast<double>(m - 1))
                   : 0.0;
    row.median = sample_quantile(column, 0.5);
    const Interval hpd = hpd_interval(std::move(column), level);
    row.lower = hpd.lower;
    row.upper = hpd.upper;
    result.parameters.push_back(std::move(row));
  }
  return result;
}

std::vector<GewekeRow> geweke_table(const ChainOutput& chain) {
  std::vector<GewekeRow> rows;
  rows.reserve(chain.names.size());
  for (Eigen::Index j = 0; j < chain.columns(); ++j) {
    rows.push_back({chain.names[j], geweke_z(chain.draws.col(j))});
  }
  return rows;
}

namespace {

void check_profile_sizes(const ChainOutput& chain, const CovariateProfile& prof,
                         const char* which) {
  if (prof.x.size() != chain.p || prof.z.size() != chain.q) {
    throw std::invalid_argument(std::string(which) +
                                " profile does not match the fitted model");
  }
}

}  // namespace

CurveBand curve_band(const ChainOutput& chain, const SplineBaseline& base,
                     CurveKind kind, const CovariateProfile& profile,
                     const CovariateProfile& reference, int grid_points,
                     int thin, double level) {
  if (grid_points < 2) throw std::invalid_argument("need at least two grid points");
  if (thin < 1) throw std::invalid_argument("thinning stride must be positive");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("band level must lie in (0, 1)");
  }
  const bool needs_profile = kind != CurveKind::BaselineSurvival;
  const bool needs_reference = kind == CurveKind::LogHazardRatioPopulation ||
                               kind == CurveKind::LogHazardRatioSusceptible;
  if (needs_profile) check_profile_sizes(chain, profile, "covariate");
  if (needs_reference) check_profile_sizes(chain, reference, "reference");

  CurveBand band;
  band.kind = kind;
  band.grid = Eigen::VectorXd::LinSpaced(grid_points, 0.0, base.quad.upper);

  std::vector<int> bin(grid_points, 0);
  for (int g = 1; g < grid_points; ++g) bin[g] = base.quad.bin_of(band.grid[g]);

  const Eigen::Index kept = chain.kept();
  const Eigen::Index used = (kept + thin - 1) / thin;
  if (used == 0) throw std::invalid_argument("chain holds no draws");

  Eigen::MatrixXd values(grid_points, used);
  values.setConstant(kNaN);

  for (Eigen::Index idx = 0; idx < used; ++idx) {
    const ModelParams params = chain.params_at(idx * thin);
    const BaselineTable table = build_baseline_table(base, params.phi);

    double theta1 = 0.0, elin1 = 1.0, theta2 = 0.0, elin2 = 1.0;
    if (needs_profile) {
      theta1 = theta_mean(params, profile.x);
      elin1 = std::exp(profile.z.dot(params.gamma));
    }
    if (needs_reference) {
      theta2 = theta_mean(params, reference.x);
      elin2 = std::exp(reference.z.dot(params.gamma));
    }

    for (int g = 0; g < grid_points; ++g) {
      const double log_s0 = g == 0 ? 0.0 : table.log_survival_at_bin(bin[g]);
      double value = kNaN;
      switch (kind) {
        case CurveKind::BaselineSurvival:
          value = std::exp(log_s0);
          break;
        case CurveKind::PopulationSurvival:
          value = std::exp(
              promotion::log_population_survival(theta1, elin1, log_s0));
          break;
        case CurveKind::SusceptibleSurvival:
          if (theta1 > 1e-12) {
            value = promotion::susceptible_survival(theta1, elin1, log_s0);
          }
          break;
        case CurveKind::LogHazardRatioPopulation:
          value = (profile.x - reference.x).dot(params.beta) +
                  (profile.z - reference.z).dot(params.gamma) +
                  (elin1 - elin2) * log_s0;
          break;
        case CurveKind::LogHazardRatioSusceptible: {
          const double uncured1 =
              promotion::uncured_given_alive(theta1, elin1, log_s0);
          const double uncured2 =
              promotion::uncured_given_alive(theta2, elin2, log_s0);
          if (uncured1 > 0.0 && uncured2 > 0.0) {
            value = (profile.x - reference.x).dot(params.beta) +
                    (profile.z - reference.z).dot(params.gamma) +
                    (elin1 - elin2) * log_s0 - std::log(uncured1) +
                    std::log(uncured2);
          }
          break;
        }
      }
      values(g, idx) = value;
    }
  }

  // Points are kept while at least half of the draws define the quantity;
  // the first failing point truncates the grid (plateau region).
  const double tail = 0.5 * (1.0 - level);
  int keep_points = 0;
  std::vector<double> defined;
  std::vector<double> medians, lowers, uppers;
  for (int g = 0; g < grid_points; ++g) {
    defined.clear();
    for (Eigen::Index idx = 0; idx < used; ++idx) {
      const double v = values(g, idx);
      if (std::isfinite(v)) defined.push_back(v);
    }
    if (defined.size() < std::max<std::size_t>(2, (used + 1) / 2)) break;
    std::sort(defined.begin(), defined.end());
    medians.push_back(quantile_of_sorted(defined, 0.5));
    lowers.push_back(quantile_of_sorted(defined, tail));
    uppers.push_back(quantile_of_sorted(defined, 1.0 - tail));
    ++keep_points;
  }
  if (keep_points == 0) {
    throw std::runtime_error("curve is undefined at every grid point");
  }

  band.grid.conservativeResize(keep_points);
  band.median = Eigen::Map<Eigen::VectorXd>(medians.data(), keep_points);
  band.lower = Eigen::Map<Eigen::VectorXd>(lowers.data(), keep_points);
  band.upper = Eigen::Map<Eigen::VectorXd>(uppers.data(), keep_points);
  return band;
}

}  // namespace ptcure
