#ifndef TFE_STATS_HPP
#define TFE_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace tfe {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF for p in (0, 1): Acklam's rational
/// approximation polished by one Halley step against normal_cdf.
double normal_quantile(double p);

struct KsResult {
  double distance = 0.0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::size_t n = 0;
};

/// Kolmogorov-Smirnov distance of the sample against N(0, 1), with the
/// sample mean and variance. Throws on an empty sample.
KsResult ks_distance(std::span<const double> sample);

/// Critical value c(alpha) / sqrt(n) of the one-sample KS test; c(0.01) =
/// 1.628, c(0.05) = 1.358, c(0.10) = 1.224.
double ks_critical(double alpha, std::size_t n);

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
double median(std::vector<double> x);
/// Median absolute deviation about the median (unscaled).
double mad(std::vector<double> x);

struct JackknifeVariance {
  double variance = 0.0;  // unbiased sample variance
  double standard_error = 0.0;
};

/// Sample variance with its leave-one-out jackknife standard error.
JackknifeVariance jackknife_variance(std::span<const double> x);

}  // namespace tfe

#endif  // TFE_STATS_HPP
