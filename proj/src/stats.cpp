#include "tfe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tfe/summation.hpp"

namespace tfe {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean: empty sample");
  CompensatedSum s;
  for (double v : x) s += v;
  return s.value() / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  CompensatedSum s;
  for (double v : x) s += (v - m) * (v - m);
  return s.value() / static_cast<double>(x.size() - 1);
}

double median(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median: empty sample");
  const std::size_t n = x.size();
  std::sort(x.begin(), x.end());
  return (n % 2) ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double mad(std::vector<double> x) {
  const double m = median(x);
  for (double& v : x) v = std::fabs(v - m);
  return median(std::move(x));
}

KsResult ks_distance(std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = normal_cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  KsResult r;
  r.distance = d;
  r.n = x.size();
  r.mean = mean(sample);
  r.variance = variance(sample);
  return r;
}

double ks_critical(double alpha, std::size_t n) {
  if (n == 0) throw std::invalid_argument("ks_critical: n must be positive");
  double c;
  if (alpha == 0.01) c = 1.628;
  else if (alpha == 0.05) c = 1.358;
  else if (alpha == 0.10) c = 1.224;
  else c = std::sqrt(-0.5 * std::log(alpha / 2.0));  // asymptotic Kolmogorov tail
  return c / std::sqrt(static_cast<double>(n));
}

JackknifeVariance jackknife_variance(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("jackknife_variance: need at least 3 values");
  const double m = mean(x);
  // Centered sums; leave-one-out variance in closed form.
  CompensatedSum s1, s2;
  for (double v : x) {
    const double c = v - m;
    s1 += c;
    s2 += c * c;
  }
  const double S1 = s1.value();
  const double S2 = s2.value();
  const double nd = static_cast<double>(n);
  std::vector<double> loo(n);
  CompensatedSum lsum;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = x[i] - m;
    const double a1 = S1 - c;
    const double a2 = S2 - c * c;
    loo[i] = (a2 - a1 * a1 / (nd - 1.0)) / (nd - 2.0);
    lsum += loo[i];
  }
  const double lmean = lsum.value() / nd;
  CompensatedSum dev;
  for (double v : loo) dev += (v - lmean) * (v - lmean);
  JackknifeVariance r;
  r.variance = (S2 - S1 * S1 / nd) / (nd - 1.0);
  r.standard_error = std::sqrt((nd - 1.0) / nd * dev.value());
  return r;
}

}  // namespace tfe
