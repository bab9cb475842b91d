#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "tfe/random.hpp"
#include "tfe/stats.hpp"

using namespace tfe;

TEST_CASE("normal cdf and quantile") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
  CHECK(normal_cdf(-40.0) >= 0.0);
  CHECK(normal_cdf(-10.0) == doctest::Approx(7.619853024160527e-24).epsilon(1e-12));
  CHECK(normal_quantile(0.5) == 0.0);
  for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.77, 0.999, 1 - 1e-9}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS(normal_quantile(0.0));
  CHECK_THROWS(normal_quantile(1.0));
}

TEST_CASE("ks distance") {
  SUBCASE("exact quantiles are nearly perfect") {
    const std::size_t n = 1000;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = normal_quantile((double(i) + 0.5) / double(n));
    const KsResult r = ks_distance(x);
    CHECK(r.distance < 1e-3);
    CHECK(r.distance == doctest::Approx(0.5 / double(n)).epsilon(1e-9));
    CHECK(std::fabs(r.mean) < 1e-12);
    CHECK(r.n == n);
  }
  SUBCASE("a point mass at zero") {
    const std::vector<double> x(100, 0.0);
    CHECK(ks_distance(x).distance == doctest::Approx(0.5));
  }
  SUBCASE("order does not matter") {
    std::vector<double> x = {0.3, -1.2, 2.0, 0.0, -0.4};
    const double d = ks_distance(x).distance;
    std::reverse(x.begin(), x.end());
    CHECK(ks_distance(x).distance == d);
  }
  SUBCASE("empty") { CHECK_THROWS(ks_distance(std::vector<double>{})); }
  SUBCASE("normal samples pass at alpha = 0.01 most of the time") {
    int pass = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
      NormalStream rng(derive_seed(99, s, 1));
      std::vector<double> x(500);
      for (double& v : x) v = rng();
      pass += ks_distance(x).distance < ks_critical(0.01, x.size());
    }
    CHECK(pass >= 47);
  }
}

TEST_CASE("ks critical values") {
  CHECK(ks_critical(0.01, 500) == doctest::Approx(1.628 / std::sqrt(500.0)).epsilon(1e-12));
  CHECK(ks_critical(0.05, 100) == doctest::Approx(0.1358).epsilon(1e-12));
  CHECK(ks_critical(0.10, 1) == doctest::Approx(1.224).epsilon(1e-12));
  CHECK_THROWS(ks_critical(0.01, 0));
}

TEST_CASE("moments and robust summaries") {
  const std::vector<double> x = {3.0, 1.0, 4.0, 1.0, 5.0, 9.0};
  CHECK(mean(x) == doctest::Approx(23.0 / 6.0));
  double ss = 0.0;
  for (double v : x) ss += (v - 23.0 / 6.0) * (v - 23.0 / 6.0);
  CHECK(variance(x) == doctest::Approx(ss / 5.0));
  CHECK(median(x) == 3.5);
  CHECK(median({2.0, 7.0, -1.0}) == 2.0);
  // |x - 3.5| = 0.5 2.5 0.5 2.5 1.5 5.5
  CHECK(mad(x) == 2.0);
  CHECK_THROWS(median({}));
  CHECK(variance(std::vector<double>{1.0}) == 0.0);
}

TEST_CASE("jackknife variance matches brute-force leave-one-out") {
  NormalStream rng(5);
  std::vector<double> x(40);
  for (double& v : x) v = 1.5 * rng() + 0.3 * rng() * rng();
  const JackknifeVariance j = jackknife_variance(x);
  CHECK(j.variance == doctest::Approx(variance(x)).epsilon(1e-13));

  const std::size_t n = x.size();
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> y = x;
    y.erase(y.begin() + static_cast<std::ptrdiff_t>(i));
    loo[i] = variance(y);
  }
  const double m = mean(loo);
  double s = 0.0;
  for (double v : loo) s += (v - m) * (v - m);
  const double se = std::sqrt(double(n - 1) / double(n) * s);
  CHECK(j.standard_error == doctest::Approx(se).epsilon(1e-10));
}

TEST_CASE("derive_seed") {
  CHECK(derive_seed(7, 3, 11) == derive_seed(7, 3, 11));
  CHECK(derive_seed(7, 0, 1) != derive_seed(7, 1, 0));
  CHECK(derive_seed(7, 0, 1) != derive_seed(8, 0, 1));
  CHECK(derive_seed(0, 0, 0) != 0);
  CHECK_NOTHROW(derive_seed(0, 0xffffffffULL, 0xffffffffULL));
  CHECK_THROWS_AS(derive_seed(0, 1ULL << 32, 1), std::out_of_range);
  CHECK_THROWS_AS(derive_seed(0, 1, 1ULL << 32), std::out_of_range);

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1'100'000);
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    for (std::uint64_t k = 1; k <= 1000; ++k) seen.insert(derive_seed(2024, rep, k));
  }
  CHECK(seen.size() == 1'000'000);
}

TEST_CASE("normal stream") {
  NormalStream a(123), b(123);
  for (int i = 0; i < 1000; ++i) CHECK(a() == b());
  NormalStream r(31337);
  const std::size_t n = 200000;
  std::vector<double> x(n);
  for (double& v : x) v = r();
  CHECK(std::fabs(mean(x)) < 4.0 / std::sqrt(double(n)));
  CHECK(std::fabs(variance(x) - 1.0) < 4.0 * std::sqrt(2.0 / double(n)));
  CHECK(ks_distance(x).distance < ks_critical(0.01, n));
}
