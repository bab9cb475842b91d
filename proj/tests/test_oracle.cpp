#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "tfe/model.hpp"
#include "tfe/oracle.hpp"
#include "tfe/random.hpp"
#include "tfe/simulate.hpp"
#include "tfe/stats.hpp"

using namespace tfe;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_CASE("gaussian_even_moment") {
  const double var = (1.0 - std::exp(-2.0 * 1.5 * 0.7)) / (2.0 * 1.5);
  CHECK(gaussian_even_moment(1.5, 0.7, 1) == doctest::Approx(var).epsilon(1e-15));
  CHECK(gaussian_even_moment(3.0, 1e3, 2) == doctest::Approx(3.0 / (4.0 * 9.0)).epsilon(1e-15));
  CHECK(gaussian_even_moment(2.0, 0.0, 3) == 0.0);
  CHECK(gaussian_even_moment(1.0, 1.0, 4) ==
        doctest::Approx(105.0 * std::pow((1 - std::exp(-2.0)) / 2.0, 4)).epsilon(1e-14));
}

TEST_CASE("exact_E_xi_u2") {
  CHECK(exact_E_xi_u2(1.0, 0.0) == 0.0);
  const double mu = 40.0, t = 3.0;
  const double tail = t / (4 * mu * mu) + 1.0 / (8 * mu * mu * mu);
  CHECK(rel(exact_E_xi_u2(mu, t), tail) < 1e-12);
  const MomentTable tab = moment_ode(1.0, 1.0, 0.0, 1, 2, 1.0, 4);
  CHECK(rel(tab.at(tab.t.size() - 1, 1, 2), exact_E_xi_u2(1.0, 1.0)) < 1e-10);
}

TEST_CASE("exact_E_Z") {
  CHECK(exact_E_Z(1.0, 1.0) == doctest::Approx(0.03960).epsilon(1e-4));
  CHECK(exact_E_Z(1.0, 1e-3) < 1e-12);
  CHECK(exact_E_Z(1.0, 1e-3) >= 0.0);
  for (double mu : {1e3, 1e4}) {
    const double T = 1.0;
    // mu^2 E Z -> T^3/12, with relative correction O(1 / (mu T)).
    CHECK(std::fabs(exact_E_Z(mu, T) * mu * mu * 12.0 / (T * T * T) - 1.0) < 5.0 / (mu * T));
  }
}

TEST_CASE("exact_E_Z against Monte Carlo") {
  const SpdeModel m([](std::size_t) { return 1.0; }, [](std::size_t) { return 0.0; }, 0.0, 1.0,
                    1.0, 1.0, {}, {});
  const std::size_t M = 20000;
  std::vector<double> z(M);
  for (std::size_t r = 0; r < M; ++r) {
    NormalStream rng(derive_seed(2718, r, 1));
    z[r] = simulate_functionals(m, 1, 1.0, 1.0, 1024, rng).Z_T;
  }
  const double se = std::sqrt(variance(z) / double(M));
  CHECK(std::fabs(mean(z) - exact_E_Z(1.0, 1.0)) < 4.0 * se);
}

TEST_CASE("exact_Var_Z") {
  for (double mu : {1e3, 1e4}) {
    CHECK(std::fabs(exact_Var_Z(mu, 1.0) * std::pow(mu, 5) * 15.0 - 1.0) < 20.0 / mu);
  }
  for (double mu : {0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0}) {
    for (double T : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      CHECK(exact_Var_Z(mu, T) >= 0.0);
    }
  }
}

TEST_CASE("closed forms at small mu T") {
  // Continuity across the switch to the series.
  for (double T : {1.0 - 1e-12, 1.0 + 1e-12}) {
    CHECK(rel(exact_E_Z(1.0, T), exact_E_Z(1.0, 1.0)) < 1e-11);
    CHECK(rel(exact_Var_Z(1.0, T), exact_Var_Z(1.0, 1.0)) < 1e-11);
    CHECK(rel(exact_E_xi_u2(1.0, T), exact_E_xi_u2(1.0, 1.0)) < 1e-11);
  }
  // Brownian limits: E Z = 7 T^5 / 60, E[xi u^2] = 7 t^3 / 6.
  CHECK(exact_E_Z(0.0, 2.0) == doctest::Approx(7.0 * 32.0 / 60.0).epsilon(1e-15));
  CHECK(exact_E_xi_u2(0.0, 2.0) == doctest::Approx(7.0 * 8.0 / 6.0).epsilon(1e-15));
  CHECK(exact_Var_Z(0.0, 1.0) == doctest::Approx(1558.0 / 14175.0).epsilon(1e-15));
  for (double mu : {0.1, 0.05}) {
    const MomentPrediction p = exact_moments(mu, 1.0, 0.0, 0.1);
    CHECK(rel(p.E_Z, exact_E_Z(mu, 0.1)) < 1e-8);
    CHECK(rel(p.Var_Z, exact_Var_Z(mu, 0.1)) < 1e-8);
  }
}

TEST_CASE("closed forms agree with the moment recursion") {
  for (double mu : {0.5, 1.0, 2.0, 10.0, 50.0}) {
    const MomentPrediction p = exact_moments(mu, 1.0, 0.0, 1.0);
    CHECK(rel(p.E_Z, exact_E_Z(mu, 1.0)) < 1e-8);
    CHECK(rel(p.Var_Z, exact_Var_Z(mu, 1.0)) < 1e-8);
    const MomentTable tab = moment_ode(mu, 1.0, 0.0, 2, 0, 1.0, 8);
    CHECK(rel(tab.E_Z, exact_E_Z(mu, 1.0)) < 1e-8);
  }
}

TEST_CASE("moment_ode") {
  SUBCASE("OU second moment") {
    const double mu = 1.7, s = 0.8, u0 = 1.3, T = 2.0;
    const MomentTable tab = moment_ode(mu, s, u0, 0, 2, T, 10);
    for (std::size_t i = 0; i < tab.t.size(); ++i) {
      const double t = tab.t[i];
      const double expect = u0 * u0 * std::exp(-2 * mu * t) +
                            s * s * (1 - std::exp(-2 * mu * t)) / (2 * mu);
      CHECK(tab.at(i, 0, 2) == doctest::Approx(expect).epsilon(1e-10));
      CHECK(tab.at(i, 0, 0) == 1.0);
    }
  }
  SUBCASE("tolerance refinement") {
    OdeOptions a{1e-10, 1e-300, 0.0, 5'000'000};
    OdeOptions b{5e-11, 1e-300, 0.0, 5'000'000};
    const MomentTable ta = moment_ode(3.0, 1.0, 0.0, 2, 0, 1.0, 1, a);
    const MomentTable tb = moment_ode(3.0, 1.0, 0.0, 2, 0, 1.0, 1, b);
    const double va = ta.at(1, 2, 0), vb = tb.at(1, 2, 0);
    CHECK(rel(va, vb) < 10.0 * a.rtol);
  }
  SUBCASE("order limit") { CHECK_THROWS(moment_ode(1.0, 1.0, 0.0, 5, 8, 1.0)); }
}

TEST_CASE("leading moments") {
  const double mu = 7.0, T = 1.3;
  const MomentPrediction p = leading_moments(mu, 1.0, 0.0, T);
  CHECK(p.E_A == doctest::Approx(T * T / (2 * mu * mu)).epsilon(1e-15));
  CHECK(p.Var_A == doctest::Approx(std::pow(T, 5) / (15 * mu * mu * mu)).epsilon(1e-15));
  CHECK(p.E_Z == doctest::Approx(std::pow(T, 3) / (12 * mu * mu)).epsilon(1e-15));
  CHECK(p.Var_A / p.Var_Z == doctest::Approx(mu * mu).epsilon(1e-14));
  CHECK(p.regime == MomentRegime::leading_order);
}

TEST_CASE("exact moments approach the expansions for large mu T") {
  for (double u0 : {0.0, 0.7}) {
    const double mu = 2000.0, s = 1.3, T = 1.0;
    const MomentPrediction e = exact_moments(mu, s, u0, T);
    const MomentPrediction l = leading_moments(mu, s, u0, T);
    CHECK(rel(e.E_Z, l.E_Z) < 0.01);
    CHECK(rel(e.Var_Z, l.Var_Z) < 0.02);
    CHECK(rel(e.E_A, l.E_A) < 0.01);
    CHECK(rel(e.Var_A, l.Var_A) < 0.02);
  }
}

TEST_CASE("the unit-mode rescaling matches per-mode integration") {
  const std::vector<double> mu = {30.0, 0.4, 2.0, 2.0, 117.0};
  const std::vector<double> s = {1.0, 0.3, 2.5, 1.0, 0.8};
  const double T = 1.7;
  const auto shared = exact_moments_zero_start(mu, s, T);
  REQUIRE(shared.size() == mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const MomentPrediction p = exact_moments(mu[i], s[i], 0.0, T);
    CHECK(rel(shared[i].E_Z, p.E_Z) < 1e-8);
    CHECK(rel(shared[i].Var_Z, p.Var_Z) < 1e-8);
    CHECK(rel(shared[i].E_A, p.E_A) < 1e-8);
    CHECK(rel(shared[i].Var_A, p.Var_A) < 1e-7);
  }
  CHECK_THROWS(exact_moments_zero_start(std::vector<double>{-1.0}, std::vector<double>{1.0}, T));
}

TEST_CASE("order-of-magnitude sandwich over k") {
  const double T = 1.0;
  const SpdeModel m = fractional_heat_model(1, 0.5, 0.25, 1.2, 1.0, 1.0, true, {},
                                            InitialCondition::power(1.0, 1.0));
  double lo[4] = {1e300, 1e300, 1e300, 1e300}, hi[4] = {0, 0, 0, 0};
  for (int j = 4; j <= 10; ++j) {
    const std::size_t k = std::size_t{1} << j;
    const MomentPrediction p = exact_moments(m, k, 1.0, T);
    const double mu = m.mu(k, 1.0);
    const double q2 = m.noise_factor(k) * m.noise_factor(k);  // lambda^-2gamma
    const double u0 = m.u0(k);
    const double base = u0 * u0 + m.sigma() * m.sigma() * T * q2;
    const double r[4] = {p.E_Z * mu * mu / (base * base),
                         p.Var_Z * std::pow(mu, 5) / q2 / std::pow(base, 3),
                         p.E_A * mu * mu / q2 / base,
                         p.Var_A * std::pow(mu, 3) / q2 / std::pow(base, 3)};
    for (int i = 0; i < 4; ++i) {
      lo[i] = std::min(lo[i], r[i]);
      hi[i] = std::max(hi[i], r[i]);
    }
  }
  const std::string names[4] = {"E Z", "Var Z", "E A", "Var A"};
  for (int i = 0; i < 4; ++i) {
    MESSAGE(names[i] << " ratio in [" << lo[i] << ", " << hi[i] << "]");
    CHECK(lo[i] > 0.0);
    CHECK(hi[i] / lo[i] < 10.0);
  }
}
