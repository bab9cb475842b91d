#include "tfe/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "tfe/summation.hpp"

namespace tfe {

InitialCondition InitialCondition::power(double amplitude, double exponent) {
  if (!(exponent > 0.5)) {
    throw std::invalid_argument("power initial condition needs exponent > 1/2");
  }
  InitialCondition ic;
  ic.kind = Kind::power;
  ic.amplitude = amplitude;
  ic.exponent = exponent;
  return ic;
}

InitialCondition InitialCondition::explicit_list(std::vector<double> values) {
  InitialCondition ic;
  ic.kind = Kind::explicit_list;
  ic.values = std::move(values);
  return ic;
}

double InitialCondition::operator()(std::size_t k) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::power:
      return amplitude * std::pow(static_cast<double>(k), -exponent);
    case Kind::explicit_list:
      return (k >= 1 && k <= values.size()) ? values[k - 1] : 0.0;
  }
  return 0.0;
}

SpdeModel::SpdeModel(IndexFn nu, IndexFn rho, double gamma, double m, double sigma,
                     double theta_true, ThetaDomain domain, InitialCondition u0, FamilyInfo info)
    : nu_(std::move(nu)),
      rho_(std::move(rho)),
      gamma_(gamma),
      m_(m),
      sigma_(sigma),
      theta_true_(theta_true),
      domain_(domain),
      u0_(std::move(u0)),
      info_(info) {
  if (!nu_ || !rho_) throw std::invalid_argument("SpdeModel: eigenvalue functions required");
  if (!(gamma_ >= 0.0)) throw std::invalid_argument("SpdeModel: gamma must be >= 0");
  if (!(m_ > 0.0)) throw std::invalid_argument("SpdeModel: m must be > 0");
  if (!(sigma_ >= 0.0)) throw std::invalid_argument("SpdeModel: sigma must be >= 0");
  if (!(domain_.lo > 0.0) || !(domain_.hi >= domain_.lo)) {
    throw std::invalid_argument("SpdeModel: theta domain must satisfy 0 < lo <= hi");
  }
}

double SpdeModel::lambda(std::size_t k) const {
  return std::pow(nu_(k), 1.0 / (2.0 * m_));
}

double SpdeModel::noise_factor(std::size_t k) const {
  if (gamma_ == 0.0) return 1.0;
  const double nu_k = nu_(k);
  if (!(nu_k > 0.0)) {
    throw std::domain_error("noise factor lambda_k^-gamma is singular: nu_k = 0 with gamma > 0");
  }
  return std::pow(lambda(k), -gamma_);
}

SpdeModel SpdeModel::scaled_noise(double c) const {
  InitialCondition u0 = u0_;
  u0.amplitude *= c;
  for (double& v : u0.values) v *= c;
  return SpdeModel(nu_, rho_, gamma_, m_, sigma_ * c, theta_true_, domain_, std::move(u0), info_);
}

SpdeModel fractional_heat_model(int d, double beta, double gamma, double sigma, double theta,
                                double c1, bool exact_1d, ThetaDomain domain,
                                InitialCondition u0) {
  if (d < 1) throw std::invalid_argument("fractional_heat_model: d >= 1 required");
  if (!(beta > 0.0)) throw std::invalid_argument("fractional_heat_model: beta > 0 required");
  if (!(c1 > 0.0)) throw std::invalid_argument("fractional_heat_model: c1 > 0 required");
  const bool exact = exact_1d && d == 1;
  SpdeModel::IndexFn nu;
  if (exact) {
    nu = [beta](std::size_t k) {
      return std::pow(std::numbers::pi * static_cast<double>(k), 2.0 * beta);
    };
  } else {
    const double exponent = 2.0 / d;
    nu = [beta, c1, exponent](std::size_t k) {
      return std::pow(c1 * std::pow(static_cast<double>(k), exponent), beta);
    };
  }
  FamilyInfo info{ModelFamily::fractional_heat, d, beta, c1, exact};
  return SpdeModel(std::move(nu), [](std::size_t) { return 0.0; }, gamma, beta, sigma, theta,
                   domain, std::move(u0), info);
}

SpdeModel lower_order_model(int d, double sigma, double theta, double c1, bool exact_1d,
                            ThetaDomain domain, InitialCondition u0) {
  if (d < 1) throw std::invalid_argument("lower_order_model: d >= 1 required");
  if (!(c1 > 0.0)) throw std::invalid_argument("lower_order_model: c1 > 0 required");
  const bool exact = exact_1d && d == 1;
  SpdeModel::IndexFn rho;
  if (exact) {
    rho = [](std::size_t k) {
      const double x = std::numbers::pi * static_cast<double>(k);
      return x * x;
    };
  } else {
    const double exponent = 2.0 / d;
    rho = [c1, exponent](std::size_t k) {
      return c1 * std::pow(static_cast<double>(k), exponent);
    };
  }
  FamilyInfo info{ModelFamily::lower_order, d, 1.0, c1, exact};
  return SpdeModel([](std::size_t) { return 1.0; }, std::move(rho), 0.0, 1.0, sigma, theta,
                   domain, std::move(u0), info);
}

AssumptionReport check_assumptions(const SpdeModel& model, std::size_t K,
                                   std::optional<double> c0_hint) {
  if (K < 2) throw std::invalid_argument("check_assumptions: K >= 2 required");
  AssumptionReport r;
  r.K = K;
  r.c0_hint = c0_hint;

  std::vector<double> nu(K + 1);
  for (std::size_t k = 1; k <= K; ++k) {
    nu[k] = model.nu(k);
    if (nu[k] < 0.0) r.nu_nonnegative = false;
  }
  if (!r.nu_nonnegative) r.violations.emplace_back("nu_k < 0 for some k <= K");

  const auto [lo_it, hi_it] = std::minmax_element(nu.begin() + 1, nu.end());
  r.nu_constant = (*lo_it == *hi_it);
  if (r.nu_constant) {
    r.warnings.emplace_back("nu_k is constant on the prefix; nu_k -> infinity does not hold");
    r.nu_increasing_trend = false;
  } else {
    // Trend test on the last half of the prefix.
    r.nu_increasing_trend = nu[K] > nu[K / 2] && nu[K / 2] > nu[1];
    if (!r.nu_increasing_trend) r.violations.emplace_back("nu_k shows no increasing trend");
  }

  const double ends[2] = {model.theta_domain().lo, model.theta_domain().hi};
  std::size_t J = 1;
  for (double theta : ends) {
    for (std::size_t k = K; k >= 1; --k) {
      if (!(model.mu(k, theta) > 0.0)) {
        J = std::max(J, k + 1);
        break;
      }
    }
  }
  r.first_positive_index = J;
  if (J > K) {
    r.mu_positive_tail = false;
    r.mu_increasing_tail = false;
    r.violations.emplace_back("mu_k(theta) <= 0 at k = K");
  } else {
    for (double theta : ends) {
      double prev = model.mu(J, theta);
      for (std::size_t k = J; k <= K; ++k) {
        const double mu = model.mu(k, theta);
        if (mu < prev) r.mu_increasing_tail = false;
        prev = mu;
        r.c0_empirical = std::max(r.c0_empirical, nu[k] / mu);
      }
    }
    if (!r.mu_increasing_tail) {
      r.violations.emplace_back("mu_k(theta) is not nondecreasing beyond the last sign change");
    }
    if (model.mu(K, ends[0]) <= model.mu(J, ends[0])) {
      r.warnings.emplace_back("mu_k(theta) shows no growth on the prefix");
    }
  }
  if (c0_hint && r.c0_empirical > *c0_hint) {
    r.violations.emplace_back("sup nu_k/mu_k(theta) exceeds the supplied c0");
  }

  CompensatedSum u0sq;
  for (std::size_t k = 1; k <= K; ++k) {
    const double u = model.u0(k);
    u0sq += u * u;
  }
  r.u0_sq_partial_sum = u0sq.value();
  return r;
}

std::string to_string(Divergence d) {
  switch (d) {
    case Divergence::diverges:
      return "diverges";
    case Divergence::converges:
      return "converges";
    case Divergence::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

bool power_series_diverges(double p) { return p <= 1.0 + 1e-12; }

namespace {

Divergence verdict(bool diverges) {
  return diverges ? Divergence::diverges : Divergence::converges;
}

double growth_slope(const PartialSum& a, const PartialSum& b, double PartialSum::*field) {
  const double sa = a.*field;
  const double sb = b.*field;
  if (!(sa > 0.0) || !(sb > 0.0) || a.K == b.K) return 0.0;
  return std::log(sb / sa) / std::log(static_cast<double>(b.K) / static_cast<double>(a.K));
}

}  // namespace

ConditionReport check_divergence(const SpdeModel& model, double theta, std::size_t K) {
  if (K < 10) throw std::invalid_argument("check_divergence: K >= 10 required");
  ConditionReport r;

  std::vector<std::size_t> marks;
  for (std::size_t m = 10; m < K; m *= 2) marks.push_back(m);
  marks.push_back(K);

  CompensatedSum s1, s2;
  std::size_t next = 0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double nu = model.nu(k);
    const double mu = model.mu(k, theta);
    const double q = model.noise_factor(k);
    const double q2 = q * q;
    const double q4 = q2 * q2;
    s1 += nu * nu * q4 / (mu * mu);
    s2 += nu * nu * q4 * q4 / (mu * mu * mu);
    if (k == marks[next]) {
      r.partial_sums.push_back({k, s1.value(), s2.value()});
      ++next;
    }
  }
  if (r.partial_sums.size() >= 2) {
    const auto& a = r.partial_sums[r.partial_sums.size() - 2];
    const auto& b = r.partial_sums.back();
    r.consistency_growth = growth_slope(a, b, &PartialSum::consistency);
    r.normality_growth = growth_slope(a, b, &PartialSum::normality);
  }

  const FamilyInfo& f = model.family();
  std::optional<ExponentVerdict> v;
  if (f.family == ModelFamily::fractional_heat) {
    // nu ~ k^(2 beta/d), lambda ~ k^(1/d), mu ~ theta nu.
    ExponentVerdict e;
    e.consistency_exponent = 4.0 * model.gamma() / f.d;
    e.normality_exponent = (2.0 * f.beta + 8.0 * model.gamma()) / f.d;
    v = e;
  } else if (f.family == ModelFamily::lower_order) {
    // nu = 1, gamma = 0, mu ~ k^(2/d) (k^2 for the exact 1-d spectrum).
    ExponentVerdict e;
    const double growth = f.exact_1d ? 2.0 : 2.0 / f.d;
    e.consistency_exponent = 2.0 * growth;
    e.normality_exponent = 3.0 * growth;
    v = e;
  }
  if (v) {
    v->consistency_diverges = power_series_diverges(v->consistency_exponent);
    v->normality_diverges = power_series_diverges(v->normality_exponent);
    r.consistency_diverges = verdict(v->consistency_diverges);
    r.normality_diverges = verdict(v->normality_diverges);
    r.exponent_verdict = v;
  }
  return r;
}

}  // namespace tfe
