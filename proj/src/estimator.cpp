#include "tfe/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "tfe/summation.hpp"

namespace tfe {

namespace {

void validate_checkpoints(std::span<const std::size_t> checkpoints, std::size_t n_max) {
  if (checkpoints.empty()) throw std::invalid_argument("at least one checkpoint required");
  std::size_t prev = 0;
  for (std::size_t c : checkpoints) {
    if (c <= prev || c > n_max) {
      throw std::invalid_argument("checkpoints must be strictly increasing within [1, N]");
    }
    prev = c;
  }
}

}  // namespace

TfeResult tfe(std::span<const ModeFunctionals> funcs, const SpdeModel& model,
              std::span<const std::size_t> checkpoints, const TfeOptions& opt) {
  validate_checkpoints(checkpoints, funcs.size());
  TfeResult r;
  r.theta_true = model.theta_true();
  r.clamped = opt.clamp_theta;
  CompensatedSum num, den;
  std::size_t next = 0;
  for (std::size_t i = 0; i < checkpoints.back(); ++i) {
    const ModeFunctionals& f = funcs[i];
    const std::size_t k = i + 1;
    const double nu = model.nu(k);
    const double s = model.noise_scale(k);
    num += nu * (0.5 * f.xi_T * f.xi_T - f.u0_sq * f.Y_T - s * s * f.X_T +
                 2.0 * model.rho(k) * f.Z_T);
    den += nu * nu * f.Z_T;
    if (k == checkpoints[next]) {
      const double d = 2.0 * den.value();
      if (!(d > 0.0)) {
        throw DegenerateDenominator("tfe: sum nu_k^2 Z_k vanishes at n = " + std::to_string(k));
      }
      double theta = -num.value() / d;
      if (opt.clamp_theta) {
        theta = std::clamp(theta, model.theta_domain().lo, model.theta_domain().hi);
      }
      r.checkpoints.push_back(k);
      r.numerator.push_back(num.value());
      r.denominator.push_back(d);
      r.theta_hat.push_back(theta);
      ++next;
    }
  }
  return r;
}

void attach_bias_scale(TfeResult& result, const BiasScale& bs) {
  if (bs.checkpoints != result.checkpoints) {
    throw std::invalid_argument("attach_bias_scale: checkpoint mismatch");
  }
  result.a = bs.a;
  result.b = bs.b;
  result.normalized_stat.resize(result.theta_hat.size());
  for (std::size_t i = 0; i < result.theta_hat.size(); ++i) {
    result.normalized_stat[i] = (result.theta_hat[i] - result.theta_true + bs.a[i]) / bs.b[i];
  }
}

double objective(std::span<const ModePath> paths, const SpdeModel& model, double theta) {
  // Three-point Gauss-Legendre on [0, 1]; exact for the quartic integrand.
  static constexpr std::array<double, 3> node = {0.5 - 0.3872983346207417, 0.5,
                                                 0.5 + 0.3872983346207417};
  static constexpr std::array<double, 3> weight = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  CompensatedSum total;
  for (const ModePath& p : paths) {
    const std::size_t k = p.k;
    const std::size_t S = p.steps();
    if (S < 1) continue;
    const double h = p.T / static_cast<double>(S);
    const double u0sq = p.u[0] * p.u[0];
    const double s = model.noise_scale(k);
    const double s2 = s * s;
    const double two_mu = 2.0 * model.mu(k, theta);
    for (std::size_t i = 0; i < S; ++i) {
      const double f0 = p.u[i] * p.u[i];
      const double D = p.u[i + 1] * p.u[i + 1] - f0;
      const double t0 = static_cast<double>(i) * h;
      double part = 0.0;
      for (std::size_t q = 0; q < 3; ++q) {
        const double tau = node[q] * h;
        const double f = f0 + D * node[q];
        const double xi = p.xi[i] + f0 * tau + 0.5 * D * node[q] * tau;
        const double gap = u0sq + s2 * (t0 + tau) - two_mu * xi - f;
        part += weight[q] * gap * gap;
      }
      total += part * h;
    }
  }
  return total.value();
}

ResidualTerm residual_A(const ModeFunctionals& f, const SpdeModel& model, double theta) {
  const double s = model.noise_scale(f.k);
  return {f.k, 0.5 * f.xi_T * f.xi_T - f.u0_sq * f.Y_T - s * s * f.X_T +
                   2.0 * model.mu(f.k, theta) * f.Z_T};
}

BiasScale bias_scale_from_moments(const SpdeModel& model, double theta, double T,
                                  std::span<const std::size_t> checkpoints,
                                  const MomentSource& source) {
  validate_checkpoints(checkpoints, checkpoints.empty() ? 0 : checkpoints.back());
  BiasScale bs;
  CompensatedSum sa, sz, sv;
  std::size_t next = 0;
  for (std::size_t k = 1; k <= checkpoints.back(); ++k) {
    const double nu = model.nu(k);
    const MomentPrediction m = source(model, k, theta, T);
    sa += nu * m.E_A;
    sz += nu * nu * m.E_Z;
    sv += nu * nu * m.Var_A;
    if (k == checkpoints[next]) {
      const double den = 2.0 * sz.value();
      bs.checkpoints.push_back(k);
      bs.a.push_back(sa.value() / den);
      bs.b.push_back(std::sqrt(sv.value()) / den);
      ++next;
    }
  }
  return bs;
}

BiasScale bias_scale_exact(const SpdeModel& model, double theta, double T,
                           std::span<const std::size_t> checkpoints) {
  return bias_scale_from_moments(
      model, theta, T, checkpoints,
      [](const SpdeModel& m, std::size_t k, double th, double t) {
        return leading_moments(m, k, th, t);
      });
}

BiasScale bias_scale_moment(const SpdeModel& model, double theta, double T,
                            std::span<const std::size_t> checkpoints) {
  validate_checkpoints(checkpoints, checkpoints.empty() ? 0 : checkpoints.back());
  const std::size_t N = checkpoints.back();
  std::vector<MomentPrediction> moments(N);
  // Modes starting at zero share one unit-mode integration. The explicit
  // integrator needs O(mu T) steps, so far-out modes use the expansions,
  // which are accurate to O(1 / (mu T)) there.
  std::vector<std::size_t> shared;
  std::vector<double> mu, s;
  for (std::size_t k = 1; k <= N; ++k) {
    const double m = model.mu(k, theta);
    if (m * T > moment_ode_mu_T_limit) {
      moments[k - 1] = leading_moments(model, k, theta, T);
    } else if (model.u0(k) == 0.0 && m > 0.0) {
      shared.push_back(k);
      mu.push_back(m);
      s.push_back(model.noise_scale(k));
    } else {
      moments[k - 1] = exact_moments(model, k, theta, T);
    }
  }
  const auto unit = exact_moments_zero_start(mu, s, T);
  for (std::size_t i = 0; i < shared.size(); ++i) {
    MomentPrediction p = unit[i];
    p.k = shared[i];
    p.lambda = model.lambda(shared[i]);
    p.sigma = model.sigma();
    moments[shared[i] - 1] = p;
  }
  return bias_scale_from_moments(model, theta, T, checkpoints,
                                 [&](const SpdeModel&, std::size_t k, double, double) {
                                   return moments[k - 1];
                                 });
}

BiasScale bias_scale_leading(const SpdeModel& model, double theta, double T,
                             std::span<const std::size_t> checkpoints) {
  validate_checkpoints(checkpoints, checkpoints.empty() ? 0 : checkpoints.back());
  BiasScale bs;
  CompensatedSum s_a, s_z, s_v;
  std::size_t next = 0;
  const double a_pref = 3.0 / T;
  const double b_pref = std::sqrt(12.0 / (5.0 * T));
  for (std::size_t k = 1; k <= checkpoints.back(); ++k) {
    const double nu = model.nu(k);
    const double mu = model.mu(k, theta);
    const double q = model.noise_factor(k);
    const double q4 = q * q * q * q;
    s_a += nu * q4 / (mu * mu);
    s_z += nu * nu * q4 / (mu * mu);
    s_v += nu * nu * q4 * q4 / (mu * mu * mu);
    if (k == checkpoints[next]) {
      bs.checkpoints.push_back(k);
      bs.a.push_back(a_pref * s_a.value() / s_z.value());
      bs.b.push_back(b_pref * std::sqrt(s_v.value()) / s_z.value());
      ++next;
    }
  }
  return bs;
}

namespace {

template <class F>
std::pair<double, double> single(F&& f, const SpdeModel& model, double theta, std::size_t N,
                                 double T) {
  const std::array<std::size_t, 1> cp = {N};
  const BiasScale bs = f(model, theta, T, std::span<const std::size_t>(cp));
  return {bs.a.front(), bs.b.front()};
}

}  // namespace

std::pair<double, double> bias_scale_exact(const SpdeModel& model, double theta, std::size_t N,
                                           double T) {
  return single(
      [](const SpdeModel& m, double th, double t, std::span<const std::size_t> cp) {
        return bias_scale_exact(m, th, t, cp);
      },
      model, theta, N, T);
}

std::pair<double, double> bias_scale_leading(const SpdeModel& model, double theta,
                                             std::size_t N, double T) {
  return single(
      [](const SpdeModel& m, double th, double t, std::span<const std::size_t> cp) {
        return bias_scale_leading(m, th, t, cp);
      },
      model, theta, N, T);
}

std::pair<double, double> bias_scale_moment(const SpdeModel& model, double theta,
                                            std::size_t N, double T) {
  return single(
      [](const SpdeModel& m, double th, double t, std::span<const std::size_t> cp) {
        return bias_scale_moment(m, th, t, cp);
      },
      model, theta, N, T);
}

}  // namespace tfe
