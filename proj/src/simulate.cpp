#include "tfe/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tfe {

double ou_step_variance(double mu, double dt) {
  if (mu == 0.0) return dt;
  return -std::expm1(-2.0 * mu * dt) / (2.0 * mu);
}

double ou_step(double u, double mu, double noise_scale, double dt, double z) {
  return std::exp(-mu * dt) * u + noise_scale * std::sqrt(ou_step_variance(mu, dt)) * z;
}

std::size_t StepPolicy::steps(double mu, double T) const {
  const double raw = std::ceil(kappa * mu * T);
  if (!(raw > static_cast<double>(min_steps))) return min_steps;
  if (raw >= static_cast<double>(max_steps)) return max_steps;
  return static_cast<std::size_t>(raw);
}

FunctionalAccumulator::FunctionalAccumulator(double u0, double dt)
    : dt_(dt), u0_sq_(u0 * u0), f_prev_(u0 * u0) {}

void FunctionalAccumulator::push(double u_next) {
  const double h = dt_;
  const double a = xi_.value();
  const double b = f_prev_;
  const double f = u_next * u_next;
  const double D = f - b;
  const double t0 = static_cast<double>(steps_) * h;
  const double h2 = h * h;
  const double h3 = h2 * h;

  // xi(t0 + s) = a + b s + D s^2 / (2h) on [0, h].
  const double dY = h * a + h2 * (2.0 * b + f) / 6.0;
  const double dX = t0 * dY + a * h2 * 0.5 + h3 * (5.0 * b + 3.0 * f) / 24.0;
  const double dZ = a * a * h + a * b * h2 + a * D * h2 / 3.0 +
                    h3 * (b * b / 3.0 + b * D / 4.0 + D * D / 20.0);

  Y_ += dY;
  X_ += dX;
  Z_ += dZ;
  xi_ += 0.5 * h * (b + f);
  f_prev_ = f;
  ++steps_;
}

ModeFunctionals FunctionalAccumulator::result(std::size_t k) const {
  ModeFunctionals out;
  out.k = k;
  out.u0_sq = u0_sq_;
  out.xi_T = xi_.value();
  out.X_T = X_.value();
  out.Y_T = Y_.value();
  out.Z_T = Z_.value();
  out.steps = steps_;
  return out;
}

namespace {

void require_steps(std::size_t steps) {
  if (steps < 2) throw std::invalid_argument("simulation needs at least 2 steps");
}

}  // namespace

ModePath simulate_mode(const SpdeModel& model, std::size_t k, double theta, double T,
                       std::size_t steps, NormalStream& rng, bool track_zeta) {
  require_steps(steps);
  if (!(T > 0.0)) throw std::invalid_argument("simulate_mode: T > 0 required");

  ModePath p;
  p.k = k;
  p.T = T;
  p.mu = model.mu(k, theta);
  p.noise_scale = model.noise_scale(k);
  p.t.resize(steps + 1);
  p.u.resize(steps + 1);
  p.xi.resize(steps + 1);
  if (track_zeta) p.zeta.resize(steps + 1);

  const double dt = T / static_cast<double>(steps);
  const double decay = std::exp(-p.mu * dt);
  const double var = ou_step_variance(p.mu, dt);
  const double sd = std::sqrt(var);
  const double innovation = p.noise_scale * sd;
  // Cov(int e^{-mu(dt-r)} dw, int dw) over one step.
  const double cov = (p.mu == 0.0) ? dt : -std::expm1(-p.mu * dt) / p.mu;
  const double w_on_z = (sd > 0.0) ? cov / sd : 0.0;
  const double w_resid = std::sqrt(std::max(0.0, dt - w_on_z * w_on_z));

  double u = model.u0(k);
  FunctionalAccumulator acc(u, dt);
  CompensatedSum zeta;
  p.t[0] = 0.0;
  p.u[0] = u;
  p.xi[0] = 0.0;
  if (track_zeta) p.zeta[0] = 0.0;
  for (std::size_t i = 1; i <= steps; ++i) {
    const double z = rng();
    const double u_next = decay * u + innovation * z;
    if (track_zeta) {
      const double dW = w_on_z * z + w_resid * rng();
      zeta += u * dW;
      p.zeta[i] = zeta.value();
    }
    acc.push(u_next);
    u = u_next;
    p.t[i] = static_cast<double>(i) * dt;
    p.u[i] = u;
    p.xi[i] = acc.xi();
  }
  p.t[steps] = T;
  return p;
}

ModeFunctionals functionals(const ModePath& path) {
  const std::size_t steps = path.steps();
  require_steps(steps);
  FunctionalAccumulator acc(path.u[0], path.T / static_cast<double>(steps));
  for (std::size_t i = 1; i <= steps; ++i) acc.push(path.u[i]);
  return acc.result(path.k);
}

ModeFunctionals simulate_functionals(const SpdeModel& model, std::size_t k, double theta,
                                     double T, std::size_t steps, NormalStream& rng) {
  require_steps(steps);
  if (!(T > 0.0)) throw std::invalid_argument("simulate_functionals: T > 0 required");
  const double mu = model.mu(k, theta);
  const double dt = T / static_cast<double>(steps);
  const double decay = std::exp(-mu * dt);
  const double innovation = model.noise_scale(k) * std::sqrt(ou_step_variance(mu, dt));
  double u = model.u0(k);
  FunctionalAccumulator acc(u, dt);
  for (std::size_t i = 1; i <= steps; ++i) {
    u = decay * u + innovation * rng();
    acc.push(u);
  }
  return acc.result(k);
}

namespace {

ModeFunctionals subsampled_functionals(const ModePath& fine) {
  const std::size_t coarse_steps = fine.steps() / 2;
  FunctionalAccumulator acc(fine.u[0], fine.T / static_cast<double>(coarse_steps));
  for (std::size_t i = 1; i <= coarse_steps; ++i) acc.push(fine.u[2 * i]);
  return acc.result(fine.k);
}

double rel(double d, double ref) {
  const double scale = std::fabs(ref);
  return scale > 0.0 ? std::fabs(d) / scale : std::fabs(d);
}

}  // namespace

RefineCheck refine_check_steps(const SpdeModel& model, std::size_t k, double theta, double T,
                               std::uint64_t seed, std::size_t coarse_steps,
                               std::size_t max_steps) {
  RefineCheck r;
  std::size_t fine_steps = 2 * coarse_steps;
  if (fine_steps > max_steps) {
    r.max_refinement_reached = true;
    fine_steps = max_steps - (max_steps % 2);
  }
  if (fine_steps < 4) throw std::invalid_argument("refine_check: grid too small");
  NormalStream rng(seed);
  const ModePath fine = simulate_mode(model, k, theta, T, fine_steps, rng);
  r.fine = functionals(fine);
  r.coarse = subsampled_functionals(fine);
  r.d_xi = r.coarse.xi_T - r.fine.xi_T;
  r.d_X = r.coarse.X_T - r.fine.X_T;
  r.d_Y = r.coarse.Y_T - r.fine.Y_T;
  r.d_Z = r.coarse.Z_T - r.fine.Z_T;
  r.max_relative = std::max({rel(r.d_xi, r.fine.xi_T), rel(r.d_X, r.fine.X_T),
                             rel(r.d_Y, r.fine.Y_T), rel(r.d_Z, r.fine.Z_T)});
  r.coarse.discretization_error_estimate = r.max_relative;
  return r;
}

RefineCheck refine_check(const SpdeModel& model, std::size_t k, double theta, double T,
                         std::uint64_t seed, const StepPolicy& policy) {
  const std::size_t S = policy.steps(model.mu(k, theta), T);
  return refine_check_steps(model, k, theta, T, seed, S, policy.max_steps);
}

}  // namespace tfe
