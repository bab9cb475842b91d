#ifndef TFE_SIMULATE_HPP
#define TFE_SIMULATE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tfe/model.hpp"
#include "tfe/random.hpp"
#include "tfe/summation.hpp"

namespace tfe {

/// One Fourier mode sampled on the uniform grid t_i = i T / S.
struct ModePath {
  std::size_t k = 0;
  double T = 0.0;
  double noise_scale = 0.0;
  double mu = 0.0;
  std::vector<double> t;
  std::vector<double> u;
  std::vector<double> xi;
  /// Ito sums of u dw, present only when requested from simulate_mode.
  std::vector<double> zeta;

  [[nodiscard]] std::size_t steps() const { return u.empty() ? 0 : u.size() - 1; }
};

/// Terminal values of the path functionals of one mode.
struct ModeFunctionals {
  std::size_t k = 0;
  double u0_sq = 0.0;
  double xi_T = 0.0;
  double X_T = 0.0;
  double Y_T = 0.0;
  double Z_T = 0.0;
  std::size_t steps = 0;
  std::optional<double> discretization_error_estimate;
};

/// Exact Ornstein-Uhlenbeck transition of du = -mu u dt + s dw over dt.
/// Valid for any real mu (mu = 0 is Brownian motion).
double ou_step(double u, double mu, double noise_scale, double dt, double z);

/// Conditional variance (1 - e^{-2 mu dt}) / (2 mu) of one unit-noise OU step.
double ou_step_variance(double mu, double dt);

struct StepPolicy {
  double kappa = 20.0;
  std::size_t min_steps = 256;
  std::size_t max_steps = std::size_t{1} << 20;

  /// clamp(ceil(kappa mu T), min_steps, max_steps).
  [[nodiscard]] std::size_t steps(double mu, double T) const;
};

inline std::size_t step_policy(double mu, double T, double kappa = 20.0,
                               std::size_t min_steps = 256,
                               std::size_t max_steps = std::size_t{1} << 20) {
  return StepPolicy{kappa, min_steps, max_steps}.steps(mu, T);
}

/// Streaming accumulator for xi, X, Y, Z along a uniform grid.
///
/// u^2 is taken piecewise linear between nodes, which makes xi the
/// composite trapezoid of u^2 and xi piecewise quadratic. Y, X and Z are
/// the exact integrals of that piecewise quadratic, so the identity
/// int u^2 xi dt = xi_T^2 / 2 holds for the discrete functionals as well.
class FunctionalAccumulator {
 public:
  FunctionalAccumulator(double u0, double dt);

  void push(double u_next);

  [[nodiscard]] double xi() const { return xi_.value(); }
  [[nodiscard]] std::size_t steps() const { return steps_; }
  [[nodiscard]] ModeFunctionals result(std::size_t k) const;

 private:
  double dt_;
  double u0_sq_;
  double f_prev_;
  std::size_t steps_ = 0;
  CompensatedSum xi_;
  CompensatedSum X_;
  CompensatedSum Y_;
  CompensatedSum Z_;
};

/// Simulates mode k at parameter theta on [0, T] with `steps` exact OU
/// transitions. With track_zeta, each step draws the OU innovation and the
/// Brownian increment jointly (two normals per step) and the Ito sum
/// zeta = sum u_i dW_i is stored alongside; the u path then differs from the
/// untracked one for the same stream.
ModePath simulate_mode(const SpdeModel& model, std::size_t k, double theta, double T,
                       std::size_t steps, NormalStream& rng, bool track_zeta = false);

ModeFunctionals functionals(const ModePath& path);

/// simulate_mode followed by functionals without storing the path;
/// bit-identical to that composition.
ModeFunctionals simulate_functionals(const SpdeModel& model, std::size_t k, double theta,
                                     double T, std::size_t steps, NormalStream& rng);

struct RefineCheck {
  ModeFunctionals coarse;
  ModeFunctionals fine;
  double d_xi = 0.0;
  double d_X = 0.0;
  double d_Y = 0.0;
  double d_Z = 0.0;
  /// Largest relative difference over the four functionals.
  double max_relative = 0.0;
  /// Set when the refined grid would exceed max_steps; the comparison then
  /// uses max_steps against max_steps / 2.
  bool max_refinement_reached = false;
};

/// Simulates the fine grid 2S (S from the policy) and compares its
/// functionals with those of the same path observed on every other node.
/// Exact OU transitions compose, so the coarse path carries exactly the
/// paired fine-grid increments and the difference is pure quadrature error.
RefineCheck refine_check(const SpdeModel& model, std::size_t k, double theta, double T,
                         std::uint64_t seed, const StepPolicy& policy = {});

/// Same as above with an explicit coarse step count.
RefineCheck refine_check_steps(const SpdeModel& model, std::size_t k, double theta, double T,
                               std::uint64_t seed, std::size_t coarse_steps,
                               std::size_t max_steps = std::size_t{1} << 20);

}  // namespace tfe

#endif  // TFE_SIMULATE_HPP
