#ifndef TFE_ESTIMATOR_HPP
#define TFE_ESTIMATOR_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tfe/model.hpp"
#include "tfe/oracle.hpp"
#include "tfe/simulate.hpp"

namespace tfe {

class DegenerateDenominator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bias and scale sequences a_n, b_n evaluated at a set of prefixes n.
struct BiasScale {
  std::vector<std::size_t> checkpoints;
  std::vector<double> a;
  std::vector<double> b;
};

/// Trajectory fitting estimates at each checkpoint prefix.
struct TfeResult {
  std::vector<std::size_t> checkpoints;
  std::vector<double> theta_hat;
  std::vector<double> numerator;    // sum nu_k (xi^2/2 - u0^2 Y - s^2 X + 2 rho Z)
  std::vector<double> denominator;  // 2 sum nu_k^2 Z_k
  std::vector<double> a;            // empty unless bias/scale supplied
  std::vector<double> b;
  std::vector<double> normalized_stat;
  double theta_true = 0.0;
  bool clamped = false;
};

struct TfeOptions {
  /// Clamp reported estimates to the model's admissible interval.
  bool clamp_theta = false;
};

/// Closed-form minimizer of the trajectory fitting objective over the first
/// n modes, for each n in `checkpoints` (strictly increasing, within
/// [1, funcs.size()]). funcs[i] must describe mode i + 1. Throws
/// DegenerateDenominator when sum nu_k^2 Z_k = 0 at a checkpoint.
TfeResult tfe(std::span<const ModeFunctionals> funcs, const SpdeModel& model,
              std::span<const std::size_t> checkpoints, const TfeOptions& opt = {});

/// Attaches a_n, b_n and (theta_hat - theta + a_n) / b_n.
void attach_bias_scale(TfeResult& result, const BiasScale& bs);

/// sum_k int_0^T (V_k(t; theta) - u_k^2(t))^2 dt over the given paths,
/// integrated exactly for the piecewise-linear u^2 reconstruction used by
/// the functionals. The paths must share one time grid per mode.
double objective(std::span<const ModePath> paths, const SpdeModel& model, double theta);

struct ResidualTerm {
  std::size_t k = 0;
  double A = 0.0;
};

/// A_k = xi^2/2 - u0^2 Y - s^2 X + 2 mu_k(theta) Z.
ResidualTerm residual_A(const ModeFunctionals& f, const SpdeModel& model, double theta);

/// Per-mode moments feeding a_n, b_n.
using MomentSource =
    std::function<MomentPrediction(const SpdeModel&, std::size_t, double, double)>;

/// a_n = sum nu E A / (2 sum nu^2 E Z), b_n = sqrt(sum nu^2 Var A) / (2 sum nu^2 E Z).
BiasScale bias_scale_from_moments(const SpdeModel& model, double theta, double T,
                                  std::span<const std::size_t> checkpoints,
                                  const MomentSource& source);

/// From the large-k expansions with every initial-condition term kept.
BiasScale bias_scale_exact(const SpdeModel& model, double theta, double T,
                           std::span<const std::size_t> checkpoints);

/// Leading-order asymptotic forms; the initial condition drops out.
BiasScale bias_scale_leading(const SpdeModel& model, double theta, double T,
                             std::span<const std::size_t> checkpoints);

/// Above this mu_k T the moment recursion is replaced by the expansions.
inline constexpr double moment_ode_mu_T_limit = 1.0e4;

/// From exact per-mode moments of the Ito moment recursion.
BiasScale bias_scale_moment(const SpdeModel& model, double theta, double T,
                            std::span<const std::size_t> checkpoints);

std::pair<double, double> bias_scale_exact(const SpdeModel& model, double theta, std::size_t N,
                                           double T);
std::pair<double, double> bias_scale_leading(const SpdeModel& model, double theta,
                                             std::size_t N, double T);
std::pair<double, double> bias_scale_moment(const SpdeModel& model, double theta,
                                            std::size_t N, double T);

}  // namespace tfe

#endif  // TFE_ESTIMATOR_HPP
