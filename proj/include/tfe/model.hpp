#ifndef TFE_MODEL_HPP
#define TFE_MODEL_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tfe {

/// Closed admissible parameter interval [lo, hi] with 0 < lo <= hi.
struct ThetaDomain {
  double lo = 0.1;
  double hi = 10.0;
};

/// Fourier coefficients u_k(0) of the initial condition.
struct InitialCondition {
  enum class Kind { zero, power, explicit_list };

  Kind kind = Kind::zero;
  double amplitude = 0.0;       // power: A in A * k^-p
  double exponent = 1.0;        // power: p > 1/2
  std::vector<double> values;   // explicit: u_1(0), u_2(0), ...; zero beyond

  static InitialCondition zero() { return {}; }
  static InitialCondition power(double amplitude, double exponent);
  static InitialCondition explicit_list(std::vector<double> values);

  [[nodiscard]] double operator()(std::size_t k) const;
};

enum class ModelFamily { fractional_heat, lower_order, custom };

/// Parameters of a registered eigenvalue family; used for the analytic
/// divergence verdicts and for serialization.
struct FamilyInfo {
  ModelFamily family = ModelFamily::custom;
  int d = 1;
  double beta = 1.0;
  double c1 = 1.0;
  bool exact_1d = false;
};

/// Spectral description of du + (theta A1 + A0) u dt = sigma dW with
/// W = sum_k lambda_k^-gamma h_k w_k. Eigenvalue sequences are pure index
/// functions (1-based), so repeated evaluation is always identical.
class SpdeModel {
 public:
  using IndexFn = std::function<double(std::size_t)>;

  SpdeModel(IndexFn nu, IndexFn rho, double gamma, double m, double sigma, double theta_true,
            ThetaDomain domain, InitialCondition u0, FamilyInfo info = {});

  [[nodiscard]] double nu(std::size_t k) const { return nu_(k); }
  [[nodiscard]] double rho(std::size_t k) const { return rho_(k); }
  [[nodiscard]] double u0(std::size_t k) const { return u0_(k); }

  /// theta * nu_k + rho_k.
  [[nodiscard]] double mu(std::size_t k, double theta) const { return theta * nu_(k) + rho_(k); }

  /// nu_k^(1/(2m)).
  [[nodiscard]] double lambda(std::size_t k) const;

  /// lambda_k^-gamma; throws std::domain_error when nu_k = 0 and gamma > 0.
  [[nodiscard]] double noise_factor(std::size_t k) const;

  /// sigma * lambda_k^-gamma, the diffusion coefficient of mode k.
  [[nodiscard]] double noise_scale(std::size_t k) const { return sigma_ * noise_factor(k); }

  [[nodiscard]] double gamma() const { return gamma_; }
  [[nodiscard]] double m() const { return m_; }
  [[nodiscard]] double sigma() const { return sigma_; }
  [[nodiscard]] double theta_true() const { return theta_true_; }
  [[nodiscard]] const ThetaDomain& theta_domain() const { return domain_; }
  [[nodiscard]] const InitialCondition& initial_condition() const { return u0_; }
  [[nodiscard]] const FamilyInfo& family() const { return info_; }

  /// Copy with sigma and every u_k(0) multiplied by c.
  [[nodiscard]] SpdeModel scaled_noise(double c) const;

 private:
  IndexFn nu_;
  IndexFn rho_;
  double gamma_;
  double m_;
  double sigma_;
  double theta_true_;
  ThetaDomain domain_;
  InitialCondition u0_;
  FamilyInfo info_;
};

/// Fractional stochastic heat equation: rho_k = 0, m = beta, and either
/// nu_k = (pi k)^(2 beta) (d = 1, Dirichlet on the unit interval) or the
/// Weyl surrogate nu_k = (c1 k^(2/d))^beta.
SpdeModel fractional_heat_model(int d, double beta, double gamma, double sigma, double theta,
                                double c1 = 1.0, bool exact_1d = true,
                                ThetaDomain domain = {}, InitialCondition u0 = {});

/// Parameter in front of the zeroth-order term: nu_k = 1, gamma = 0,
/// rho_k = c1 k^(2/d), or (pi k)^2 when d = 1 and exact_1d is set.
SpdeModel lower_order_model(int d, double sigma, double theta, double c1 = 1.0,
                            bool exact_1d = false, ThetaDomain domain = {},
                            InitialCondition u0 = {});

struct AssumptionReport {
  std::size_t K = 0;
  bool nu_nonnegative = true;
  bool nu_constant = false;
  bool nu_increasing_trend = true;
  std::size_t first_positive_index = 1;   // empirical J
  bool mu_positive_tail = true;
  bool mu_increasing_tail = true;
  double c0_empirical = 0.0;              // sup_{J <= k <= K} nu_k / mu_k over the domain ends
  std::optional<double> c0_hint;
  double u0_sq_partial_sum = 0.0;
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Finite-prefix checks of the structural assumptions on k <= K, evaluated
/// at both endpoints of the admissible interval. Never throws on a failed
/// check; failures are listed in the report.
AssumptionReport check_assumptions(const SpdeModel& model, std::size_t K,
                                   std::optional<double> c0_hint = std::nullopt);

enum class Divergence { diverges, converges, undetermined };

std::string to_string(Divergence d);

struct PartialSum {
  std::size_t K = 0;
  double consistency = 0.0;  // sum nu^2 lambda^-4gamma / mu^2
  double normality = 0.0;    // sum nu^2 lambda^-8gamma / mu^3
};

struct ExponentVerdict {
  double consistency_exponent = 0.0;  // series behaves like sum k^-p
  double normality_exponent = 0.0;
  bool consistency_diverges = false;
  bool normality_diverges = false;
};

struct ConditionReport {
  Divergence consistency_diverges = Divergence::undetermined;
  Divergence normality_diverges = Divergence::undetermined;
  std::vector<PartialSum> partial_sums;
  std::optional<ExponentVerdict> exponent_verdict;
  /// Empirical power-law slope of the last doubling of each partial sum,
  /// d log S / d log K. Values near 0 suggest convergence.
  double consistency_growth = 0.0;
  double normality_growth = 0.0;
};

/// sum k^-p diverges iff p <= 1; the boundary counts as divergent.
bool power_series_diverges(double p);

ConditionReport check_divergence(const SpdeModel& model, double theta, std::size_t K);

}  // namespace tfe

#endif  // TFE_MODEL_HPP
