#ifndef TFE_ORACLE_HPP
#define TFE_ORACLE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "tfe/model.hpp"
#include "tfe/ode.hpp"

namespace tfe {

// Closed forms for the unit case u_k(0) = 0, gamma = 0, sigma = 1. For a
// general noise scale s with u_k(0) = 0, multiply E_Z by s^4 and Var_Z by s^8.

/// E u^{2n}(t) = (2n-1)!! ((1 - e^{-2 mu t}) / (2 mu))^n.
double gaussian_even_moment(double mu, double t, int n);

/// E[xi(t) u^2(t)].
double exact_E_xi_u2(double mu, double t);

/// E[Z(T)], Z = int_0^T xi^2 dt.
double exact_E_Z(double mu, double T);

/// Var[Z(T)], term by term from the symbolic expansion in powers
/// mu^-10 ... mu^-5.
double exact_Var_Z(double mu, double T);

enum class MomentRegime { leading_order, moment_ode };

struct MomentPrediction {
  std::size_t k = 0;
  double E_Z = 0.0;
  double Var_Z = 0.0;
  double E_A = 0.0;
  double Var_A = 0.0;
  MomentRegime regime = MomentRegime::leading_order;
  double mu = 0.0;
  double lambda = 0.0;
  double sigma = 0.0;
  double T = 0.0;
  double u0 = 0.0;
};

/// Large-k expansions of E Z_k, Var Z_k, E A_k, Var A_k with all initial
/// condition terms kept.
MomentPrediction leading_moments(const SpdeModel& model, std::size_t k, double theta, double T);

/// Same expansions from raw mode parameters (s = sigma lambda^-gamma).
MomentPrediction leading_moments(double mu, double noise_scale, double u0, double T);

/// Exponents of a monomial Z^c X^x Y^y xi^a u^b in the path functionals of
/// one mode.
struct Monomial {
  int c = 0;  // Z
  int x = 0;  // X
  int y = 0;  // Y
  int a = 0;  // xi
  int b = 0;  // u

  auto operator<=>(const Monomial&) const = default;
};

/// Closed linear ODE for the expectations of a set of monomials.
///
/// Ito's formula for du = -mu u dt + s dw gives
///   d/dt E[m] = c E[m Z^-1 xi^2] + x t E[m X^-1 xi] + y E[m Y^-1 xi]
///             + a E[m xi^-1 u^2] + b(b-1)/2 s^2 E[m u^-2] - b mu E[m],
/// and every referenced monomial precedes m in lexicographic (c, x, y, a, b)
/// order, so the system is lower triangular once closed under dependencies.
class MomentSystem {
 public:
  MomentSystem(std::vector<Monomial> targets, double mu, double noise_scale, double u0);

  [[nodiscard]] std::size_t size() const { return states_.size(); }
  [[nodiscard]] const std::vector<Monomial>& states() const { return states_; }
  [[nodiscard]] std::size_t index(const Monomial& m) const;

  [[nodiscard]] std::vector<double> initial_state() const;
  void rhs(double t, const std::vector<double>& y, std::vector<double>& dydt) const;

  /// Expectations of every state at each output time.
  [[nodiscard]] std::vector<std::vector<double>> solve(const std::vector<double>& times,
                                                       const OdeOptions& opt = {},
                                                       OdeStats* stats = nullptr) const;

 private:
  struct Term {
    std::size_t col;
    double coef;
    bool times_t;
  };
  std::vector<Monomial> states_;
  std::vector<std::vector<Term>> rows_;
  double u0_;
};

/// E[xi^a u^b](t) on a time grid.
struct MomentTable {
  std::vector<double> t;
  int a_max = 0;
  int b_max = 0;
  std::vector<std::vector<double>> values;  // values[i][a * (b_max + 1) + b]
  double E_Z = 0.0;                         // E[Z(T)] when a_max >= 2

  [[nodiscard]] double at(std::size_t i, int a, int b) const {
    return values[i][static_cast<std::size_t>(a * (b_max + 1) + b)];
  }
};

/// Integrates the moment recursion for all a <= a_max, b <= b_max on
/// `samples` + 1 equally spaced times in [0, T]. Z rides along as an extra
/// state, so E[Z(T)] = int_0^T E[xi^2] dt is integrated to the same
/// tolerance as the table.
MomentTable moment_ode(double mu, double noise_scale, double u0, int a_max, int b_max, double T,
                       std::size_t samples = 16, const OdeOptions& opt = {});

/// E Z, Var Z, E A, Var A of one mode from the moment recursion (no
/// asymptotic truncation), with A = xi^2/2 - u0^2 Y - s^2 X + 2 mu Z.
MomentPrediction exact_moments(double mu, double noise_scale, double u0, double T,
                               const OdeOptions& opt = {1e-11, 1e-300, 0.0, 5'000'000});

MomentPrediction exact_moments(const SpdeModel& model, std::size_t k, double theta, double T,
                               const OdeOptions& opt = {1e-11, 1e-300, 0.0, 5'000'000});

/// exact_moments for many modes with u_k(0) = 0 and mu_i > 0, from a single
/// integration of the unit mode (mu = 1, s = 1). With u(t) = s mu^-1/2
/// v(mu t) for a unit-rate v, Z scales by s^4 mu^-5 and A by s^4 mu^-4, so
/// every mode is the unit mode read off at horizon mu_i T.
std::vector<MomentPrediction> exact_moments_zero_start(
    std::span<const double> mu, std::span<const double> noise_scale, double T,
    const OdeOptions& opt = {1e-11, 1e-300, 0.0, 5'000'000});

}  // namespace tfe

#endif  // TFE_ORACLE_HPP
