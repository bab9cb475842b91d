#ifndef TFE_ODE_HPP
#define TFE_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tfe {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-300;
  double initial_step = 0.0;  // 0 picks a default from the span
  std::size_t max_steps = 5'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) integrator.
///
/// `rhs(t, y, dydt)` evaluates the vector field. The solution is reported at
/// each requested output time (ascending, within [t0, t1]); the step is
/// truncated to land on output times exactly, so no interpolation error is
/// added.
template <class Rhs>
std::vector<std::vector<double>> dormand_prince(Rhs&& rhs, double t0, std::vector<double> y,
                                                std::span<const double> outputs,
                                                const OdeOptions& opt = {},
                                                OdeStats* stats = nullptr) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b_hat (fifth minus embedded fourth order weights).
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const std::size_t n = y.size();
  std::vector<std::vector<double>> result;
  result.reserve(outputs.size());
  if (outputs.empty()) return result;
  if (!std::is_sorted(outputs.begin(), outputs.end()) || outputs.front() < t0) {
    throw std::invalid_argument("dormand_prince: output times must be ascending and >= t0");
  }

  std::array<std::vector<double>, 7> k;
  for (auto& v : k) v.assign(n, 0.0);
  std::vector<double> tmp(n), y_new(n);

  double t = t0;
  const double span = outputs.back() - t0;
  double h = opt.initial_step > 0.0 ? opt.initial_step : std::max(span * 1e-6, 1e-12);
  rhs(t, y, k[0]);

  std::size_t steps = 0;
  OdeStats local;
  std::size_t next = 0;
  while (next < outputs.size() && outputs[next] == t) result.push_back(y), ++next;

  while (next < outputs.size()) {
    if (++steps > opt.max_steps) {
      throw IntegrationError("dormand_prince: step limit exceeded (stiff system?)");
    }
    const double target = outputs[next];
    const double proposal = h;
    bool lands = false;
    if (t + h >= target) {
      h = target - t;
      lands = true;
    }

    auto stage = [&](std::size_t out, double ct, std::initializer_list<double> coef) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        std::size_t j = 0;
        for (double c : coef) acc += c * k[j++][i];
        tmp[i] = y[i] + h * acc;
      }
      rhs(t + ct * h, tmp, k[out]);
    };
    stage(1, c2, {a21});
    stage(2, c3, {a31, a32});
    stage(3, c4, {a41, a42, a43});
    stage(4, c5, {a51, a52, a53, a54});
    stage(5, 1.0, {a61, a62, a63, a64, a65});
    for (std::size_t i = 0; i < n; ++i) {
      y_new[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] +
                             b6 * k[5][i]);
    }
    rhs(t + h, y_new, k[6]);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                            e6 * k[5][i] + e7 * k[6][i]);
      const double sc = opt.atol + opt.rtol * std::max(std::fabs(y[i]), std::fabs(y_new[i]));
      // Max norm: squaring e / sc would overflow for an atol near zero.
      err = std::max(err, std::fabs(e) / sc);
    }
    if (!std::isfinite(err)) throw IntegrationError("dormand_prince: non-finite error estimate");

    if (err <= 1.0) {
      t = lands ? target : t + h;
      y.swap(y_new);
      k[0].swap(k[6]);  // first-same-as-last
      ++local.accepted;
      while (next < outputs.size() && outputs[next] <= t) result.push_back(y), ++next;
      const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
      h = lands ? std::max(proposal, h * grow) : h * grow;
    } else {
      ++local.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.25));
      if (h < 1e-300) throw IntegrationError("dormand_prince: step size underflow");
    }
  }
  if (stats) *stats = local;
  return result;
}

}  // namespace tfe

#endif  // TFE_ODE_HPP
