#include "tfe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

namespace tfe {

namespace {

// Taylor coefficients in x = mu t, from the leading power upward; the closed forms
// cancel catastrophically for x < 1.
// mu^3 E[xi u^2], from x^3.
constexpr double xi_u2_series[] = {
    1.1666666666666667, -2.1666666666666665, 2.2999999999999998, -1.7777777777777777,
    1.1015873015873017, -0.57619047619047614, 0.26261022927689592, -0.10652557319223986,
    0.039037999037999038, -0.01306824862380418, 0.0040303729192618081, -0.0011529916291821054,
    0.0003076742970922865, -7.6946764777452607e-05, 1.8108667968611945e-05,
    -4.0245681218119576e-06, 8.4732437036581565e-07, -1.6946983055063715e-07,
    3.2280465424049907e-08, -5.869223109351287e-09, 1.020738793795557e-09,
    -1.7012351086583063e-10, 2.7219793375882057e-11, -4.1876630570105186e-12,
    6.2039472264199186e-13, -8.8627832047520838e-14, 1.2224529598107039e-14,
    -1.629937351599488e-15, 2.1031450177940996e-16
};

// mu^5 E Z, from x^5.
constexpr double ez_series[] = {
    0.11666666666666667, -0.14444444444444443, 0.10952380952380952, -0.063492063492063489,
    0.030599647266313933, -0.012804232804232804, 0.0047747314413981081, -0.0016140238362460585,
    0.00050048716715383383, -0.00014360712773411186, 3.8384503992969602e-05,
    -9.6082635765175456e-06, 2.2623110080315186e-06, -5.0292003122518044e-07,
    1.0589864309129793e-07, -2.1181937483220829e-08, 4.0348779541229314e-09,
    -7.3363563008933823e-10, 1.2759077242707475e-10, -2.1265301120837998e-11,
    3.40246264598519e-12, -5.234569565102481e-13, 7.7549268877156858e-14, -1.1078473695795022e-14,
    1.5280658193152509e-15, -2.0374214263797894e-16, 2.6289310963671054e-17
};

// mu^10 Var Z, from x^10.
constexpr double var_z_series[] = {
    0.10991181657848324, -0.29202501202501202, 0.42258243813799368, -0.43842050953162065,
    0.36336702685909034, -0.2547079101576456, 0.15634077151537468, -0.085997082259765115,
    0.043091009986607733, -0.019908545509286651, 0.0085598380335382609, -0.0034500610377570821,
    0.0013111834408426986, -0.00047212164631503148, 0.00016170568992818159,
    -5.286065423242431e-05, 1.6539256985941948e-05, -4.9652903584483469e-06,
    1.4333386984250901e-06, -3.9860757347059767e-07, 1.0696910348455561e-07,
    -2.7741697797843015e-08, 6.962258776249998e-09, -1.6929152923587596e-09,
    3.9927018989073262e-10, -9.1428935531194322e-11, 2.0346489731545847e-11,
    -4.4041113011442314e-12, 9.279780834021991e-13, -1.9048132685809819e-13,
    3.8115932985761199e-14, -7.4402271023230324e-15, 1.4176240535618415e-15,
    -2.6380698503674124e-16, 4.7973748498638979e-17, -8.5298792976984385e-18
};

// sum_i c[i] x^i by Horner.
template <std::size_t N>
double series(const double (&c)[N], double x) {
  double s = 0.0;
  for (std::size_t i = N; i-- > 0;) s = s * x + c[i];
  return s;
}

}  // namespace

double gaussian_even_moment(double mu, double t, int n) {
  if (n < 1) throw std::invalid_argument("gaussian_even_moment: n >= 1 required");
  double dfact = 1.0;
  for (int j = 2 * n - 1; j > 1; j -= 2) dfact *= j;
  const double var = -std::expm1(-2.0 * mu * t) / (2.0 * mu);
  return dfact * std::pow(var, n);
}

double exact_E_xi_u2(double mu, double t) {
  if (std::fabs(mu * t) < 1.0) return series(xi_u2_series, mu * t) * t * t * t;
  const double e2 = std::exp(-2.0 * mu * t);
  const double one_minus = -std::expm1(-2.0 * mu * t);
  const double mu2 = mu * mu;
  const double mu3 = mu2 * mu;
  return one_minus / (8.0 * mu3) - 5.0 * t * e2 / (4.0 * mu2) +
         3.0 * one_minus * e2 / (8.0 * mu3) + t / (4.0 * mu2);
}

double exact_E_Z(double mu, double T) {
  if (std::fabs(mu * T) < 1.0) return series(ez_series, mu * T) * std::pow(T, 5);
  const double e2 = std::exp(-2.0 * mu * T);
  const double e4 = e2 * e2;
  const double mu2 = mu * mu;
  const double mu3 = mu2 * mu;
  const double mu4 = mu3 * mu;
  const double mu5 = mu4 * mu;
  return (35.0 - 3.0 * e4 - 32.0 * e2) / (64.0 * mu5) - (9.0 * T + 10.0 * T * e2) / (16.0 * mu4) +
         T * T / (8.0 * mu3) + T * T * T / (12.0 * mu2);
}

double exact_Var_Z(double mu, double T) {
  if (std::fabs(mu * T) < 1.0) return series(var_z_series, mu * T) * std::pow(T, 10);
  const double e2 = std::exp(-2.0 * mu * T);
  const double e4 = e2 * e2;
  const double e6 = e4 * e2;
  const double e8 = e4 * e4;
  const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
  const double m5 = std::pow(mu, 5), m6 = m5 * mu, m7 = m6 * mu, m8 = m7 * mu, m9 = m8 * mu,
               m10 = m9 * mu;
  const double p10 = -16917.0 / 512.0 + 3.0 * e8 / 128.0 + 79.0 * e6 / 128.0 +
                     2953.0 * e4 / 512.0 + 3409.0 * e2 / 128.0;
  const double p9 = T * (1093.0 / 32.0 + 45.0 * e6 / 64.0 + 1165.0 * e4 / 128.0 +
                         2321.0 * e2 / 64.0);
  const double p8 = T2 * (-659.0 / 64.0 + 53.0 * e4 / 16.0 + 71.0 * e2 / 8.0);
  const double p7 = T3 * (-5.0 / 12.0 - 5.0 * e4 / 8.0 - 113.0 * e2 / 24.0);
  const double p6 = T4 * (23.0 / 48.0 - 5.0 * e2 / 2.0);
  const double p5 = T5 / 15.0;
  return p10 / m10 + p9 / m9 + p8 / m8 + p7 / m7 + p6 / m6 + p5 / m5;
}

MomentPrediction leading_moments(double mu, double s, double u0, double T) {
  MomentPrediction p;
  p.regime = MomentRegime::leading_order;
  p.mu = mu;
  p.T = T;
  p.u0 = u0;
  const double u2 = u0 * u0, u4 = u2 * u2, u6 = u4 * u2;
  const double s2 = s * s, s4 = s2 * s2, s6 = s4 * s2, s8 = s4 * s4;
  const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
  const double mu2 = mu * mu, mu3 = mu2 * mu, mu5 = mu3 * mu2;
  p.E_Z = (u4 * T / 4.0 + s2 * u2 * T2 / 4.0 + s4 * T3 / 12.0) / mu2;
  const double var_core =
      s2 * u6 * T2 / 2.0 + 2.0 * s4 * u4 * T3 / 3.0 + s6 * u2 * T4 / 3.0 + s8 * T5 / 15.0;
  p.Var_Z = var_core / mu5;
  p.E_A = (s2 * u2 * T + s4 * T2 / 2.0) / mu2;
  p.Var_A = var_core / mu3;
  return p;
}

MomentPrediction leading_moments(const SpdeModel& model, std::size_t k, double theta, double T) {
  MomentPrediction p =
      leading_moments(model.mu(k, theta), model.noise_scale(k), model.u0(k), T);
  p.k = k;
  p.lambda = model.lambda(k);
  p.sigma = model.sigma();
  return p;
}

// ---------------------------------------------------------------------------

MomentSystem::MomentSystem(std::vector<Monomial> targets, double mu, double s, double u0)
    : u0_(u0) {
  std::set<Monomial> seen;
  std::queue<Monomial> pending;
  for (const Monomial& m : targets) {
    if (m.c < 0 || m.x < 0 || m.y < 0 || m.a < 0 || m.b < 0) {
      throw std::invalid_argument("MomentSystem: negative exponent");
    }
    if (seen.insert(m).second) pending.push(m);
  }
  auto visit = [&](const Monomial& m) {
    if (seen.insert(m).second) pending.push(m);
  };
  while (!pending.empty()) {
    const Monomial m = pending.front();
    pending.pop();
    if (m.c) visit({m.c - 1, m.x, m.y, m.a + 2, m.b});
    if (m.x) visit({m.c, m.x - 1, m.y, m.a + 1, m.b});
    if (m.y) visit({m.c, m.x, m.y - 1, m.a + 1, m.b});
    if (m.a) visit({m.c, m.x, m.y, m.a - 1, m.b + 2});
    if (m.b >= 2) visit({m.c, m.x, m.y, m.a, m.b - 2});
  }
  states_.assign(seen.begin(), seen.end());  // std::set order is lexicographic

  rows_.resize(states_.size());
  const double s2 = s * s;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const Monomial& m = states_[i];
    auto& row = rows_[i];
    if (m.c) row.push_back({index({m.c - 1, m.x, m.y, m.a + 2, m.b}), double(m.c), false});
    if (m.x) row.push_back({index({m.c, m.x - 1, m.y, m.a + 1, m.b}), double(m.x), true});
    if (m.y) row.push_back({index({m.c, m.x, m.y - 1, m.a + 1, m.b}), double(m.y), false});
    if (m.a) row.push_back({index({m.c, m.x, m.y, m.a - 1, m.b + 2}), double(m.a), false});
    if (m.b >= 2 && s2 != 0.0) {
      row.push_back({index({m.c, m.x, m.y, m.a, m.b - 2}), 0.5 * m.b * (m.b - 1) * s2, false});
    }
    if (m.b) row.push_back({i, -m.b * mu, false});
  }
}

std::size_t MomentSystem::index(const Monomial& m) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), m);
  if (it == states_.end() || *it != m) throw std::out_of_range("MomentSystem: unknown monomial");
  return static_cast<std::size_t>(it - states_.begin());
}

std::vector<double> MomentSystem::initial_state() const {
  std::vector<double> y(states_.size(), 0.0);
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const Monomial& m = states_[i];
    if (m.c == 0 && m.x == 0 && m.y == 0 && m.a == 0) y[i] = std::pow(u0_, m.b);
  }
  return y;
}

void MomentSystem::rhs(double t, const std::vector<double>& y, std::vector<double>& dydt) const {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    double acc = 0.0;
    for (const Term& term : rows_[i]) {
      acc += (term.times_t ? term.coef * t : term.coef) * y[term.col];
    }
    dydt[i] = acc;
  }
}

std::vector<std::vector<double>> MomentSystem::solve(const std::vector<double>& times,
                                                     const OdeOptions& opt,
                                                     OdeStats* stats) const {
  auto f = [this](double t, const std::vector<double>& y, std::vector<double>& dy) {
    rhs(t, y, dy);
  };
  return dormand_prince(f, 0.0, initial_state(), times, opt, stats);
}

MomentTable moment_ode(double mu, double s, double u0, int a_max, int b_max, double T,
                       std::size_t samples, const OdeOptions& opt) {
  if (a_max < 0 || b_max < 0) throw std::invalid_argument("moment_ode: negative order");
  if (2 * a_max + b_max > 16) throw std::invalid_argument("moment_ode: order too large");
  if (!(T > 0.0) || samples < 1) throw std::invalid_argument("moment_ode: bad time grid");

  std::vector<Monomial> targets;
  for (int a = 0; a <= a_max; ++a) {
    for (int b = 0; b <= b_max; ++b) targets.push_back({0, 0, 0, a, b});
  }
  if (a_max >= 2) targets.push_back({1, 0, 0, 0, 0});
  const MomentSystem sys(targets, mu, s, u0);

  MomentTable table;
  table.a_max = a_max;
  table.b_max = b_max;
  for (std::size_t i = 0; i <= samples; ++i) {
    table.t.push_back(T * static_cast<double>(i) / static_cast<double>(samples));
  }
  table.t.back() = T;
  const auto sol = sys.solve(table.t, opt);
  for (const auto& row : sol) {
    std::vector<double> v;
    v.reserve(targets.size());
    for (int a = 0; a <= a_max; ++a) {
      for (int b = 0; b <= b_max; ++b) v.push_back(row[sys.index({0, 0, 0, a, b})]);
    }
    table.values.push_back(std::move(v));
  }
  if (a_max >= 2) table.E_Z = sol.back()[sys.index({1, 0, 0, 0, 0})];
  return table;
}

namespace {

// E Z, Var Z, E A, Var A of one mode at each of the ascending `times`, with
// A = xi^2/2 - u0^2 Y - s^2 X + 2 mu Z.
std::vector<MomentPrediction> moments_at(double mu, double s, double u0,
                                         const std::vector<double>& times,
                                         const OdeOptions& opt) {
  struct Part {
    Monomial m;
    double w;
  };
  std::vector<Part> parts = {{{0, 0, 0, 2, 0}, 0.5}, {{0, 1, 0, 0, 0}, -s * s},
                             {{1, 0, 0, 0, 0}, 2.0 * mu}};
  if (u0 != 0.0) parts.push_back({{0, 0, 1, 0, 0}, -u0 * u0});

  auto product = [](const Monomial& p, const Monomial& q) {
    return Monomial{p.c + q.c, p.x + q.x, p.y + q.y, p.a + q.a, p.b + q.b};
  };
  std::vector<Monomial> targets;
  for (const Part& p : parts) {
    targets.push_back(p.m);
    for (const Part& q : parts) targets.push_back(product(p.m, q.m));
  }
  const MomentSystem sys(targets, mu, s, u0);
  const auto sol = sys.solve(times, opt);

  std::vector<MomentPrediction> out;
  out.reserve(times.size());
  const Monomial Z{1, 0, 0, 0, 0};
  for (std::size_t i = 0; i < times.size(); ++i) {
    auto E = [&](const Monomial& m) { return sol[i][sys.index(m)]; };
    MomentPrediction p;
    p.regime = MomentRegime::moment_ode;
    p.mu = mu;
    p.T = times[i];
    p.u0 = u0;
    p.E_Z = E(Z);
    p.Var_Z = std::max(0.0, E(product(Z, Z)) - p.E_Z * p.E_Z);
    double ea = 0.0, ea2 = 0.0;
    for (const Part& a : parts) {
      ea += a.w * E(a.m);
      for (const Part& b : parts) ea2 += a.w * b.w * E(product(a.m, b.m));
    }
    p.E_A = ea;
    p.Var_A = std::max(0.0, ea2 - ea * ea);
    out.push_back(p);
  }
  return out;
}

}  // namespace

MomentPrediction exact_moments(double mu, double s, double u0, double T, const OdeOptions& opt) {
  return moments_at(mu, s, u0, {T}, opt).front();
}

std::vector<MomentPrediction> exact_moments_zero_start(std::span<const double> mu,
                                                       std::span<const double> s, double T,
                                                       const OdeOptions& opt) {
  if (mu.size() != s.size()) throw std::invalid_argument("exact_moments_zero_start: size mismatch");
  std::vector<std::size_t> order(mu.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!(mu[i] > 0.0)) throw std::domain_error("exact_moments_zero_start: mu must be positive");
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return mu[i] < mu[j]; });
  std::vector<double> tau;
  tau.reserve(order.size());
  for (std::size_t i : order) tau.push_back(mu[i] * T);
  std::vector<MomentPrediction> out(mu.size());
  if (tau.empty()) return out;
  const auto unit = moments_at(1.0, 1.0, 0.0, tau, opt);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t i = order[r];
    const double m = mu[i];
    const double s4 = s[i] * s[i] * s[i] * s[i];
    const double m4 = m * m * m * m;
    MomentPrediction p = unit[r];
    p.mu = m;
    p.T = T;
    p.E_Z = s4 / (m4 * m) * unit[r].E_Z;
    p.Var_Z = s4 * s4 / (m4 * m4 * m * m) * unit[r].Var_Z;
    p.E_A = s4 / m4 * unit[r].E_A;
    p.Var_A = s4 * s4 / (m4 * m4) * unit[r].Var_A;
    out[i] = p;
  }
  return out;
}

MomentPrediction exact_moments(const SpdeModel& model, std::size_t k, double theta, double T,
                               const OdeOptions& opt) {
  MomentPrediction p = exact_moments(model.mu(k, theta), model.noise_scale(k), model.u0(k), T, opt);
  p.k = k;
  p.lambda = model.lambda(k);
  p.sigma = model.sigma();
  return p;
}

}  // namespace tfe
