#include "tfe/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace tfe {

using nlohmann::json;

std::string to_string(BiasMode m) {
  switch (m) {
    case BiasMode::moment: return "moment";
    case BiasMode::exact: return "exact";
    case BiasMode::leading: return "leading";
    case BiasMode::plugin: return "plugin";
  }
  return "moment";
}

BiasMode parse_bias_mode(const std::string& s) {
  if (s == "moment") return BiasMode::moment;
  if (s == "exact") return BiasMode::exact;
  if (s == "leading") return BiasMode::leading;
  if (s == "plugin") return BiasMode::plugin;
  throw std::invalid_argument("unknown bias mode '" + s + "'");
}

SpdeModel ModelSpec::build() const {
  if (family == "fractional_heat") {
    return fractional_heat_model(d, beta, gamma, sigma, theta, c1, exact_1d, theta_domain, u0);
  }
  if (family == "lower_order") {
    if (gamma != 0.0) throw std::invalid_argument("lower_order model requires gamma = 0");
    return lower_order_model(d, sigma, theta, c1, exact_1d, theta_domain, u0);
  }
  throw std::invalid_argument("unknown model family '" + family + "'");
}

std::vector<std::size_t> default_checkpoints(std::size_t N_max) {
  std::vector<std::size_t> out;
  for (std::size_t n = 25; n < N_max; n *= 2) out.push_back(n);
  if (N_max >= 1) out.push_back(N_max);
  return out;
}

std::vector<std::size_t> ExperimentConfig::resolved_checkpoints() const {
  return checkpoints ? *checkpoints : default_checkpoints(N_max);
}

void ExperimentConfig::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  if (N_max < 1) throw std::invalid_argument("N_max must be at least 1");
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  if (!(ks_alpha > 0.0 && ks_alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
  if (step_policy.min_steps < 2 || step_policy.max_steps < step_policy.min_steps) {
    throw std::invalid_argument("step policy needs 2 <= min_steps <= max_steps");
  }
  if (!(model.theta_domain.lo > 0.0) || model.theta_domain.hi < model.theta_domain.lo) {
    throw std::invalid_argument("theta_domain must satisfy 0 < lo <= hi");
  }
  std::size_t prev = 0;
  for (std::size_t c : resolved_checkpoints()) {
    if (c <= prev || c > N_max) {
      throw std::invalid_argument("checkpoints must be strictly increasing within [1, N_max]");
    }
    prev = c;
  }
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const char* where) {
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) {
      throw std::invalid_argument(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

const std::set<std::string> model_keys = {"family", "d",  "beta",     "gamma",        "sigma",
                                          "theta",  "c1", "exact_1d", "theta_domain", "u0"};

InitialCondition u0_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") {
    reject_unknown(j, {"kind"}, "u0");
    return InitialCondition::zero();
  }
  if (kind == "power") {
    reject_unknown(j, {"kind", "A", "p"}, "u0");
    return InitialCondition::power(j.at("A").get<double>(), j.at("p").get<double>());
  }
  if (kind == "explicit") {
    reject_unknown(j, {"kind", "values"}, "u0");
    return InitialCondition::explicit_list(j.at("values").get<std::vector<double>>());
  }
  throw std::invalid_argument("unknown u0 kind '" + kind + "'");
}

json to_json(const InitialCondition& u0) {
  switch (u0.kind) {
    case InitialCondition::Kind::zero: return {{"kind", "zero"}};
    case InitialCondition::Kind::power:
      return {{"kind", "power"}, {"A", u0.amplitude}, {"p", u0.exponent}};
    case InitialCondition::Kind::explicit_list:
      return {{"kind", "explicit"}, {"values", u0.values}};
  }
  return {{"kind", "zero"}};
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ModelSpec model_from_json(const json& j) {
  ModelSpec m;
  read(j, "family", m.family);
  read(j, "d", m.d);
  read(j, "beta", m.beta);
  read(j, "gamma", m.gamma);
  read(j, "sigma", m.sigma);
  read(j, "theta", m.theta);
  read(j, "c1", m.c1);
  read(j, "exact_1d", m.exact_1d);
  if (j.contains("theta_domain")) {
    const auto dom = j.at("theta_domain").get<std::vector<double>>();
    if (dom.size() != 2) throw std::invalid_argument("theta_domain must be [lo, hi]");
    m.theta_domain = {dom[0], dom[1]};
  }
  if (j.contains("u0")) m.u0 = u0_from_json(j.at("u0"));
  return m;
}

json to_json(const ModelSpec& m) {
  return {{"family", m.family},
          {"d", m.d},
          {"beta", m.beta},
          {"gamma", m.gamma},
          {"sigma", m.sigma},
          {"theta", m.theta},
          {"c1", m.c1},
          {"exact_1d", m.exact_1d},
          {"theta_domain", {m.theta_domain.lo, m.theta_domain.hi}},
          {"u0", to_json(m.u0)}};
}

ExperimentConfig config_from_json(const json& j) {
  std::set<std::string> known = model_keys;
  known.insert({"T", "N_max", "checkpoints", "replications", "master_seed", "step_policy",
                "out_dir", "normality", "threads", "bias_mode", "clamp_theta", "figures"});
  reject_unknown(j, known, "config");

  ExperimentConfig c;
  c.model = model_from_json(j);
  read(j, "T", c.T);
  read(j, "N_max", c.N_max);
  if (j.contains("checkpoints")) c.checkpoints = j.at("checkpoints").get<std::vector<std::size_t>>();
  read(j, "replications", c.replications);
  read(j, "master_seed", c.master_seed);
  if (j.contains("step_policy")) {
    const json& s = j.at("step_policy");
    reject_unknown(s, {"kappa", "min_steps", "max_steps"}, "step_policy");
    read(s, "kappa", c.step_policy.kappa);
    read(s, "min_steps", c.step_policy.min_steps);
    read(s, "max_steps", c.step_policy.max_steps);
  }
  read(j, "out_dir", c.out_dir);
  if (j.contains("normality")) {
    const json& n = j.at("normality");
    reject_unknown(n, {"alpha"}, "normality");
    read(n, "alpha", c.ks_alpha);
  }
  read(j, "threads", c.threads);
  if (j.contains("bias_mode")) c.bias_mode = parse_bias_mode(j.at("bias_mode").get<std::string>());
  read(j, "clamp_theta", c.clamp_theta);
  read(j, "figures", c.figures);
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j = to_json(c.model);
  j["T"] = c.T;
  j["N_max"] = c.N_max;
  j["checkpoints"] = c.resolved_checkpoints();
  j["replications"] = c.replications;
  j["master_seed"] = c.master_seed;
  j["step_policy"] = {{"kappa", c.step_policy.kappa},
                      {"min_steps", c.step_policy.min_steps},
                      {"max_steps", c.step_policy.max_steps}};
  j["out_dir"] = c.out_dir;
  j["normality"] = {{"alpha", c.ks_alpha}};
  j["threads"] = c.threads;
  j["bias_mode"] = to_string(c.bias_mode);
  j["clamp_theta"] = c.clamp_theta;
  j["figures"] = c.figures;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace tfe
