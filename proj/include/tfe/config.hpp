#ifndef TFE_CONFIG_HPP
#define TFE_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfe/model.hpp"
#include "tfe/simulate.hpp"

namespace tfe {

/// Which moments feed a_n and b_n.
///   moment  - exact per-mode moments from the Ito recursion, true theta
///   exact   - large-k expansions with all initial-condition terms, true theta
///   leading - leading-order sums, true theta
///   plugin  - large-k expansions at the estimate itself (experimental)
enum class BiasMode { moment, exact, leading, plugin };

std::string to_string(BiasMode m);
BiasMode parse_bias_mode(const std::string& s);

/// Serializable model description.
struct ModelSpec {
  std::string family = "fractional_heat";  // or "lower_order"
  int d = 1;
  double beta = 0.25;
  double gamma = 0.0;
  double sigma = 1.0;
  double theta = 1.0;
  double c1 = 1.0;
  bool exact_1d = true;
  ThetaDomain theta_domain;
  InitialCondition u0;

  [[nodiscard]] SpdeModel build() const;
};

struct ExperimentConfig {
  ModelSpec model;
  double T = 1.0;
  std::size_t N_max = 100;
  /// Unset means the default geometric grid.
  std::optional<std::vector<std::size_t>> checkpoints;
  std::size_t replications = 1;
  std::uint64_t master_seed = 0;
  StepPolicy step_policy;
  std::string out_dir = "out";
  double ks_alpha = 0.01;
  std::size_t threads = 1;
  BiasMode bias_mode = BiasMode::moment;
  bool clamp_theta = false;
  bool figures = true;

  /// Explicit checkpoints, or {25, 50, 100, ...} below N_max followed by N_max.
  [[nodiscard]] std::vector<std::size_t> resolved_checkpoints() const;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

std::vector<std::size_t> default_checkpoints(std::size_t N_max);

ModelSpec model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ModelSpec& m);

/// Harness fields sit next to the model fields at top level. Unknown keys
/// are rejected so typos do not pass silently.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace tfe

#endif  // TFE_CONFIG_HPP
