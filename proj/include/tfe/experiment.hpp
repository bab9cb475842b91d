#ifndef TFE_EXPERIMENT_HPP
#define TFE_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tfe/config.hpp"
#include "tfe/estimator.hpp"
#include "tfe/model.hpp"

namespace tfe {

struct ReplicationRecord {
  std::size_t rep = 0;
  TfeResult result;
  bool failed = false;
  std::string error;
  std::uint64_t first_seed = 0;  // derive_seed(master, rep, 1)
  std::size_t total_steps = 0;
  double wall_seconds = 0.0;
};

struct CheckpointSummary {
  std::size_t n = 0;
  std::size_t count = 0;  // replications that contributed
  double a = 0.0;         // mean over replications for the plug-in mode
  double b = 0.0;
  double mean_error = 0.0;  // of theta_hat - theta
  double median_error = 0.0;
  double mad_error = 0.0;
  double median_abs_error = 0.0;
  double stat_mean = 0.0;
  double stat_variance = 0.0;
  double ks = 0.0;
  double ks_critical = 0.0;
  bool ks_pass = false;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::size_t> checkpoints;
  BiasScale bias;  // at the true theta; empty in plug-in mode
  std::vector<ReplicationRecord> replications;  // sorted by rep
  std::vector<CheckpointSummary> summaries;
  std::size_t failed = 0;
  ConditionReport conditions;
  double wall_seconds = 0.0;
};

/// Functionals of modes 1..N of replication `rep`, mode k drawn from the
/// stream derive_seed(master_seed, rep, k) with the configured step policy.
std::vector<ModeFunctionals> simulate_replication(const ExperimentConfig& config,
                                                  const SpdeModel& model, std::size_t rep,
                                                  std::size_t N);

/// Bias/scale at the true theta for the configured mode (not plug-in).
BiasScale true_bias_scale(const ExperimentConfig& config, const SpdeModel& model,
                          std::span<const std::size_t> checkpoints);

/// Runs every replication on a pool of config.threads workers. The result
/// depends only on the configuration, never on the schedule.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// summary.json, replications.csv, checkpoints.csv, replication_meta.csv
/// and, unless disabled, figures/*.svg under `dir`.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

/// Writes the figures for the result into `dir` and returns the files
/// written; nothing is written for an empty checkpoint set.
std::vector<std::filesystem::path> emit_figures(const ExperimentResult& result,
                                                const std::filesystem::path& dir);

}  // namespace tfe

#endif  // TFE_EXPERIMENT_HPP
