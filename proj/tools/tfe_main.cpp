// Command line front end: simulate, estimate, experiment, oracle-check,
// conditions.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tfe/config.hpp"
#include "tfe/csv.hpp"
#include "tfe/estimator.hpp"
#include "tfe/experiment.hpp"
#include "tfe/oracle.hpp"
#include "tfe/random.hpp"
#include "tfe/simulate.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> modes;
  std::optional<std::size_t> reps;
  std::optional<std::string> checkpoints;
  std::optional<std::string> bias_mode;
  bool clamp_theta = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON experiment/model config")->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--out-dir", f.out_dir, "Output directory");
  app->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--modes", f.modes, "Number of Fourier modes N")->check(CLI::PositiveNumber);
  app->add_option("--reps", f.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
  app->add_option("--checkpoints", f.checkpoints, "Comma separated prefixes n, or 'none'");
  app->add_option("--bias-mode", f.bias_mode, "moment, exact, leading or plugin")
      ->check(CLI::IsMember({"moment", "exact", "leading", "plugin"}));
  app->add_flag("--clamp-theta", f.clamp_theta, "Clamp estimates to the admissible interval");
}

std::vector<std::size_t> parse_list(const std::string& s) {
  std::vector<std::size_t> out;
  if (s == "none" || s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoul(item));
  return out;
}

tfe::ExperimentConfig resolve(const CommonFlags& f) {
  tfe::ExperimentConfig c = f.config.empty() ? tfe::ExperimentConfig{} : tfe::load_config(f.config);
  if (f.seed) c.master_seed = *f.seed;
  if (f.out_dir) c.out_dir = *f.out_dir;
  if (f.threads) c.threads = *f.threads;
  if (f.modes) {
    c.N_max = *f.modes;
    if (!f.checkpoints && c.checkpoints) {
      std::erase_if(*c.checkpoints, [&](std::size_t n) { return n > c.N_max; });
    }
  }
  if (f.reps) c.replications = *f.reps;
  if (f.checkpoints) c.checkpoints = parse_list(*f.checkpoints);
  if (f.bias_mode) c.bias_mode = tfe::parse_bias_mode(*f.bias_mode);
  if (f.clamp_theta) c.clamp_theta = true;
  c.validate();
  return c;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

int cmd_simulate(const CommonFlags& f, std::size_t rep, bool dump_paths) {
  const tfe::ExperimentConfig c = resolve(f);
  const tfe::SpdeModel model = c.model.build();
  fs::create_directories(c.out_dir);
  const fs::path dir(c.out_dir);
  if (dump_paths) {
    std::vector<tfe::ModePath> paths;
    std::vector<tfe::ModeFunctionals> funcs;
    const double theta = model.theta_true();
    for (std::size_t k = 1; k <= c.N_max; ++k) {
      tfe::NormalStream rng(tfe::derive_seed(c.master_seed, rep, k));
      const std::size_t steps = c.step_policy.steps(model.mu(k, theta), c.T);
      paths.push_back(tfe::simulate_mode(model, k, theta, c.T, steps, rng));
      funcs.push_back(tfe::functionals(paths.back()));
    }
    auto out = open_out(dir / "paths.csv");
    tfe::write_path_csv(out, paths);
    auto fout = open_out(dir / "functionals.csv");
    tfe::write_functionals_csv(fout, funcs);
  } else {
    const auto funcs = tfe::simulate_replication(c, model, rep, c.N_max);
    auto out = open_out(dir / "functionals.csv");
    tfe::write_functionals_csv(out, funcs);
  }
  std::cout << "wrote " << (dir / "functionals.csv").string() << '\n';
  return 0;
}

int cmd_estimate(const CommonFlags& f, const std::string& input) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open " + input);
  const auto funcs = tfe::read_functionals_csv(in);
  if (funcs.empty()) throw std::runtime_error(input + ": no modes");
  CommonFlags g = f;
  if (!g.modes) g.modes = funcs.size();
  const tfe::ExperimentConfig c = resolve(g);
  if (c.N_max > funcs.size()) throw std::runtime_error("--modes exceeds the modes in the file");
  const tfe::SpdeModel model = c.model.build();
  const auto cps = c.resolved_checkpoints();
  if (cps.empty()) return 0;
  tfe::TfeResult r = tfe::tfe(funcs, model, cps, {c.clamp_theta});
  if (c.bias_mode == tfe::BiasMode::plugin) {
    tfe::BiasScale bs;
    for (std::size_t i = 0; i < cps.size(); ++i) {
      const auto& dom = model.theta_domain();
      const auto [a, b] = tfe::bias_scale_exact(model, std::clamp(r.theta_hat[i], dom.lo, dom.hi),
                                                cps[i], c.T);
      bs.checkpoints.push_back(cps[i]);
      bs.a.push_back(a);
      bs.b.push_back(b);
    }
    tfe::attach_bias_scale(r, bs);
  } else {
    tfe::attach_bias_scale(r, tfe::true_bias_scale(c, model, cps));
  }
  tfe::write_result_header(std::cout);
  tfe::write_result_rows(std::cout, 0, r);
  return 0;
}

int cmd_experiment(const CommonFlags& f) {
  const tfe::ExperimentConfig c = resolve(f);
  const tfe::ExperimentResult r = tfe::run_experiment(c);
  tfe::write_experiment(r, c.out_dir);
  std::cout << "replications " << r.replications.size() << ", failed " << r.failed << ", "
            << r.wall_seconds << " s\n";
  std::cout << "n,median_abs_error,stat_mean,stat_variance,ks,ks_critical\n";
  for (const auto& s : r.summaries) {
    std::cout << s.n << ',' << tfe::format_double(s.median_abs_error) << ','
              << tfe::format_double(s.stat_mean) << ',' << tfe::format_double(s.stat_variance)
              << ',' << tfe::format_double(s.ks) << ',' << tfe::format_double(s.ks_critical)
              << '\n';
  }
  return 0;
}

int cmd_oracle_check(const std::vector<double>& mus, double T) {
  std::cout << "mu,T,E_Z_closed,E_Z_ode,Var_Z_closed,Var_Z_ode,rel_err\n";
  for (double mu : mus) {
    const double ez = tfe::exact_E_Z(mu, T);
    const double vz = tfe::exact_Var_Z(mu, T);
    const tfe::MomentPrediction p = tfe::exact_moments(mu, 1.0, 0.0, T);
    const double rel = std::max(std::fabs(ez - p.E_Z) / ez, std::fabs(vz - p.Var_Z) / vz);
    std::cout << tfe::format_double(mu) << ',' << tfe::format_double(T) << ','
              << tfe::format_double(ez) << ',' << tfe::format_double(p.E_Z) << ','
              << tfe::format_double(vz) << ',' << tfe::format_double(p.Var_Z) << ','
              << tfe::format_double(rel) << '\n';
  }
  return 0;
}

int cmd_conditions(const CommonFlags& f, std::size_t K) {
  const tfe::ExperimentConfig c = resolve(f);
  const tfe::SpdeModel model = c.model.build();
  const tfe::ConditionReport rep = tfe::check_divergence(model, model.theta_true(), K);
  const tfe::AssumptionReport as = tfe::check_assumptions(model, K);
  nlohmann::json j = {{"consistency", tfe::to_string(rep.consistency_diverges)},
                      {"normality", tfe::to_string(rep.normality_diverges)},
                      {"consistency_growth", rep.consistency_growth},
                      {"normality_growth", rep.normality_growth}};
  if (rep.exponent_verdict) {
    j["consistency_exponent"] = rep.exponent_verdict->consistency_exponent;
    j["normality_exponent"] = rep.exponent_verdict->normality_exponent;
  }
  nlohmann::json sums = nlohmann::json::array();
  for (const auto& p : rep.partial_sums) sums.push_back({p.K, p.consistency, p.normality});
  j["partial_sums"] = sums;
  j["assumptions"] = {{"ok", as.ok()},
                      {"c0_empirical", as.c0_empirical},
                      {"first_positive_index", as.first_positive_index},
                      {"u0_sq_partial_sum", as.u0_sq_partial_sum},
                      {"violations", as.violations},
                      {"warnings", as.warnings}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral SPDE simulator and trajectory fitting estimator"};
  app.require_subcommand(1);

  CommonFlags sim_flags, est_flags, exp_flags, cond_flags;

  auto* sim = app.add_subcommand("simulate", "Simulate one replication and dump functionals");
  add_common(sim, sim_flags);
  std::size_t sim_rep = 0;
  bool dump_paths = false;
  sim->add_option("--rep", sim_rep, "Replication index for seeding");
  sim->add_flag("--paths", dump_paths, "Also write paths.csv (k,t,u,xi)");

  auto* est = app.add_subcommand("estimate", "TFE from a functionals CSV");
  add_common(est, est_flags);
  std::string input;
  est->add_option("--functionals", input, "Functionals CSV")->required()->check(CLI::ExistingFile);

  auto* exp = app.add_subcommand("experiment", "Monte Carlo study");
  add_common(exp, exp_flags);

  auto* orc = app.add_subcommand("oracle-check", "Closed-form moments against the moment ODE");
  std::vector<double> mus = {0.5, 2.0, 10.0};
  double T = 1.0;
  orc->add_option("--mu", mus, "Decay rates")->delimiter(',');
  orc->add_option("--T", T, "Horizon")->check(CLI::PositiveNumber);

  auto* cond = app.add_subcommand("conditions", "Divergence and assumption report");
  add_common(cond, cond_flags);
  std::size_t K = 10000;
  cond->add_option("--K", K, "Prefix length")->check(CLI::Range(10ul, 100000000ul));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(sim_flags, sim_rep, dump_paths);
    if (*est) return cmd_estimate(est_flags, input);
    if (*exp) return cmd_experiment(exp_flags);
    if (*orc) return cmd_oracle_check(mus, T);
    if (*cond) return cmd_conditions(cond_flags, K);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
