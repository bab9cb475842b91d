#include "tfe/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "tfe/csv.hpp"
#include "tfe/random.hpp"
#include "tfe/simulate.hpp"
#include "tfe/stats.hpp"
#include "tfe/svg.hpp"

namespace tfe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

ReplicationRecord run_replication(const ExperimentConfig& config, const SpdeModel& model,
                                  std::span<const std::size_t> checkpoints,
                                  const BiasScale& bias, std::size_t rep) {
  const auto t0 = std::chrono::steady_clock::now();
  ReplicationRecord rec;
  rec.rep = rep;
  rec.first_seed = derive_seed(config.master_seed, rep, 1);
  if (checkpoints.empty()) return rec;

  const auto funcs = simulate_replication(config, model, rep, checkpoints.back());
  for (const ModeFunctionals& f : funcs) rec.total_steps += f.steps;
  try {
    rec.result = tfe(funcs, model, checkpoints, {config.clamp_theta});
  } catch (const DegenerateDenominator& e) {
    rec.failed = true;
    rec.error = e.what();
    rec.wall_seconds = seconds_since(t0);
    return rec;
  }
  if (config.bias_mode == BiasMode::plugin) {
    BiasScale bs;
    const ThetaDomain& dom = model.theta_domain();
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
      // Expansions need mu_k > 0, so the estimate is pulled into the domain.
      const double th = std::clamp(rec.result.theta_hat[i], dom.lo, dom.hi);
      const auto [a, b] = bias_scale_exact(model, th, checkpoints[i], config.T);
      bs.checkpoints.push_back(checkpoints[i]);
      bs.a.push_back(a);
      bs.b.push_back(b);
    }
    attach_bias_scale(rec.result, bs);
  } else {
    attach_bias_scale(rec.result, bias);
  }
  rec.wall_seconds = seconds_since(t0);
  return rec;
}

CheckpointSummary summarize(const ExperimentResult& r, std::size_t i, double alpha) {
  CheckpointSummary s;
  s.n = r.checkpoints[i];
  std::vector<double> err, abs_err, stat, a, b;
  for (const ReplicationRecord& rec : r.replications) {
    if (rec.failed) continue;
    const double e = rec.result.theta_hat[i] - rec.result.theta_true;
    err.push_back(e);
    abs_err.push_back(std::fabs(e));
    a.push_back(rec.result.a[i]);
    b.push_back(rec.result.b[i]);
    if (std::isfinite(rec.result.normalized_stat[i])) stat.push_back(rec.result.normalized_stat[i]);
  }
  s.count = err.size();
  if (err.empty()) return s;
  s.a = mean(a);
  s.b = mean(b);
  s.mean_error = mean(err);
  s.median_error = median(err);
  s.mad_error = mad(err);
  s.median_abs_error = median(abs_err);
  if (!stat.empty()) {
    const KsResult ks = ks_distance(stat);
    s.stat_mean = ks.mean;
    s.stat_variance = ks.variance;
    s.ks = ks.distance;
    s.ks_critical = ks_critical(alpha, stat.size());
    s.ks_pass = s.ks < s.ks_critical;
  }
  return s;
}

json to_json(const ConditionReport& c) {
  json j = {{"consistency", to_string(c.consistency_diverges)},
            {"normality", to_string(c.normality_diverges)},
            {"consistency_growth", c.consistency_growth},
            {"normality_growth", c.normality_growth}};
  if (c.exponent_verdict) {
    j["consistency_exponent"] = c.exponent_verdict->consistency_exponent;
    j["normality_exponent"] = c.exponent_verdict->normality_exponent;
  }
  if (!c.partial_sums.empty()) {
    const PartialSum& last = c.partial_sums.back();
    j["K"] = last.K;
    j["S1"] = last.consistency;
    j["S2"] = last.normality;
  }
  return j;
}

}  // namespace

std::vector<ModeFunctionals> simulate_replication(const ExperimentConfig& config,
                                                  const SpdeModel& model, std::size_t rep,
                                                  std::size_t N) {
  std::vector<ModeFunctionals> out;
  out.reserve(N);
  const double theta = model.theta_true();
  for (std::size_t k = 1; k <= N; ++k) {
    NormalStream rng(derive_seed(config.master_seed, rep, k));
    const std::size_t steps = config.step_policy.steps(model.mu(k, theta), config.T);
    out.push_back(simulate_functionals(model, k, theta, config.T, steps, rng));
  }
  return out;
}

BiasScale true_bias_scale(const ExperimentConfig& config, const SpdeModel& model,
                          std::span<const std::size_t> checkpoints) {
  const double theta = model.theta_true();
  switch (config.bias_mode) {
    case BiasMode::moment: return bias_scale_moment(model, theta, config.T, checkpoints);
    case BiasMode::exact: return bias_scale_exact(model, theta, config.T, checkpoints);
    case BiasMode::leading: return bias_scale_leading(model, theta, config.T, checkpoints);
    case BiasMode::plugin: break;
  }
  throw std::invalid_argument("plug-in bias has no true-theta form");
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  config.validate();
  ExperimentResult r;
  r.config = config;
  r.checkpoints = config.resolved_checkpoints();
  const SpdeModel model = config.model.build();
  r.conditions = check_divergence(model, model.theta_true(), std::max<std::size_t>(10, config.N_max));
  if (config.bias_mode != BiasMode::plugin && !r.checkpoints.empty()) {
    r.bias = true_bias_scale(config, model, r.checkpoints);
  }

  const std::size_t M = config.replications;
  r.replications.resize(M);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t rep = next++; rep < M; rep = next++) {
      try {
        r.replications[rep] = run_replication(config, model, r.checkpoints, r.bias, rep);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = M;
      }
    }
  };
  const std::size_t n_threads = std::min(config.threads, M);
  std::vector<std::jthread> pool;
  for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);

  for (const ReplicationRecord& rec : r.replications) r.failed += rec.failed ? 1 : 0;
  for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
    r.summaries.push_back(summarize(r, i, config.ks_alpha));
  }
  r.wall_seconds = seconds_since(t0);
  return r;
}

void write_experiment(const ExperimentResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "replications.csv");
    write_result_header(out);
    for (const ReplicationRecord& rec : r.replications) {
      if (!rec.failed && !rec.result.theta_hat.empty()) write_result_rows(out, rec.rep, rec.result);
    }
  }
  {
    auto out = open_out(dir / "replication_meta.csv");
    out << "rep,failed,error,first_seed,total_steps,wall_seconds\n";
    for (const ReplicationRecord& rec : r.replications) {
      std::string err = rec.error;
      std::replace(err.begin(), err.end(), ',', ';');
      out << rec.rep << ',' << (rec.failed ? 1 : 0) << ',' << err << ',' << rec.first_seed << ','
          << rec.total_steps << ',' << format_double(rec.wall_seconds) << '\n';
    }
  }
  {
    auto out = open_out(dir / "checkpoints.csv");
    out << "n,count,a_n,b_n,mean_error,median_error,mad_error,median_abs_error,stat_mean,"
           "stat_variance,ks,ks_critical,ks_pass\n";
    for (const CheckpointSummary& s : r.summaries) {
      out << s.n << ',' << s.count << ',' << format_double(s.a) << ',' << format_double(s.b)
          << ',' << format_double(s.mean_error) << ',' << format_double(s.median_error) << ','
          << format_double(s.mad_error) << ',' << format_double(s.median_abs_error) << ','
          << format_double(s.stat_mean) << ',' << format_double(s.stat_variance) << ','
          << format_double(s.ks) << ',' << format_double(s.ks_critical) << ','
          << (s.ks_pass ? 1 : 0) << '\n';
    }
  }
  {
    json cps = json::array();
    for (const CheckpointSummary& s : r.summaries) {
      cps.push_back({{"n", s.n},
                     {"count", s.count},
                     {"a_n", s.a},
                     {"b_n", s.b},
                     {"mean_error", s.mean_error},
                     {"median_error", s.median_error},
                     {"mad_error", s.mad_error},
                     {"median_abs_error", s.median_abs_error},
                     {"stat_mean", s.stat_mean},
                     {"stat_variance", s.stat_variance},
                     {"ks", s.ks},
                     {"ks_critical", s.ks_critical},
                     {"ks_pass", s.ks_pass}});
    }
    const json summary = {{"config", to_json(r.config)},
                          {"replications", r.replications.size()},
                          {"failed", r.failed},
                          {"conditions", to_json(r.conditions)},
                          {"checkpoints", cps},
                          {"wall_seconds", r.wall_seconds}};
    auto out = open_out(dir / "summary.json");
    out << summary.dump(2) << '\n';
  }
  if (r.config.figures) emit_figures(r, dir / "figures");
}

std::vector<fs::path> emit_figures(const ExperimentResult& r, const fs::path& dir) {
  std::vector<fs::path> written;
  if (r.checkpoints.empty() || r.summaries.empty()) return written;
  fs::create_directories(dir);
  auto save = [&](const std::string& name, const std::string& content) {
    auto out = open_out(dir / name);
    out << content;
    written.push_back(dir / name);
  };

  svg::Series err{"median |theta_hat - theta|", {}, {}, "#1f77b4", true, false};
  svg::Series ref{"0.674 b_n", {}, {}, "#2ca02c", false, true};
  for (const CheckpointSummary& s : r.summaries) {
    if (s.count == 0) continue;
    err.x.push_back(static_cast<double>(s.n));
    err.y.push_back(s.median_abs_error);
    ref.x.push_back(static_cast<double>(s.n));
    ref.y.push_back(0.6745 * s.b);
  }
  // Least-squares slope of log error against log n.
  std::vector<svg::Series> series = {err};
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < err.x.size(); ++i) {
    if (err.y[i] > 0.0) {
      lx.push_back(std::log(err.x[i]));
      ly.push_back(std::log(err.y[i]));
    }
  }
  if (lx.size() >= 2) {
    const double mx = mean(lx), my = mean(ly);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    char label[64];
    std::snprintf(label, sizeof label, "fit, slope %.3f", slope);
    svg::Series fit{label, {}, {}, "#ff7f0e", false, false};
    for (double x : {lx.front(), lx.back()}) {
      fit.x.push_back(std::exp(x));
      fit.y.push_back(std::exp(my + slope * (x - mx)));
    }
    series.push_back(fit);
  }
  series.push_back(ref);
  save("error_vs_n.svg", svg::plot({"Estimation error against number of modes", "N",
                                    "median absolute error", true, true},
                                   series));

  const std::size_t last = r.summaries.size() - 1;
  std::vector<double> stat;
  for (const ReplicationRecord& rec : r.replications) {
    if (!rec.failed && std::isfinite(rec.result.normalized_stat[last])) {
      stat.push_back(rec.result.normalized_stat[last]);
    }
  }
  if (stat.empty()) return written;
  const std::string n = std::to_string(r.checkpoints[last]);
  const auto bins = static_cast<std::size_t>(std::clamp(std::sqrt(static_cast<double>(stat.size())), 5.0, 60.0));
  save("histogram.svg", svg::histogram_with_normal("Normalized statistic, N = " + n, stat, bins));
  save("qq.svg", svg::qq_plot("Normal QQ plot, N = " + n, stat));
  {
    auto out = open_out(dir / "qq.csv");
    out << "theoretical,sample\n";
    for (const auto& [q, v] : svg::qq_points(stat)) {
      out << format_double(q) << ',' << format_double(v) << '\n';
    }
    written.push_back(dir / "qq.csv");
  }
  return written;
}

}  // namespace tfe
