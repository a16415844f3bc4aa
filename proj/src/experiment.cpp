#include "adepth/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <variant>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace adepth {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json metrics_json(const SimLog& log, const RunMetrics& m) {
  json j;
  j["strategy"] = std::string(to_string(log.strategy));
  j["status"] = std::string(to_string(log.status));
  j["early_termination"] = log.status != RunStatus::kCompleted;
  j["status_message"] = log.status_message;
  j["rows"] = log.rows.size();
  j["final_time"] = m.final_time;
  j["initial_chi_tilde"] = m.initial_chi_tilde;
  j["final_chi_tilde"] = m.final_chi_tilde;
  j["final_e_norm"] = m.final_e_norm;
  j["convergence_time"] = optional_json(m.convergence_time);
  j["tracking_time"] = optional_json(m.tracking_time);
  j["tracking_settled_time"] = optional_json(m.tracking_settled_time);
  j["max_V_dot"] = m.max_V_dot;
  j["min_V_dot_margin"] = m.min_V_dot_margin;
  j["max_depth_change"] = m.max_depth_change;
  j["constraint_violations"] = log.constraint_violations;
  j["chi_hat_clamps"] = log.chi_hat_clamps;
  j["singularity_holds"] = log.singularity_holds;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  f << text;
  if (!f) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

void write_log(const fs::path& path, const SimLog& log) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  write_csv(log, f);
  if (!f) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error(fmt::format("cannot create output directory '{}'", dir.string()));
  }
}

ScenarioConfig load_with_overrides(const std::string& ref, const RunOptions& opts) {
  ScenarioConfig cfg = resolve_config(ref);
  if (opts.dt) cfg.dt = *opts.dt;
  if (opts.horizon) cfg.horizon = *opts.horizon;
  cfg.validate();
  return cfg;
}

using Outcome = std::variant<SimLog, std::string>;

// Runs each strategy on its own engine. Errors are captured per strategy.
std::vector<Outcome> run_all(const ScenarioConfig& cfg, const std::vector<Strategy>& strategies) {
  std::vector<std::future<Outcome>> jobs;
  jobs.reserve(strategies.size());
  for (Strategy s : strategies) {
    jobs.push_back(std::async(std::launch::async, [&cfg, s]() -> Outcome {
      try {
        return run_scenario(cfg, s);
      } catch (const std::exception& e) {
        return std::string(e.what());
      }
    }));
  }
  std::vector<Outcome> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace

RunMetrics compute_metrics(const SimLog& log) {
  RunMetrics m;
  if (log.rows.empty()) return m;
  const SimLogRow& first = log.rows.front();
  const SimLogRow& last = log.rows.back();
  m.initial_chi_tilde = first.chi_tilde;
  m.final_time = last.t;
  m.final_chi_tilde = last.chi_tilde;
  m.final_e_norm = last.e_norm;
  m.max_V_dot = -std::numeric_limits<double>::infinity();
  m.min_V_dot_margin = std::numeric_limits<double>::infinity();

  const double threshold = kConvergenceFraction * std::abs(first.chi_tilde);
  const double z0 = 1.0 / first.chi;
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    const SimLogRow& r = log.rows[k];
    if (!m.convergence_time && std::abs(r.chi_tilde) < threshold) m.convergence_time = r.t;
    if (!m.tracking_time && r.e_norm < kTrackingThreshold) m.tracking_time = r.t;
    m.max_V_dot = std::max(m.max_V_dot, r.V_dot);
    m.min_V_dot_margin = std::min(m.min_V_dot_margin, -r.V_dot);
    if (k > 0) m.max_V_increase = std::max(m.max_V_increase, r.V - log.rows[k - 1].V);
    m.max_depth_change = std::max(m.max_depth_change, std::abs(1.0 / r.chi - z0));
  }
  for (auto it = log.rows.rbegin(); it != log.rows.rend() && it->e_norm < kTrackingThreshold; ++it) {
    m.tracking_settled_time = it->t;
  }
  return m;
}

ScenarioConfig resolve_config(const std::string& ref) {
  std::error_code ec;
  if (fs::exists(ref, ec)) return load_config(ref);
  if (is_builtin_config(ref)) {
    spdlog::debug("using built-in scenario '{}'", ref);
    return parse_config(builtin_config_text(ref));
  }
  throw ConfigError(fmt::format("cannot read config file '{}': no such file or built-in scenario", ref));
}

int cmd_run(const std::string& config_ref, const RunOptions& opts, std::ostream& out,
            std::ostream& err) {
  ScenarioConfig cfg;
  try {
    cfg = load_with_overrides(config_ref, opts);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  }

  std::vector<Strategy> strategies{cfg.strategy};
  for (Strategy s : cfg.compare_strategies) {
    if (std::find(strategies.begin(), strategies.end(), s) == strategies.end()) strategies.push_back(s);
  }

  try {
    prepare_out_dir(opts.out_dir);
    const std::vector<Outcome> results = run_all(cfg, strategies);
    if (const auto* msg = std::get_if<std::string>(&results.front())) {
      fmt::print(err, "runtime error ({}): {}\n", to_string(cfg.strategy), *msg);
      return kExitRuntimeError;
    }
    const SimLog& primary = std::get<SimLog>(results.front());
    write_log(opts.out_dir / cfg.log_path, primary);

    json summary = metrics_json(primary, compute_metrics(primary));
    summary["scenario"] = cfg.name;
    summary["dt"] = cfg.dt;
    summary["horizon"] = cfg.horizon;
    summary["csv"] = cfg.log_path;

    int status = kExitOk;
    if (!cfg.compare_strategies.empty()) {
      json per = json::array();
      for (std::size_t i = 0; i < strategies.size(); ++i) {
        const std::string name(to_string(strategies[i]));
        if (const auto* msg = std::get_if<std::string>(&results[i])) {
          fmt::print(err, "runtime error ({}): {}\n", name, *msg);
          per.push_back({{"strategy", name}, {"error", *msg}});
          status = kExitRuntimeError;
          continue;
        }
        const SimLog& log = std::get<SimLog>(results[i]);
        write_log(opts.out_dir / (name + ".csv"), log);
        json j = metrics_json(log, compute_metrics(log));
        j["csv"] = name + ".csv";
        per.push_back(std::move(j));
      }
      summary["strategies"] = std::move(per);
    }
    write_text(opts.out_dir / "summary.json", summary.dump(2) + "\n");

    fmt::print(out, "{} [{}]: {} rows, status {}, final chi_tilde {:.3e}, final |e| {:.3e}, {} constraint violations\n",
               cfg.name, to_string(cfg.strategy), primary.rows.size(), to_string(primary.status),
               summary["final_chi_tilde"].get<double>(), summary["final_e_norm"].get<double>(),
               primary.constraint_violations);
    fmt::print(out, "wrote {}\n", (opts.out_dir / "summary.json").string());
    return status;
  } catch (const std::exception& e) {
    fmt::print(err, "runtime error: {}\n", e.what());
    return kExitRuntimeError;
  }
}

int cmd_compare(const std::string& config_ref, const RunOptions& opts, std::ostream& out,
                std::ostream& err) {
  ScenarioConfig cfg;
  try {
    cfg = load_with_overrides(config_ref, opts);
    if (cfg.compare_strategies.empty()) {
      throw ConfigError(fmt::format("'{}' lists no strategies to compare ([compare] strategies)", config_ref));
    }
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  }

  try {
    prepare_out_dir(opts.out_dir);
    const std::vector<Outcome> results = run_all(cfg, cfg.compare_strategies);

    json report;
    report["scenario"] = cfg.name;
    report["dt"] = cfg.dt;
    report["horizon"] = cfg.horizon;
    report["convergence_fraction"] = kConvergenceFraction;
    report["tracking_threshold"] = kTrackingThreshold;
    json per = json::array();
    std::vector<double> times;
    int status = kExitOk;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const std::string name(to_string(cfg.compare_strategies[i]));
      if (const auto* msg = std::get_if<std::string>(&results[i])) {
        fmt::print(err, "runtime error ({}): {}\n", name, *msg);
        per.push_back({{"strategy", name}, {"error", *msg}});
        status = kExitRuntimeError;
        continue;
      }
      const SimLog& log = std::get<SimLog>(results[i]);
      const RunMetrics m = compute_metrics(log);
      write_log(opts.out_dir / (name + ".csv"), log);
      json j = metrics_json(log, m);
      j["csv"] = name + ".csv";
      per.push_back(std::move(j));
      if (m.convergence_time) times.push_back(*m.convergence_time);
      fmt::print(out, "{:<16} convergence {:>8}  tracking {:>8}  status {}\n", name,
                 m.convergence_time ? fmt::format("{:.3f} s", *m.convergence_time) : "-",
                 m.tracking_time ? fmt::format("{:.3f} s", *m.tracking_time) : "-",
                 to_string(log.status));
    }
    report["strategies"] = std::move(per);
    if (times.size() == cfg.compare_strategies.size() && !times.empty()) {
      const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
      report["convergence_time_ratio"] = *lo > 0.0 ? json(*hi / *lo) : json(nullptr);
    } else {
      report["convergence_time_ratio"] = nullptr;
    }
    write_text(opts.out_dir / "comparison.json", report.dump(2) + "\n");
    fmt::print(out, "wrote {}\n", (opts.out_dir / "comparison.json").string());
    return status;
  } catch (const std::exception& e) {
    fmt::print(err, "runtime error: {}\n", e.what());
    return kExitRuntimeError;
  }
}

int cmd_selftest(const SelftestOptions& opts, std::ostream& out) {
  return report_selftest(run_selftest(opts), out) ? kExitOk : kExitSelftestFailed;
}

}  // namespace adepth
