#include "adepth/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "builtin_configs.hpp"

namespace adepth {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"scenario", {"name", "strategy", "horizon", "dt", "control_update"}},
      {"compare", {"strategies"}},
      {"initial", {"s_x", "s_y", "chi", "chi_hat"}},
      {"gains", {"k_s", "k_chi", "k_p"}},
      {"limits", {"v_max", "w_max"}},
      {"reference", {"type", "s_des_x", "s_des_y"}},
      {"guards", {"s_min_norm", "chi_floor", "constraint_tol", "on_singularity"}},
      {"noise", {"std", "seed"}},
      {"output", {"log"}},
  };
  return keys;
}

void reject_unknown(const pt::ptree& tree) {
  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = keys.find(section);
    if (it == keys.end()) {
      throw ConfigError(fmt::format("unknown section [{}]", section));
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, section));
      }
    }
  }
}

double get_double(const pt::ptree& tree, const std::string& path, double fallback) {
  const auto v = tree.get_optional<std::string>(path);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("'{}' is not a number: '{}'", path, *v));
  }
}

std::vector<Strategy> parse_strategy_list(const std::string& text) {
  std::vector<Strategy> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    out.push_back(strategy_from_string(item.substr(first, last - first + 1)));
  }
  return out;
}

std::string fmt_double(double d) { return fmt::format("{:.17g}", d); }

}  // namespace

std::string_view to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::kConstant: return "constant";
    case ReferenceKind::kCircular: return "circular";
    case ReferenceKind::kOrigin: return "origin";
  }
  return "unknown";
}

ReferenceKind reference_from_string(std::string_view name) {
  if (name == "constant") return ReferenceKind::kConstant;
  if (name == "circular") return ReferenceKind::kCircular;
  if (name == "origin") return ReferenceKind::kOrigin;
  throw ConfigError(fmt::format("unknown reference type '{}'", name));
}

std::string_view to_string(SingularityPolicy p) {
  return p == SingularityPolicy::kTerminate ? "terminate" : "hold";
}

SingularityPolicy singularity_policy_from_string(std::string_view name) {
  if (name == "terminate") return SingularityPolicy::kTerminate;
  if (name == "hold") return SingularityPolicy::kHold;
  throw ConfigError(fmt::format("unknown on_singularity '{}'", name));
}

std::string_view to_string(ControlUpdate c) {
  return c == ControlUpdate::kContinuous ? "continuous" : "zero_order_hold";
}

ControlUpdate control_update_from_string(std::string_view name) {
  if (name == "continuous") return ControlUpdate::kContinuous;
  if (name == "zero_order_hold") return ControlUpdate::kZeroOrderHold;
  throw ConfigError(fmt::format("unknown control_update '{}'", name));
}

void ScenarioConfig::validate() const {
  auto require = [](bool ok, std::string_view what) {
    if (!ok) throw ConfigError(std::string(what));
  };
  require(std::isfinite(dt) && dt > 0.0, "scenario.dt must be positive");
  require(std::isfinite(horizon) && horizon >= 0.0, "scenario.horizon must be non-negative");
  require(std::isfinite(chi0) && chi0 > 0.0, "initial.chi must be positive (point in front of camera)");
  require(std::isfinite(chi_hat0) && chi_hat0 >= 0.0, "initial.chi_hat must be non-negative");
  require(s0.allFinite(), "initial.s_x / initial.s_y must be finite");
  require(gains.k_s > 0.0 && gains.k_chi > 0.0 && k_p > 0.0, "gains must be positive");
  require(limits.v_max > 0.0 && limits.w_max > 0.0, "limits must be positive");
  require(guards.s_min_norm > 0.0 && guards.chi_floor > 0.0, "guards must be positive");
  require(constraint_tol >= 0.0, "guards.constraint_tol must be non-negative");
  require(noise_std >= 0.0, "noise.std must be non-negative");
  require(reference.s_des.allFinite(), "reference.s_des must be finite");
}

std::int64_t ScenarioConfig::step_count() const {
  return static_cast<std::int64_t>(std::llround(horizon / dt));
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return name == o.name && strategy == o.strategy && compare_strategies == o.compare_strategies &&
         s0 == o.s0 && chi0 == o.chi0 && chi_hat0 == o.chi_hat0 && gains.k_s == o.gains.k_s &&
         gains.k_chi == o.gains.k_chi && k_p == o.k_p && limits.v_max == o.limits.v_max &&
         limits.w_max == o.limits.w_max && dt == o.dt && horizon == o.horizon &&
         control_update == o.control_update && reference == o.reference &&
         guards.s_min_norm == o.guards.s_min_norm && guards.chi_floor == o.guards.chi_floor &&
         on_singularity == o.on_singularity &&
         constraint_tol == o.constraint_tol && noise_std == o.noise_std &&
         noise_seed == o.noise_seed && log_path == o.log_path;
}

ScenarioConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("malformed config (line {}): {}", e.line(), e.message()));
  }
  reject_unknown(tree);

  ScenarioConfig c;
  try {
    c.name = tree.get("scenario.name", c.name);
    c.strategy = strategy_from_string(tree.get("scenario.strategy", std::string(to_string(c.strategy))));
    c.horizon = get_double(tree, "scenario.horizon", c.horizon);
    c.dt = get_double(tree, "scenario.dt", c.dt);
    c.control_update = control_update_from_string(
        tree.get("scenario.control_update", std::string(to_string(c.control_update))));
    if (auto list = tree.get_optional<std::string>("compare.strategies")) {
      c.compare_strategies = parse_strategy_list(*list);
    }
    c.s0.x() = get_double(tree, "initial.s_x", c.s0.x());
    c.s0.y() = get_double(tree, "initial.s_y", c.s0.y());
    c.chi0 = get_double(tree, "initial.chi", c.chi0);
    c.chi_hat0 = get_double(tree, "initial.chi_hat", c.chi_hat0);
    c.gains.k_s = get_double(tree, "gains.k_s", c.gains.k_s);
    c.gains.k_chi = get_double(tree, "gains.k_chi", c.gains.k_chi);
    c.k_p = get_double(tree, "gains.k_p", c.k_p);
    c.limits.v_max = get_double(tree, "limits.v_max", c.limits.v_max);
    c.limits.w_max = get_double(tree, "limits.w_max", c.limits.w_max);
    c.reference.kind =
        reference_from_string(tree.get("reference.type", std::string(to_string(c.reference.kind))));
    c.reference.s_des.x() = get_double(tree, "reference.s_des_x", c.reference.s_des.x());
    c.reference.s_des.y() = get_double(tree, "reference.s_des_y", c.reference.s_des.y());
    c.guards.s_min_norm = get_double(tree, "guards.s_min_norm", c.guards.s_min_norm);
    c.guards.chi_floor = get_double(tree, "guards.chi_floor", c.guards.chi_floor);
    c.constraint_tol = get_double(tree, "guards.constraint_tol", c.constraint_tol);
    c.on_singularity = singularity_policy_from_string(
        tree.get("guards.on_singularity", std::string(to_string(c.on_singularity))));
    c.noise_std = get_double(tree, "noise.std", c.noise_std);
    if (auto seed = tree.get_optional<std::string>("noise.seed")) {
      if (seed->empty() || seed->find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError("noise.seed must be a non-negative integer");
      }
      c.noise_seed = std::stoull(*seed);
    }
    c.log_path = tree.get("output.log", c.log_path);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& c) {
  std::string strategies;
  for (std::size_t i = 0; i < c.compare_strategies.size(); ++i) {
    if (i) strategies += ", ";
    strategies += to_string(c.compare_strategies[i]);
  }
  std::string out;
  out += fmt::format("[scenario]\nname = {}\nstrategy = {}\nhorizon = {}\ndt = {}\ncontrol_update = {}\n\n",
                     c.name, to_string(c.strategy), fmt_double(c.horizon), fmt_double(c.dt),
                     to_string(c.control_update));
  if (!c.compare_strategies.empty()) {
    out += fmt::format("[compare]\nstrategies = {}\n\n", strategies);
  }
  out += fmt::format("[initial]\ns_x = {}\ns_y = {}\nchi = {}\nchi_hat = {}\n\n", fmt_double(c.s0.x()),
                     fmt_double(c.s0.y()), fmt_double(c.chi0), fmt_double(c.chi_hat0));
  out += fmt::format("[gains]\nk_s = {}\nk_chi = {}\nk_p = {}\n\n", fmt_double(c.gains.k_s),
                     fmt_double(c.gains.k_chi), fmt_double(c.k_p));
  out += fmt::format("[limits]\nv_max = {}\nw_max = {}\n\n", fmt_double(c.limits.v_max),
                     fmt_double(c.limits.w_max));
  out += fmt::format("[reference]\ntype = {}\ns_des_x = {}\ns_des_y = {}\n\n", to_string(c.reference.kind),
                     fmt_double(c.reference.s_des.x()), fmt_double(c.reference.s_des.y()));
  out += fmt::format("[guards]\ns_min_norm = {}\nchi_floor = {}\nconstraint_tol = {}\non_singularity = {}\n\n",
                     fmt_double(c.guards.s_min_norm), fmt_double(c.guards.chi_floor),
                     fmt_double(c.constraint_tol), to_string(c.on_singularity));
  out += fmt::format("[noise]\nstd = {}\nseed = {}\n\n", fmt_double(c.noise_std), c.noise_seed);
  out += fmt::format("[output]\nlog = {}\n", c.log_path);
  return out;
}

bool is_builtin_config(std::string_view name) {
  for (const auto& entry : kBuiltinConfigs) {
    if (entry.name == name) return true;
  }
  return false;
}

std::string builtin_config_text(std::string_view name) {
  for (const auto& entry : kBuiltinConfigs) {
    if (entry.name == name) return std::string(entry.text);
  }
  throw ConfigError(fmt::format("no built-in scenario named '{}'", name));
}

}  // namespace adepth
