#include "a2av/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "a2av/error.hpp"

namespace a2av {

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (std::string_view k : allowed) known = known || it.key() == k;
    if (!known)
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

const json& object_at(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
  return v;
}

template <typename T>
T value_of(const json& obj, const char* key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

template <typename T>
T value_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return value_of<T>(obj, key);
}

template <typename T>
T require(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key))
    throw ConfigError(std::string(where) + " requires '" + key + "'");
  return value_of<T>(obj, key);
}

WorkloadSpec parse_workload(const json& obj) {
  check_keys(obj,
             {"kind", "count", "elem_size", "max_count", "grid_x", "grid_y", "proc_rows",
              "proc_cols"},
             "workload");
  const auto kind = value_or<std::string>(obj, "kind", "uniform");
  const int elem_size = value_or<int>(obj, "elem_size", 8);
  if (kind == "uniform") return WorkloadSpec::uniform(value_or<Count>(obj, "count", 64), elem_size);
  if (kind == "random") return WorkloadSpec::random(value_or<Count>(obj, "max_count", 32), elem_size);
  if (kind == "fft-transpose")
    return WorkloadSpec::fft_transpose(
        require<Count>(obj, "grid_x", "fft-transpose workload"),
        require<Count>(obj, "grid_y", "fft-transpose workload"),
        require<int>(obj, "proc_rows", "fft-transpose workload"),
        require<int>(obj, "proc_cols", "fft-transpose workload"), elem_size);
  throw ConfigError("unknown workload kind '" + kind + "'");
}

CostModel parse_cost_model(const json& obj) {
  check_keys(obj, {"alpha", "beta", "gamma", "inject_serialize", "poll_cost", "local_copy_cost"},
             "cost_model");
  CostModel m = default_cost_model();
  m.alpha = value_or<SimTime>(obj, "alpha", m.alpha);
  m.beta = value_or<SimTime>(obj, "beta", m.beta);
  m.gamma = value_or<SimTime>(obj, "gamma", m.gamma);
  m.inject_serialize = value_or<bool>(obj, "inject_serialize", m.inject_serialize);
  m.poll_cost = value_or<SimTime>(obj, "poll_cost", m.poll_cost);
  m.local_copy_cost = value_or<SimTime>(obj, "local_copy_cost", m.local_copy_cost);
  m.validate();
  return m;
}

SkewProfile parse_skew(const json& obj) {
  check_keys(obj, {"kind", "offsets", "max_offset", "offset", "rank", "seed"}, "skew");
  const auto kind = value_or<std::string>(obj, "kind", "none");
  if (kind == "none") return SkewProfile::none();
  if (kind == "explicit")
    return SkewProfile::explicit_offsets_of(
        require<std::vector<SimTime>>(obj, "offsets", "explicit skew"));
  if (kind == "uniform") {
    auto s = SkewProfile::uniform(require<SimTime>(obj, "max_offset", "uniform skew"),
                                  value_or<std::uint64_t>(obj, "seed", 0));
    return s;
  }
  if (kind == "one_rank") {
    const SimTime offset = require<SimTime>(obj, "offset", "one_rank skew");
    if (obj.contains("rank")) return SkewProfile::one_rank(value_of<int>(obj, "rank"), offset);
    return SkewProfile::one_rank_seeded(offset, value_or<std::uint64_t>(obj, "seed", 0));
  }
  throw ConfigError("unknown skew kind '" + kind + "'");
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

RunConfig parse_run(const json& root) {
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  check_keys(root,
             {"schedule", "transport", "n_ranks", "stride", "repeats", "seed", "best_per_metric",
              "workload", "cost_model", "skew", "sweep"},
             "config");
  RunConfig cfg;
  if (root.contains("schedule"))
    cfg.schedule = schedule_from_name(value_of<std::string>(root, "schedule"));
  if (root.contains("transport"))
    cfg.transport = transport_from_name(value_of<std::string>(root, "transport"));
  cfg.n_ranks = value_or<int>(root, "n_ranks", cfg.n_ranks);
  cfg.stride = value_or<int>(root, "stride", cfg.stride);
  cfg.repeats = value_or<int>(root, "repeats", cfg.repeats);
  cfg.seed = value_or<std::uint64_t>(root, "seed", cfg.seed);
  cfg.best_per_metric = value_or<bool>(root, "best_per_metric", cfg.best_per_metric);
  if (root.contains("workload")) cfg.workload = parse_workload(object_at(root, "workload"));
  if (root.contains("cost_model")) cfg.cost = parse_cost_model(object_at(root, "cost_model"));
  if (root.contains("skew")) cfg.skew = parse_skew(object_at(root, "skew"));
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  return parse_run(parse_text(json_text));
}

SweepConfig parse_sweep_config(const std::string& json_text) {
  const json root = parse_text(json_text);
  SweepConfig sweep;
  sweep.base = parse_run(root);
  if (root.contains("sweep")) {
    const json& sw = object_at(root, "sweep");
    check_keys(sw, {"schedules", "strides"}, "sweep");
    if (sw.contains("schedules")) {
      sweep.schedules.clear();
      for (const auto& name : value_of<std::vector<std::string>>(sw, "schedules"))
        sweep.schedules.push_back(schedule_from_name(name));
    }
    if (sw.contains("strides")) sweep.strides = value_of<std::vector<int>>(sw, "strides");
  }
  return sweep;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(slurp(path)); }

SweepConfig load_sweep_config(const std::string& path) { return parse_sweep_config(slurp(path)); }

}  // namespace a2av
