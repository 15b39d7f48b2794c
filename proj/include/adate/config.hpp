#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adate/campaign.hpp"
#include "adate/driver_model.hpp"
#include "adate/env.hpp"
#include "adate/grid.hpp"
#include "adate/hash.hpp"
#include "adate/io.hpp"
#include "adate/mixture.hpp"
#include "adate/policy.hpp"
#include "adate/surrogate.hpp"

namespace adate {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

// Flat key-value store with dotted keys. Section headers prefix the keys
// that follow; `--set a.b=c` overrides land in the same map, so the content
// hash always reflects the configuration actually used.
struct Config {
  std::map<std::string, std::string> kv;
  std::map<std::string, int> line_of;  // 0 for programmatic overrides

  static Config parse(const std::string& text) {
    Config c;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      std::string line = text.substr(
          pos, nl == std::string::npos ? std::string::npos : nl - pos);
      pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
      ++line_no;
      const std::size_t hash_pos = line.find('#');
      if (hash_pos != std::string::npos) line.resize(hash_pos);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          throw ConfigError("config: line " + std::to_string(line_no) +
                            ": unterminated section header");
        }
        section = detail::trim(line.substr(1, line.size() - 2));
        if (section.empty()) {
          throw ConfigError("config: line " + std::to_string(line_no) +
                            ": empty section name");
        }
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config: line " + std::to_string(line_no) +
                          ": expected key = value");
      }
      std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("config: line " + std::to_string(line_no) +
                          ": empty key");
      }
      if (!section.empty()) key = section + "." + key;
      if (c.kv.count(key)) {
        throw ConfigError("config: line " + std::to_string(line_no) +
                          ": duplicate key '" + key + "'");
      }
      c.kv[key] = value;
      c.line_of[key] = line_no;
    }
    return c;
  }

  static Config load(const std::string& path) {
    try {
      return parse(read_text_file(path));
    } catch (const std::runtime_error& e) {
      if (dynamic_cast<const ConfigError*>(&e)) throw;
      throw ConfigError(std::string(e.what()));
    }
  }

  void set(const std::string& key, const std::string& value) {
    kv[key] = value;
    line_of[key] = 0;
  }

  bool has(const std::string& key) const { return kv.count(key) != 0; }

  std::string where(const std::string& key) const {
    auto it = line_of.find(key);
    if (it == line_of.end() || it->second == 0) return "key '" + key + "'";
    return "line " + std::to_string(it->second) + ", key '" + key + "'";
  }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  }

  std::string require(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw ConfigError("config: missing required key '" + key + "'");
    }
    return it->second;
  }

  double parse_double(const std::string& key, const std::string& raw) const {
    double v = 0.0;
    const char* b = raw.data();
    const char* e = raw.data() + raw.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || p != e) {
      throw ConfigError("config: " + where(key) + ": expected a number, got '" +
                        raw + "'");
    }
    return v;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : parse_double(key, it->second);
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::int64_t v = 0;
    const char* b = it->second.data();
    const char* e = b + it->second.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || p != e) {
      throw ConfigError("config: " + where(key) +
                        ": expected an integer, got '" + it->second + "'");
    }
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: " + where(key) + ": expected a boolean, got '" +
                      v + "'");
  }

  std::vector<double> get_double_list(const std::string& key) const {
    const std::string raw = require(key);
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
      std::size_t comma = raw.find(',', pos);
      if (comma == std::string::npos) comma = raw.size();
      const std::string item = detail::trim(raw.substr(pos, comma - pos));
      if (item.empty()) {
        throw ConfigError("config: " + where(key) + ": empty list element");
      }
      out.push_back(parse_double(key, item));
      pos = comma + 1;
    }
    return out;
  }

  // Canonical content hash: sorted key=value lines.
  std::uint64_t hash() const {
    std::uint64_t h = fnv1a64("adate.config");
    for (const auto& [k, v] : kv) {
      h = fnv1a64(k, h);
      h = fnv1a64("=", h);
      h = fnv1a64(v, h);
      h = fnv1a64("\n", h);
    }
    return h;
  }
};

namespace presets {

// Oracle-friendly grid: 360 cells, 9 joint actions, exact DP in microseconds.
inline GridSpec tiny_grid() {
  GridSpec g;
  g.edges[0] = uniform_edges(20.0, 30.0, 2);
  g.edges[1] = uniform_edges(5.0, 45.0, 4);
  g.edges[2] = uniform_edges(-9.0, 9.0, 3);
  g.edges[3] = uniform_edges(5.0, 45.0, 5);
  g.edges[4] = uniform_edges(-9.0, 9.0, 3);
  g.accel_values = {-4.0, 0.0, 2.0};
  g.dt = 1.0;
  g.horizon = 20;
  g.vehicle_length = 5.0;
  g.v_max = 40.0;
  g.r_max = 45.0;
  return g;
}

// Laptop-scale grid (70,560 cells). The 20 s episode budget is kept at a 1 s
// resolution so each step crosses cell boundaries; a finer dt with these bin
// widths would freeze every dimension inside its own cell and no transition
// would ever leave a cell.
inline GridSpec desk_grid() {
  GridSpec g;
  g.edges[0] = uniform_edges(10.0, 35.0, 10);
  g.edges[1] = uniform_edges(5.0, 65.0, 12);
  g.edges[2] = uniform_edges(-12.0, 12.0, 7);
  g.edges[3] = uniform_edges(5.0, 65.0, 12);
  g.edges[4] = uniform_edges(-12.0, 12.0, 7);
  g.accel_values = {-6.0, -4.0, -2.0, 0.0, 2.0};
  g.dt = 1.0;
  g.horizon = 20;
  g.vehicle_length = 5.0;
  g.v_max = 50.0;
  g.r_max = 65.0;
  return g;
}

}  // namespace presets

namespace detail {

inline void load_grid_dim(const Config& c, GridSpec& g, int d,
                          const std::string& key) {
  if (!c.has(key)) return;
  const auto spec = c.get_double_list(key);
  if (spec.size() != 3 || spec[2] < 1.0 ||
      spec[2] != static_cast<double>(static_cast<int>(spec[2]))) {
    throw ConfigError("config: " + c.where(key) +
                      ": expected 'lo,hi,nbins' with integer nbins >= 1");
  }
  if (!(spec[0] < spec[1])) {
    throw ConfigError("config: " + c.where(key) + ": need lo < hi");
  }
  g.edges[d] = uniform_edges(spec[0], spec[1], static_cast<int>(spec[2]));
}

}  // namespace detail

inline GridSpec parse_grid(const Config& c) {
  const std::string preset = c.get_string("grid.preset", "tiny");
  GridSpec g;
  if (preset == "tiny") {
    g = presets::tiny_grid();
  } else if (preset == "desk") {
    g = presets::desk_grid();
  } else {
    throw ConfigError("config: " + c.where("grid.preset") +
                      ": unknown preset '" + preset + "' (tiny|desk)");
  }
  detail::load_grid_dim(c, g, 0, "grid.v_bv");
  detail::load_grid_dim(c, g, 1, "grid.r1");
  detail::load_grid_dim(c, g, 2, "grid.r1dot");
  detail::load_grid_dim(c, g, 3, "grid.r2");
  detail::load_grid_dim(c, g, 4, "grid.r2dot");
  if (c.has("grid.accel_values")) {
    g.accel_values = c.get_double_list("grid.accel_values");
  }
  g.dt = c.get_double("grid.dt", g.dt);
  g.horizon = static_cast<int>(c.get_int("grid.horizon", g.horizon));
  g.vehicle_length = c.get_double("grid.vehicle_length", g.vehicle_length);
  g.v_max = c.get_double("grid.v_max", g.v_max);
  g.r_max = c.get_double("grid.r_max", g.r_max);
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: [grid]: ") + e.what());
  }
  return g;
}

// A model reference is either a builtin name (sm1 | sm2 | sm3 | idm | fvdm |
// scripted) or the name of a [model.<name>] section with kind plus parameter
// overrides on top of that kind's defaults.
inline DriverModelParams parse_model_section(const Config& c,
                                             const std::string& prefix);

inline DriverModelParams resolve_model(const Config& c, const std::string& name,
                                       const std::string& ref_key) {
  if (c.has("model." + name + ".kind")) {
    return parse_model_section(c, "model." + name + ".");
  }
  if (name == "sm1" || name == "idm") return idm_params();
  if (name == "sm2") return fvdm_params(-1.0);
  if (name == "sm3" || name == "fvdm") return fvdm_params(-6.0);
  if (name == "scripted") return scripted_params();
  throw ConfigError("config: " + c.where(ref_key) + ": unknown model '" + name +
                    "' (builtin sm1|sm2|sm3|idm|fvdm|scripted or a "
                    "[model." +
                    name + "] section)");
}

inline DriverModelParams parse_model_section(const Config& c,
                                             const std::string& prefix) {
  const std::string kind = c.require(prefix + "kind");
  DriverModelParams p;
  if (kind == "idm") {
    p = idm_params();
  } else if (kind == "fvdm") {
    p = fvdm_params(c.get_double(prefix + "a_min", -6.0));
  } else if (kind == "scripted") {
    p = scripted_params();
  } else {
    throw ConfigError("config: " + c.where(prefix + "kind") +
                      ": unknown kind '" + kind + "' (idm|fvdm|scripted)");
  }
  p.idm_v0 = c.get_double(prefix + "idm_v0", p.idm_v0);
  p.idm_th = c.get_double(prefix + "idm_th", p.idm_th);
  p.idm_s0 = c.get_double(prefix + "idm_s0", p.idm_s0);
  p.idm_delta = c.get_double(prefix + "idm_delta", p.idm_delta);
  p.idm_accel = c.get_double(prefix + "idm_accel", p.idm_accel);
  p.idm_decel = c.get_double(prefix + "idm_decel", p.idm_decel);
  p.fvdm_kappa = c.get_double(prefix + "fvdm_kappa", p.fvdm_kappa);
  p.fvdm_lambda = c.get_double(prefix + "fvdm_lambda", p.fvdm_lambda);
  p.fvdm_v0 = c.get_double(prefix + "fvdm_v0", p.fvdm_v0);
  p.fvdm_b = c.get_double(prefix + "fvdm_b", p.fvdm_b);
  p.fvdm_c = c.get_double(prefix + "fvdm_c", p.fvdm_c);
  p.scripted_gap_brake =
      c.get_double(prefix + "scripted_gap_brake", p.scripted_gap_brake);
  p.scripted_brake = c.get_double(prefix + "scripted_brake", p.scripted_brake);
  p.scripted_v_target =
      c.get_double(prefix + "scripted_v_target", p.scripted_v_target);
  p.scripted_cruise =
      c.get_double(prefix + "scripted_cruise", p.scripted_cruise);
  p.a_min = c.get_double(prefix + "a_min", p.a_min);
  p.a_max = c.get_double(prefix + "a_max", p.a_max);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: [") +
                      prefix.substr(0, prefix.size() - 1) + "]: " + e.what());
  }
  return p;
}

inline std::vector<std::string> split_names(const Config& c,
                                            const std::string& key,
                                            const std::string& fallback) {
  const std::string raw = c.get_string(key, fallback);
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t comma = raw.find(',', pos);
    if (comma == std::string::npos) comma = raw.size();
    const std::string item = detail::trim(raw.substr(pos, comma - pos));
    if (item.empty()) {
      throw ConfigError("config: " + c.where(key) + ": empty name in list");
    }
    out.push_back(item);
    pos = comma + 1;
  }
  return out;
}

struct CampaignParams {
  double epsilon = 0.1;
  std::size_t episodes = 100000;
  double rhw_threshold = 0.3;
  double confidence = 0.95;
  std::size_t n_min = 100;
  int bootstrap_reps = 100;
};

// Everything a command needs, parsed and validated once.
struct RunConfig {
  Config raw;
  std::uint64_t config_hash = 0;

  GridSpec grid;
  DriverModelParams av;
  std::vector<std::string> surrogate_names;
  std::vector<DriverModelParams> surrogates;
  DriverModelParams lv_model;
  DriverModelParams bv_model;
  NaturalisticParams nat;
  InitBox init;

  AdateOptions adate;
  CampaignParams campaign;
  DpOptions dp;
  int sm_horizon = -1;  // -1 = stationary surrogate tables

  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int threads = 1;
};

inline RunConfig parse_run_config(const Config& c) {
  RunConfig r;
  r.raw = c;
  r.config_hash = c.hash();
  r.grid = parse_grid(c);

  r.av = resolve_model(c, c.get_string("av.model", "sm1"), "av.model");
  r.surrogate_names = split_names(c, "surrogates.models", "sm1,sm2,sm3");
  for (const auto& name : r.surrogate_names) {
    r.surrogates.push_back(resolve_model(c, name, "surrogates.models"));
  }
  r.lv_model = resolve_model(c, c.get_string("naturalistic.lv_model", "idm"),
                             "naturalistic.lv_model");
  r.bv_model = resolve_model(c, c.get_string("naturalistic.bv_model", "idm"),
                             "naturalistic.bv_model");
  r.nat.sigma_a = c.get_double("naturalistic.sigma_a", 1.0);
  r.nat.rho = c.get_double("naturalistic.rho", 1e-3);
  try {
    r.nat.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: [naturalistic]: ") + e.what());
  }

  r.init = InitBox::whole(r.grid);
  const char* dims[kStateDims] = {"v_bv", "r1", "r1dot", "r2", "r2dot"};
  for (int d = 0; d < kStateDims; ++d) {
    const std::string key = std::string("init.") + dims[d];
    if (!c.has(key)) continue;
    const auto range = c.get_double_list(key);
    if (range.size() != 2 || !(range[0] <= range[1])) {
      throw ConfigError("config: " + c.where(key) + ": expected 'lo,hi'");
    }
    r.init.lo[d] = range[0];
    r.init.hi[d] = range[1];
  }

  r.adate.c = c.get_double("learner.c", 2.0);
  r.adate.omega = c.get_double("learner.omega", 0.85);
  r.adate.gamma = c.get_double("learner.gamma", 1.0);
  r.adate.delta = static_cast<int>(c.get_int("learner.delta", 10));
  r.adate.asd_threshold = c.get_double("learner.asd_threshold", 0.02);
  r.adate.max_episodes =
      static_cast<std::uint64_t>(c.get_int("learner.max_episodes", 200000));
  r.adate.solve_interval =
      static_cast<int>(c.get_int("learner.solve_interval", 1));
  if (r.adate.delta < 1 || r.adate.solve_interval < 1 ||
      !(r.adate.asd_threshold > 0) || !(r.adate.gamma > 0) ||
      r.adate.gamma > 1.0 || !(r.adate.omega > 0.5) || r.adate.omega > 1.0 ||
      !(r.adate.c >= 0)) {
    throw ConfigError("config: [learner]: parameter out of range");
  }

  r.campaign.epsilon = c.get_double("campaign.epsilon", 0.1);
  r.campaign.episodes =
      static_cast<std::size_t>(c.get_int("campaign.episodes", 100000));
  r.campaign.rhw_threshold = c.get_double("campaign.rhw_threshold", 0.3);
  r.campaign.confidence = c.get_double("campaign.confidence", 0.95);
  r.campaign.n_min = static_cast<std::size_t>(c.get_int("campaign.n_min", 100));
  r.campaign.bootstrap_reps =
      static_cast<int>(c.get_int("campaign.bootstrap_reps", 100));
  if (!(r.campaign.epsilon >= 0.0 && r.campaign.epsilon < 1.0) ||
      r.campaign.episodes < 1 || !(r.campaign.rhw_threshold > 0) ||
      !(r.campaign.confidence > 0 && r.campaign.confidence < 1) ||
      r.campaign.bootstrap_reps < 1) {
    throw ConfigError("config: [campaign]: parameter out of range");
  }

  r.dp.tol = c.get_double("dp.tol", 1e-12);
  r.dp.max_sweeps = static_cast<int>(c.get_int("dp.max_sweeps", 20000));
  const std::string mode = c.get_string("dp.sm_mode", "stationary");
  if (mode == "stationary") {
    r.sm_horizon = -1;
  } else if (mode == "horizon") {
    r.sm_horizon = r.grid.horizon;
  } else {
    throw ConfigError("config: " + c.where("dp.sm_mode") +
                      ": expected stationary|horizon");
  }

  r.seed = static_cast<std::uint64_t>(c.get_int("run.seed", 1));
  r.out_dir = c.get_string("run.out", "out");
  r.threads = static_cast<int>(c.get_int("run.threads", 1));
  if (r.threads < 1) {
    throw ConfigError("config: [run]: threads must be >= 1");
  }
  r.adate.seed = r.seed;
  return r;
}

}  // namespace adate
