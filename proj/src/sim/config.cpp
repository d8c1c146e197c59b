#include "imdrive/sim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "imdrive/errors.hpp"

namespace imdrive {
namespace {

using nlohmann::json;

// Every object in the schema is closed: a key outside `allowed` is a
// config error, so typos fail loudly instead of silently using defaults.
void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("config: unknown key \"" + key + "\" in " + where);
    }
  }
}

double num(const json& j, const std::string& key, double fallback,
           const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) {
    throw ConfigError("config: " + where + "." + key + " must be a number");
  }
  return v.get<double>();
}

std::vector<ProfilePoint> profile(const json& j, const std::string& key,
                                  const std::vector<ProfilePoint>& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array()) {
    throw ConfigError("config: profiles." + key + " must be an array of [t, value]");
  }
  std::vector<ProfilePoint> out;
  for (const auto& p : v) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ConfigError("config: profiles." + key + " entries must be [t, value]");
    }
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

}  // namespace

std::string to_string(DriveMode m) {
  return m == DriveMode::kSensored ? "sensored" : "sensorless-asmo";
}

void ScenarioConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("config: sim.dt must be positive");
  if (!(duration >= dt)) throw ConfigError("config: sim.duration must be >= dt");
  motor.validate();
  observer.validate();
  controller.validate();
  if (!std::isfinite(psi_s_ref) || psi_s_ref < 0.0) {
    throw ConfigError("config: controller.psi_s_ref must be nonnegative");
  }
  validate_profile(speed_profile, "profiles.speed");
  validate_profile(load_profile, "profiles.load");
  if (!(mismatch.R_r_factor > 0.0) || !(mismatch.R_s_factor > 0.0)) {
    throw ConfigError("config: mismatch factors must be positive");
  }
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw ConfigError("config: noise.std must be a nonnegative number");
  }
}

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
  }

  check_keys(j,
             {"schema_version", "sim", "motor", "observer", "controller", "profiles",
              "mismatch", "noise", "mode", "seed"},
             "top level");
  for (const char* required :
       {"schema_version", "sim", "motor", "observer", "controller", "profiles",
        "mismatch", "noise", "mode", "seed"}) {
    if (!j.contains(required)) {
      throw ConfigError(std::string("config: missing top-level key \"") + required +
                        "\"");
    }
  }
  if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != 1) {
    throw ConfigError("config: schema_version must be the integer 1");
  }

  ScenarioConfig cfg;

  const json& sim = j["sim"];
  check_keys(sim, {"dt", "duration"}, "sim");
  cfg.dt = num(sim, "dt", cfg.dt, "sim");
  cfg.duration = num(sim, "duration", cfg.duration, "sim");

  const json& m = j["motor"];
  check_keys(m, {"R_s", "R_r", "L_s", "L_r", "L_m", "pole_pairs", "J", "B"}, "motor");
  cfg.motor.R_s = num(m, "R_s", cfg.motor.R_s, "motor");
  cfg.motor.R_r = num(m, "R_r", cfg.motor.R_r, "motor");
  cfg.motor.L_s = num(m, "L_s", cfg.motor.L_s, "motor");
  cfg.motor.L_r = num(m, "L_r", cfg.motor.L_r, "motor");
  cfg.motor.L_m = num(m, "L_m", cfg.motor.L_m, "motor");
  if (m.contains("pole_pairs")) {
    if (!m["pole_pairs"].is_number_integer()) {
      throw ConfigError("config: motor.pole_pairs must be an integer");
    }
    cfg.motor.pole_pairs = m["pole_pairs"].get<int>();
  }
  cfg.motor.J = num(m, "J", cfg.motor.J, "motor");
  cfg.motor.B = num(m, "B", cfg.motor.B, "motor");

  const json& o = j["observer"];
  check_keys(o,
             {"L", "M", "phi", "k_omega_p", "k_omega_i", "k_R", "R_r_min_factor",
              "R_r_max_factor", "P_weight", "d_weight"},
             "observer");
  if (o.contains("L")) {
    const auto& L = o["L"];
    if (!L.is_array() || L.size() != 2 || !L[0].is_array() || L[0].size() != 2 ||
        !L[1].is_array() || L[1].size() != 2) {
      throw ConfigError("config: observer.L must be a 2x2 array");
    }
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        if (!L[r][c].is_number()) throw ConfigError("config: observer.L entries must be numbers");
        cfg.observer.L[r][c] = L[r][c].get<double>();
      }
  }
  cfg.observer.M = num(o, "M", cfg.observer.M, "observer");
  cfg.observer.phi = num(o, "phi", cfg.observer.phi, "observer");
  cfg.observer.k_omega_p = num(o, "k_omega_p", cfg.observer.k_omega_p, "observer");
  cfg.observer.k_omega_i = num(o, "k_omega_i", cfg.observer.k_omega_i, "observer");
  cfg.observer.k_R = num(o, "k_R", cfg.observer.k_R, "observer");
  cfg.observer.R_r_min_factor =
      num(o, "R_r_min_factor", cfg.observer.R_r_min_factor, "observer");
  cfg.observer.R_r_max_factor =
      num(o, "R_r_max_factor", cfg.observer.R_r_max_factor, "observer");
  if (o.contains("P_weight")) {
    const auto& P = o["P_weight"];
    if (!P.is_array() || P.size() != 4) {
      throw ConfigError("config: observer.P_weight must be a list of 4 diagonal weights");
    }
    for (int i = 0; i < 4; ++i) {
      if (!P[i].is_number()) throw ConfigError("config: observer.P_weight entries must be numbers");
      for (int c = 0; c < 4; ++c) cfg.observer.P_weight[i][c] = 0.0;
      cfg.observer.P_weight[i][i] = P[i].get<double>();
    }
  }
  cfg.observer.d_weight = num(o, "d_weight", cfg.observer.d_weight, "observer");

  const json& c = j["controller"];
  check_keys(c,
             {"speed_kp", "speed_ki", "torque_limit", "flux_kp", "flux_ki", "id_limit",
              "current_kp", "current_ki", "v_limit", "flux_floor", "preflux_time",
              "psi_s_ref"},
             "controller");
  cfg.controller.speed_kp = num(c, "speed_kp", cfg.controller.speed_kp, "controller");
  cfg.controller.speed_ki = num(c, "speed_ki", cfg.controller.speed_ki, "controller");
  cfg.controller.torque_limit =
      num(c, "torque_limit", cfg.controller.torque_limit, "controller");
  cfg.controller.flux_kp = num(c, "flux_kp", cfg.controller.flux_kp, "controller");
  cfg.controller.flux_ki = num(c, "flux_ki", cfg.controller.flux_ki, "controller");
  cfg.controller.id_limit = num(c, "id_limit", cfg.controller.id_limit, "controller");
  cfg.controller.current_kp =
      num(c, "current_kp", cfg.controller.current_kp, "controller");
  cfg.controller.current_ki =
      num(c, "current_ki", cfg.controller.current_ki, "controller");
  cfg.controller.v_limit = num(c, "v_limit", cfg.controller.v_limit, "controller");
  cfg.controller.flux_floor =
      num(c, "flux_floor", cfg.controller.flux_floor, "controller");
  cfg.controller.preflux_time =
      num(c, "preflux_time", cfg.controller.preflux_time, "controller");
  cfg.psi_s_ref = num(c, "psi_s_ref", cfg.psi_s_ref, "controller");

  const json& prof = j["profiles"];
  check_keys(prof, {"speed", "load"}, "profiles");
  cfg.speed_profile = profile(prof, "speed", cfg.speed_profile);
  cfg.load_profile = profile(prof, "load", cfg.load_profile);

  const json& mis = j["mismatch"];
  check_keys(mis, {"R_r_factor", "R_s_factor"}, "mismatch");
  cfg.mismatch.R_r_factor = num(mis, "R_r_factor", cfg.mismatch.R_r_factor, "mismatch");
  cfg.mismatch.R_s_factor = num(mis, "R_s_factor", cfg.mismatch.R_s_factor, "mismatch");

  const json& noise = j["noise"];
  check_keys(noise, {"std"}, "noise");
  cfg.noise_std = num(noise, "std", cfg.noise_std, "noise");

  if (!j["mode"].is_string()) throw ConfigError("config: mode must be a string");
  const std::string mode = j["mode"].get<std::string>();
  if (mode == "sensored") {
    cfg.mode = DriveMode::kSensored;
  } else if (mode == "sensorless-asmo") {
    cfg.mode = DriveMode::kSensorlessAsmo;
  } else {
    throw ConfigError("config: mode must be \"sensored\" or \"sensorless-asmo\"");
  }

  if (!j["seed"].is_number_integer()) throw ConfigError("config: seed must be an integer");
  cfg.seed = j["seed"].get<std::uint64_t>();

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace imdrive
