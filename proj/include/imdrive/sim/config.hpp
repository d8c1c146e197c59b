#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imdrive/dsfoc.hpp"
#include "imdrive/motor_model.hpp"
#include "imdrive/observer.hpp"
#include "imdrive/sim/profiles.hpp"

namespace imdrive {

enum class DriveMode {
  kSensored,        // controller fed true speed and flux
  kSensorlessAsmo,  // controller fed observer outputs only
};

std::string to_string(DriveMode m);

struct MismatchConfig {
  double R_r_factor = 1.0;  // plant-vs-observer scale
  double R_s_factor = 1.0;
};

// A full scenario description.  Everything the run needs is in here, so
// one config plus one seed pins the output bit-for-bit.
struct ScenarioConfig {
  double dt = 1e-4;       // s
  double duration = 2.0;  // s

  MotorParams motor;          // nominal; the observer's model
  ObserverGains observer;
  DsfocGains controller;
  double psi_s_ref = 0.9;     // Wb

  std::vector<ProfilePoint> speed_profile{{0.0, 0.0}};  // piecewise linear, mech rad/s
  std::vector<ProfilePoint> load_profile{{0.0, 0.0}};   // piecewise constant, N*m

  MismatchConfig mismatch;
  double noise_std = 0.0;  // A, additive Gaussian on measured currents
  DriveMode mode = DriveMode::kSensorlessAsmo;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError / ParameterError
};

// Strict parse of the JSON text: top-level keys must be exactly
// {schema_version, sim, motor, observer, controller, profiles, mismatch,
// noise, mode, seed}; unknown keys anywhere are rejected.  Leaf keys are
// optional and fall back to the documented defaults.
ScenarioConfig parse_config(const std::string& json_text);

ScenarioConfig load_config(const std::string& path);  // throws ConfigError

}  // namespace imdrive
