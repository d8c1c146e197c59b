#pragma once

#include "imdrive/motor_model.hpp"
#include "imdrive/observer.hpp"
#include "imdrive/transforms.hpp"

// Direct stator field oriented control.  The control frame is aligned
// with the stator flux vector reconstructed from rotor flux and stator
// current; flux, speed, and the two current loops are plain PI.

namespace imdrive {

struct PiController {
  double kp{};
  double ki{};
  double integrator{};
  double out_min{};
  double out_max{};
  bool anti_windup{true};

  void validate() const;  // throws ParameterError unless out_min < out_max

  // Advances the integrator and returns the clamped output.  With
  // anti_windup the integrator is frozen while the output is pinned at a
  // limit and the error would push it further (and is itself clamped so
  // ki*integrator stays within the output range).
  double step(double error, double dt);
};

struct ControllerRefs {
  double omega_ref{};    // mechanical rad/s
  double psi_s_ref{0.9};  // stator flux magnitude, Wb
};

struct DsfocGains {
  double speed_kp = 4.5;
  double speed_ki = 125.0;
  double torque_limit = 35.0;  // N*m, symmetric

  double flux_kp = 200.0;
  double flux_ki = 2000.0;
  double id_limit = 25.0;  // A, symmetric

  double current_kp = 21.0;
  double current_ki = 4000.0;
  double v_limit = 320.0;  // V, vector magnitude clamp

  double flux_floor = 0.05;    // Wb, torque-division guard
  double preflux_time = 0.1;   // s of d-axis excitation before the speed loop runs

  void validate() const;  // throws ParameterError
};

struct ControllerState {
  PiController speed_pi;
  PiController flux_pi;
  PiController id_pi;
  PiController iq_pi;
  double theta_s{};  // last flux angle, rad
  double clock{};    // controller-local time, s

  // Builds a state whose PI limits mirror the gains' clamps.
  static ControllerState from_gains(const DsfocGains& g);
};

// psi_s = (L_m/L_r) psi_r + sigma L_s i_s, per component.  The overloads
// differ only in where the rotor flux and current come from.
AlphaBetaPair stator_flux_from_estimates(const MotorState& s, const MotorParams& p);
AlphaBetaPair stator_flux_from_estimates(const ObserverState& s, const MotorParams& p);

// One discrete control update: orient on the flux vector, close the
// speed -> torque -> i_q and flux -> i_d cascades, run the current PIs in
// the flux frame, and emit a magnitude-clamped stationary-frame voltage
// command.  Throws ControllerFault on non-finite inputs.
AlphaBetaPair control_step(ControllerState& st, const ControllerRefs& refs,
                           double omega_mech, AlphaBetaPair psi_s,
                           AlphaBetaPair i_meas, const MotorParams& p,
                           const DsfocGains& g, double dt);

}  // namespace imdrive
