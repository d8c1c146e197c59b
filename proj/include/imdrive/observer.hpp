#pragma once

// Adaptive sliding-mode observer for the induction machine.
//
// The observer copies the electrical model, driven by the commanded
// stator voltage and corrected through a switching injection built from
// the current estimation error e = (estimate - measurement):
//
//   v_i = M * sgn(e_i)            (sat(e_i/phi) inside a boundary layer)
//
// The current equations receive -v, the flux equations receive +L*v.
// Rotor speed is not integrated from mechanics; it is adapted from the
// cross product of the current error with the estimated rotor flux
// through a PI law (pure-I recovered with k_omega_p = 0).  The rotor
// resistance estimate follows a gradient law driven by the same current
// error projected onto the estimated rotor current, clamped to a
// physical bracket around the nominal value.

#include <array>

#include "imdrive/motor_model.hpp"
#include "imdrive/transforms.hpp"

namespace imdrive {

using Mat2 = std::array<std::array<double, 2>, 2>;
using Mat4 = std::array<std::array<double, 4>, 4>;

struct ObserverGains {
  // Defaults were tuned against the linearized error spectrum across
  // 1..55 Hz at rated flux and checked in time-domain runs.  The flux
  // injection is a pure quadrature (rotational) correction: in-phase
  // injection of either sign destabilizes one end of the speed range.
  Mat2 L{{{0.0, 0.02}, {-0.02, 0.0}}};  // flux-channel injection gain
  double M = 500.0;                     // switching amplitude, A/s
  double phi = 0.2;                     // boundary-layer half width, A
  double k_omega_p = 100.0;             // speed adaptation, rad/s per (A Wb)
  double k_omega_i = 2e5;               // rad/s^2 per (A Wb)
  double k_R = 30.0;                    // resistance adaptation gain
  double R_r_min_factor = 0.2;          // clamp bracket around nominal R_r
  double R_r_max_factor = 5.0;

  // Weights of the scalar monitoring function V; see lyapunov.hpp.
  Mat4 P_weight{{{0.01, 0, 0, 0}, {0, 0.01, 0, 0}, {0, 0, 0.1, 0}, {0, 0, 0, 0.1}}};
  double d_weight = 1e-6;

  void validate() const;  // throws ParameterError
};

struct ObserverState {
  double i_alpha_hat{};
  double i_beta_hat{};
  double psi_alpha_hat{};
  double psi_beta_hat{};
  // PI output of the speed adaptation; derived from speed_integrator and
  // the instantaneous error signal, refreshed after each integration step.
  // Electrical rad/s.
  double omega_hat{};
  double R_r_hat{};
  double speed_integrator{};
};

// Current/flux estimation errors, estimate minus truth, stationary frame.
struct ErrorVector {
  double e_i_alpha{};
  double e_i_beta{};
  double e_psi_alpha{};
  double e_psi_beta{};
};

struct ObserverRates {
  double di_alpha_hat{};
  double di_beta_hat{};
  double dpsi_alpha_hat{};
  double dpsi_beta_hat{};
  double dspeed_integrator{};
  double dR_r_hat{};
  // Speed estimate consistent with the state the rates were evaluated at.
  double omega_hat{};
};

// M*sgn(e) with sgn(0) = 0, or the saturated linear segment M*e/phi for
// |e| <= phi when phi > 0.
double switching_term(double e, double M, double phi);

struct SpeedAdaptation {
  double error_signal{};     // e_i x psi_hat, drives the PI
  double integrator_rate{};  // equals error_signal
  double omega_hat{};        // k_p * error + k_i * integrator
};

SpeedAdaptation speed_adaptation_rate(const ObserverState& obs, double e_i_alpha,
                                      double e_i_beta, const ObserverGains& g);

// Rate of the rotor-resistance estimate, ohm/s, gated to zero when it
// would push R_r_hat outside [R_r_min_factor, R_r_max_factor] * R_r.
double resistance_adaptation_rate(const ObserverState& obs, double e_i_alpha,
                                  double e_i_beta, const MotorParams& nominal,
                                  const ObserverGains& g);

// Full observer dynamics given measured currents and the commanded
// voltage.  `nominal`/`d` describe the parameter set the observer
// believes in; R_r_hat overrides nominal.R_r inside.
ObserverRates observer_derivatives(const ObserverState& obs, const AlphaBetaPair& i_meas,
                                   const AlphaBetaPair& v_cmd, const MotorParams& nominal,
                                   const DerivedParams& d, const ObserverGains& g);

// Seeds the speed estimate: loads the integrator so the PI output starts
// at omega0 (requires k_omega_i > 0 for a nonzero omega0 to persist).
void seed_speed_estimate(ObserverState& obs, double omega0, const ObserverGains& g);

double clamp_R_r_hat(double R_r_hat, const MotorParams& nominal, const ObserverGains& g);

}  // namespace imdrive
