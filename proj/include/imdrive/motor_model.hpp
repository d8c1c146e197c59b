#pragma once

// Squirrel-cage induction machine in the stationary alpha-beta frame.
//
// Electrical state is (stator current, rotor flux); the stator flux is
// eliminated through the leakage coefficient.  All quantities are
// amplitude-invariant two-phase values; powers and torque carry the 3/2
// factor back to three-phase totals.

#include "imdrive/errors.hpp"

namespace imdrive {

struct MotorParams {
  double R_s{};        // stator resistance, ohm
  double R_r{};        // rotor resistance referred to stator, ohm
  double L_s{};        // stator self inductance, H
  double L_r{};        // rotor self inductance, H
  double L_m{};        // magnetizing inductance, H
  int pole_pairs{};    // electrical pole pairs
  double J{};          // rotor inertia, kg m^2
  double B{};          // viscous friction, N m s/rad

  // Throws ParameterError unless all parameters are physical:
  // resistances/inductances positive, L_m^2 < L_s*L_r, pole_pairs >= 1,
  // J > 0, B >= 0.
  void validate() const;
};

// Quantities recomputed from MotorParams whenever the params change.
struct DerivedParams {
  double sigma{};      // total leakage coefficient, 1 - L_m^2/(L_s L_r)
  double tau_r{};      // rotor time constant L_r/R_r, s
  double K{};          // flux coupling gain L_m/(sigma L_s L_r)
  double gamma{};      // stator current decay rate, 1/s
  double sigma_L_s{};  // transient inductance sigma*L_s, H
};

DerivedParams derived(const MotorParams& p);

struct MotorState {
  double i_alpha{};    // stator current, A
  double i_beta{};
  double psi_alpha{};  // rotor flux linkage, Wb
  double psi_beta{};
  double omega_m{};    // mechanical shaft speed, rad/s
  double theta_m{};    // mechanical shaft angle, rad (unwrapped)
};

struct MotorInputs {
  double v_alpha{};    // stator voltage command, V
  double v_beta{};
  double T_L{};        // load torque, N m
};

struct ElectricalRates {
  double di_alpha{};
  double di_beta{};
  double dpsi_alpha{};
  double dpsi_beta{};
};

struct MechanicalRates {
  double domega_m{};
  double dtheta_m{};
};

// Continuous-time electrical dynamics at electrical speed P*omega_m.
// Throws InvalidInput on a non-finite state or input.
ElectricalRates electrical_derivatives(const MotorState& s, const MotorInputs& in,
                                       const MotorParams& p, const DerivedParams& d);

// Electromagnetic torque, N m (three-phase total).
double torque(const MotorState& s, const MotorParams& p);

// J*domega = Te - TL - B*omega; dtheta = omega.
MechanicalRates mechanical_derivative(const MotorState& s, double T_e, double T_L,
                                      const MotorParams& p);

// Maps an unwrapped angle into [0, 2*pi).
double wrap_angle(double theta);

// Power bookkeeping helpers (three-phase totals).
double input_power(const MotorState& s, const MotorInputs& in);
double copper_loss(const MotorState& s, const MotorParams& p);
double magnetic_energy(const MotorState& s, const MotorParams& p);

}  // namespace imdrive
