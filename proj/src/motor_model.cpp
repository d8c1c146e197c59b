#include "imdrive/motor_model.hpp"

#include <cmath>
#include <numbers>

namespace imdrive {

void MotorParams::validate() const {
  if (!(R_s > 0.0) || !(R_r > 0.0)) {
    throw ParameterError("motor: resistances must be positive");
  }
  if (!(L_s > 0.0) || !(L_r > 0.0) || !(L_m > 0.0)) {
    throw ParameterError("motor: inductances must be positive");
  }
  if (!(L_m * L_m < L_s * L_r)) {
    throw ParameterError("motor: require L_m^2 < L_s*L_r (nonzero leakage)");
  }
  if (pole_pairs < 1) {
    throw ParameterError("motor: pole_pairs must be >= 1");
  }
  if (!(J > 0.0)) {
    throw ParameterError("motor: inertia must be positive");
  }
  if (B < 0.0) {
    throw ParameterError("motor: friction must be non-negative");
  }
  if (!std::isfinite(R_s) || !std::isfinite(R_r) || !std::isfinite(L_s) ||
      !std::isfinite(L_r) || !std::isfinite(L_m) || !std::isfinite(J) ||
      !std::isfinite(B)) {
    throw ParameterError("motor: parameters must be finite");
  }
}

DerivedParams derived(const MotorParams& p) {
  p.validate();
  DerivedParams d;
  d.sigma = 1.0 - (p.L_m * p.L_m) / (p.L_s * p.L_r);
  d.tau_r = p.L_r / p.R_r;
  d.sigma_L_s = d.sigma * p.L_s;
  d.K = p.L_m / (d.sigma_L_s * p.L_r);
  d.gamma = p.R_s / d.sigma_L_s + p.R_r * p.L_m * p.L_m / (d.sigma_L_s * p.L_r * p.L_r);
  return d;
}

namespace {

bool finite_state(const MotorState& s) {
  return std::isfinite(s.i_alpha) && std::isfinite(s.i_beta) &&
         std::isfinite(s.psi_alpha) && std::isfinite(s.psi_beta) &&
         std::isfinite(s.omega_m) && std::isfinite(s.theta_m);
}

}  // namespace

ElectricalRates electrical_derivatives(const MotorState& s, const MotorInputs& in,
                                       const MotorParams& p, const DerivedParams& d) {
  if (!finite_state(s) || !std::isfinite(in.v_alpha) || !std::isfinite(in.v_beta)) {
    throw InvalidInput("electrical_derivatives: non-finite state or input");
  }
  const double omega_e = p.pole_pairs * s.omega_m;
  const double inv_tau = 1.0 / d.tau_r;
  const double inv_sls = 1.0 / d.sigma_L_s;

  ElectricalRates r;
  r.di_alpha = -d.gamma * s.i_alpha +
               d.K * (s.psi_alpha * inv_tau + omega_e * s.psi_beta) +
               in.v_alpha * inv_sls;
  r.di_beta = -d.gamma * s.i_beta +
              d.K * (s.psi_beta * inv_tau - omega_e * s.psi_alpha) +
              in.v_beta * inv_sls;
  r.dpsi_alpha = p.L_m * inv_tau * s.i_alpha - s.psi_alpha * inv_tau - omega_e * s.psi_beta;
  r.dpsi_beta = p.L_m * inv_tau * s.i_beta - s.psi_beta * inv_tau + omega_e * s.psi_alpha;
  return r;
}

double torque(const MotorState& s, const MotorParams& p) {
  return 1.5 * p.pole_pairs * (p.L_m / p.L_r) *
         (s.psi_alpha * s.i_beta - s.psi_beta * s.i_alpha);
}

MechanicalRates mechanical_derivative(const MotorState& s, double T_e, double T_L,
                                      const MotorParams& p) {
  if (!std::isfinite(T_e) || !std::isfinite(T_L)) {
    throw InvalidInput("mechanical_derivative: non-finite torque");
  }
  return {(T_e - T_L - p.B * s.omega_m) / p.J, s.omega_m};
}

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(theta, two_pi);
  if (w < 0.0) w += two_pi;
  return w;
}

double input_power(const MotorState& s, const MotorInputs& in) {
  return 1.5 * (in.v_alpha * s.i_alpha + in.v_beta * s.i_beta);
}

namespace {

// Rotor current recovered from (i_s, psi_r).
inline void rotor_current(const MotorState& s, const MotorParams& p,
                          double& ir_a, double& ir_b) {
  ir_a = (s.psi_alpha - p.L_m * s.i_alpha) / p.L_r;
  ir_b = (s.psi_beta - p.L_m * s.i_beta) / p.L_r;
}

}  // namespace

double copper_loss(const MotorState& s, const MotorParams& p) {
  double ir_a, ir_b;
  rotor_current(s, p, ir_a, ir_b);
  const double is2 = s.i_alpha * s.i_alpha + s.i_beta * s.i_beta;
  const double ir2 = ir_a * ir_a + ir_b * ir_b;
  return 1.5 * (p.R_s * is2 + p.R_r * ir2);
}

double magnetic_energy(const MotorState& s, const MotorParams& p) {
  double ir_a, ir_b;
  rotor_current(s, p, ir_a, ir_b);
  const double is2 = s.i_alpha * s.i_alpha + s.i_beta * s.i_beta;
  const double ir2 = ir_a * ir_a + ir_b * ir_b;
  const double cross = s.i_alpha * ir_a + s.i_beta * ir_b;
  return 1.5 * 0.5 * (p.L_s * is2 + p.L_r * ir2 + 2.0 * p.L_m * cross);
}

}  // namespace imdrive
