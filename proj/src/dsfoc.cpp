#include "imdrive/dsfoc.hpp"

#include <algorithm>
#include <cmath>

#include "imdrive/errors.hpp"

namespace imdrive {

void PiController::validate() const {
  if (!(out_min < out_max)) {
    throw ParameterError("PiController: output limits must satisfy min < max");
  }
  if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(integrator)) {
    throw ParameterError("PiController: non-finite gain or state");
  }
}

double PiController::step(double error, double dt) {
  const double unclamped = kp * error + ki * integrator;
  const bool high = unclamped > out_max;
  const bool low = unclamped < out_min;
  const bool pushing_out = (high && error > 0.0) || (low && error < 0.0);
  if (!anti_windup || !pushing_out) {
    integrator += error * dt;
    if (anti_windup && ki > 0.0) {
      // Keep the stored integral inside the output span so recovery from
      // saturation starts immediately.
      integrator = std::clamp(integrator, out_min / ki, out_max / ki);
    }
  }
  return std::clamp(kp * error + ki * integrator, out_min, out_max);
}

void DsfocGains::validate() const {
  if (!(torque_limit > 0.0) || !(id_limit > 0.0) || !(v_limit > 0.0)) {
    throw ParameterError("DsfocGains: limits must be positive");
  }
  if (!(flux_floor > 0.0)) {
    throw ParameterError("DsfocGains: flux_floor must be positive");
  }
  if (speed_kp < 0.0 || speed_ki < 0.0 || flux_kp < 0.0 || flux_ki < 0.0 ||
      current_kp < 0.0 || current_ki < 0.0) {
    throw ParameterError("DsfocGains: gains must be nonnegative");
  }
  if (preflux_time < 0.0) {
    throw ParameterError("DsfocGains: preflux_time must be nonnegative");
  }
}

ControllerState ControllerState::from_gains(const DsfocGains& g) {
  g.validate();
  ControllerState st;
  st.speed_pi = {g.speed_kp, g.speed_ki, 0.0, -g.torque_limit, g.torque_limit, true};
  st.flux_pi = {g.flux_kp, g.flux_ki, 0.0, -g.id_limit, g.id_limit, true};
  st.id_pi = {g.current_kp, g.current_ki, 0.0, -g.v_limit, g.v_limit, true};
  st.iq_pi = {g.current_kp, g.current_ki, 0.0, -g.v_limit, g.v_limit, true};
  return st;
}

AlphaBetaPair stator_flux_from_estimates(const MotorState& s, const MotorParams& p) {
  const double r = p.L_m / p.L_r;
  const double sl = derived(p).sigma_L_s;
  return {r * s.psi_alpha + sl * s.i_alpha, r * s.psi_beta + sl * s.i_beta};
}

AlphaBetaPair stator_flux_from_estimates(const ObserverState& s, const MotorParams& p) {
  const double r = p.L_m / p.L_r;
  const double sl = derived(p).sigma_L_s;
  return {r * s.psi_alpha_hat + sl * s.i_alpha_hat,
          r * s.psi_beta_hat + sl * s.i_beta_hat};
}

AlphaBetaPair control_step(ControllerState& st, const ControllerRefs& refs,
                           double omega_mech, AlphaBetaPair psi_s,
                           AlphaBetaPair i_meas, const MotorParams& p,
                           const DsfocGains& g, double dt) {
  if (!(dt > 0.0)) throw ControllerFault("control_step: dt must be positive");
  if (!std::isfinite(omega_mech) || !std::isfinite(psi_s.alpha) ||
      !std::isfinite(psi_s.beta) || !std::isfinite(i_meas.alpha) ||
      !std::isfinite(i_meas.beta) || !std::isfinite(refs.omega_ref)) {
    throw ControllerFault("control_step: non-finite input");
  }
  // psi_s_ref == 0 is a de-energized drive (everything stays quiescent),
  // so only negative or non-finite references are faults.
  if (!std::isfinite(refs.psi_s_ref) || refs.psi_s_ref < 0.0) {
    throw ControllerFault("control_step: psi_s_ref must be nonnegative");
  }

  const double psi_mag = std::hypot(psi_s.alpha, psi_s.beta);
  // Field orientation.  Below the floor (uninitialized machine) the last
  // angle is kept instead of trusting atan2 of numerical noise.
  if (psi_mag > 1e-9) st.theta_s = std::atan2(psi_s.beta, psi_s.alpha);

  const DqPair i_dq = park(i_meas, st.theta_s);

  // Flux loop keeps running during preflux; the speed loop is released
  // only once the machine is magnetized.
  const double id_ref = st.flux_pi.step(refs.psi_s_ref - psi_mag, dt);

  double iq_ref = 0.0;
  if (st.clock >= g.preflux_time) {
    const double T_ref = st.speed_pi.step(refs.omega_ref - omega_mech, dt);
    iq_ref = T_ref / (1.5 * p.pole_pairs * std::max(psi_mag, g.flux_floor));
  }

  const double v_d = st.id_pi.step(id_ref - i_dq.d, dt);
  const double v_q = st.iq_pi.step(iq_ref - i_dq.q, dt);

  AlphaBetaPair v = inverse_park({v_d, v_q}, st.theta_s);
  const double v_mag = std::hypot(v.alpha, v.beta);
  if (v_mag > g.v_limit) {
    const double scale = g.v_limit / v_mag;
    v.alpha *= scale;
    v.beta *= scale;
  }

  st.clock += dt;
  return v;
}

}  // namespace imdrive
