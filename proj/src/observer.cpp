#include "imdrive/observer.hpp"

#include <algorithm>
#include <cmath>

namespace imdrive {

void ObserverGains::validate() const {
  if (!(M >= 0.0) || !std::isfinite(M)) {
    throw ParameterError("observer: switching amplitude M must be >= 0");
  }
  if (!(phi >= 0.0) || !std::isfinite(phi)) {
    throw ParameterError("observer: boundary layer phi must be >= 0");
  }
  if (k_omega_p < 0.0 || k_omega_i < 0.0 || k_R < 0.0) {
    throw ParameterError("observer: adaptation gains must be >= 0");
  }
  if (!(R_r_min_factor > 0.0) || !(R_r_max_factor > R_r_min_factor)) {
    throw ParameterError("observer: R_r clamp bracket is empty");
  }
  if (!(d_weight > 0.0)) {
    throw ParameterError("observer: d_weight must be positive");
  }
}

double switching_term(double e, double M, double phi) {
  if (!std::isfinite(e)) {
    throw InvalidInput("switching_term: non-finite error");
  }
  if (phi > 0.0) {
    const double r = e / phi;
    return M * std::clamp(r, -1.0, 1.0);
  }
  if (e > 0.0) return M;
  if (e < 0.0) return -M;
  return 0.0;
}

SpeedAdaptation speed_adaptation_rate(const ObserverState& obs, double e_i_alpha,
                                      double e_i_beta, const ObserverGains& g) {
  SpeedAdaptation out;
  out.error_signal = e_i_beta * obs.psi_alpha_hat - e_i_alpha * obs.psi_beta_hat;
  out.integrator_rate = out.error_signal;
  out.omega_hat = g.k_omega_p * out.error_signal + g.k_omega_i * obs.speed_integrator;
  return out;
}

double clamp_R_r_hat(double R_r_hat, const MotorParams& nominal, const ObserverGains& g) {
  return std::clamp(R_r_hat, g.R_r_min_factor * nominal.R_r, g.R_r_max_factor * nominal.R_r);
}

double resistance_adaptation_rate(const ObserverState& obs, double e_i_alpha,
                                  double e_i_beta, const MotorParams& nominal,
                                  const ObserverGains& g) {
  // Gradient direction: current error projected onto the estimated rotor
  // current (psi_hat - L_m i_hat)/L_r, the lever through which R_r enters
  // the current equation.
  const double ir_a = (obs.psi_alpha_hat - nominal.L_m * obs.i_alpha_hat) / nominal.L_r;
  const double ir_b = (obs.psi_beta_hat - nominal.L_m * obs.i_beta_hat) / nominal.L_r;
  double rate = -g.k_R * (e_i_alpha * ir_a + e_i_beta * ir_b);

  // Freeze at the clamp bracket instead of winding past it.
  const double lo = g.R_r_min_factor * nominal.R_r;
  const double hi = g.R_r_max_factor * nominal.R_r;
  if ((obs.R_r_hat <= lo && rate < 0.0) || (obs.R_r_hat >= hi && rate > 0.0)) {
    rate = 0.0;
  }
  return rate;
}

ObserverRates observer_derivatives(const ObserverState& obs, const AlphaBetaPair& i_meas,
                                   const AlphaBetaPair& v_cmd, const MotorParams& nominal,
                                   const DerivedParams& d, const ObserverGains& g) {
  detail::require_finite2(i_meas.alpha, i_meas.beta, "observer_derivatives");
  detail::require_finite2(v_cmd.alpha, v_cmd.beta, "observer_derivatives");

  // Coefficients that depend on the adapted rotor resistance.
  const double R_r = clamp_R_r_hat(obs.R_r_hat, nominal, g);
  const double inv_tau = R_r / nominal.L_r;
  const double gamma = nominal.R_s / d.sigma_L_s +
                       R_r * nominal.L_m * nominal.L_m /
                           (d.sigma_L_s * nominal.L_r * nominal.L_r);
  const double inv_sls = 1.0 / d.sigma_L_s;

  const double e_a = obs.i_alpha_hat - i_meas.alpha;
  const double e_b = obs.i_beta_hat - i_meas.beta;
  const double v_a = switching_term(e_a, g.M, g.phi);
  const double v_b = switching_term(e_b, g.M, g.phi);

  const SpeedAdaptation sp = speed_adaptation_rate(obs, e_a, e_b, g);
  const double w = sp.omega_hat;

  ObserverRates r;
  r.di_alpha_hat = -gamma * obs.i_alpha_hat +
                   d.K * (obs.psi_alpha_hat * inv_tau + w * obs.psi_beta_hat) +
                   v_cmd.alpha * inv_sls - v_a;
  r.di_beta_hat = -gamma * obs.i_beta_hat +
                  d.K * (obs.psi_beta_hat * inv_tau - w * obs.psi_alpha_hat) +
                  v_cmd.beta * inv_sls - v_b;
  r.dpsi_alpha_hat = nominal.L_m * inv_tau * obs.i_alpha_hat -
                     obs.psi_alpha_hat * inv_tau - w * obs.psi_beta_hat +
                     g.L[0][0] * v_a + g.L[0][1] * v_b;
  r.dpsi_beta_hat = nominal.L_m * inv_tau * obs.i_beta_hat -
                    obs.psi_beta_hat * inv_tau + w * obs.psi_alpha_hat +
                    g.L[1][0] * v_a + g.L[1][1] * v_b;
  r.dspeed_integrator = sp.integrator_rate;
  r.dR_r_hat = resistance_adaptation_rate(obs, e_a, e_b, nominal, g);
  r.omega_hat = w;
  return r;
}

void seed_speed_estimate(ObserverState& obs, double omega0, const ObserverGains& g) {
  obs.speed_integrator = g.k_omega_i > 0.0 ? omega0 / g.k_omega_i : 0.0;
  obs.omega_hat = g.k_omega_i > 0.0 ? omega0 : 0.0;
}

}  // namespace imdrive
