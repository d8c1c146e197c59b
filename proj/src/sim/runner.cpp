#include "imdrive/sim/runner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "imdrive/errors.hpp"
#include "imdrive/sim/integrate.hpp"
#include "imdrive/sim/rng.hpp"

namespace imdrive {
namespace {

// Coupled state layout for the single global RK4 step.
enum : std::size_t {
  kIa, kIb, kPa, kPb, kWm, kTh,       // plant
  kIha, kIhb, kPha, kPhb, kZ, kRh,    // observer + adaptation states
  kNState
};

bool all_finite(const std::array<double, kNState>& y) {
  for (double v : y)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();

  MotorParams plant_p = cfg.motor;
  plant_p.R_r *= cfg.mismatch.R_r_factor;
  plant_p.R_s *= cfg.mismatch.R_s_factor;
  plant_p.validate();
  const DerivedParams plant_d = derived(plant_p);

  const MotorParams& nom = cfg.motor;  // what the observer believes
  const DerivedParams nom_d = derived(nom);
  const ObserverGains& g = cfg.observer;
  const double P = nom.pole_pairs;

  LyapunovWeights vw;
  vw.P = g.P_weight;
  vw.d = g.d_weight;
  vw.validate();

  ControllerState ctl = ControllerState::from_gains(cfg.controller);
  ControllerRefs refs{0.0, cfg.psi_s_ref};

  Xoshiro256pp rng(cfg.seed);

  std::array<double, kNState> y{};
  y[kRh] = nom.R_r;

  const auto steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));

  RunResult res;
  res.records.reserve(steps + 1);

  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;

    // One noise draw per step, held through the RK4 stages so plant and
    // observer see a consistent measurement during the substeps.
    double n_a = 0.0, n_b = 0.0;
    if (cfg.noise_std > 0.0) {
      n_a = cfg.noise_std * rng.gaussian();
      n_b = cfg.noise_std * rng.gaussian();
    }
    const AlphaBetaPair i_meas{y[kIa] + n_a, y[kIb] + n_b};

    refs.omega_ref = piecewise_linear(cfg.speed_profile, t);
    const double T_L = piecewise_constant(cfg.load_profile, t);

    AlphaBetaPair v_cmd{0.0, 0.0};
    double omega_hat_e = 0.0;
    try {
      const ObserverState obs{y[kIha], y[kIhb], y[kPha], y[kPhb], 0.0, y[kRh], y[kZ]};
      const SpeedAdaptation sa = speed_adaptation_rate(
          obs, y[kIha] - i_meas.alpha, y[kIhb] - i_meas.beta, g);
      omega_hat_e = sa.omega_hat;

      double omega_fb;
      AlphaBetaPair psi_s;
      if (cfg.mode == DriveMode::kSensored) {
        const MotorState truth{y[kIa], y[kIb], y[kPa], y[kPb], y[kWm], y[kTh]};
        omega_fb = y[kWm];
        psi_s = stator_flux_from_estimates(truth, nom);
      } else {
        omega_fb = omega_hat_e / P;
        psi_s = stator_flux_from_estimates(obs, nom);
      }
      v_cmd = control_step(ctl, refs, omega_fb, psi_s, i_meas, nom, cfg.controller,
                           cfg.dt);
    } catch (const std::exception& e) {
      char buf[192];
      std::snprintf(buf, sizeof buf, "%s (t = %.6f s)", e.what(), t);
      res.aborted = true;
      res.abort_reason = buf;
      break;
    }

    // Monitoring function over the true estimation errors.
    const ErrorVector err{y[kIha] - y[kIa], y[kIhb] - y[kIb], y[kPha] - y[kPa],
                          y[kPhb] - y[kPb]};
    const double V = evaluate_V(err, omega_hat_e - P * y[kWm], {}, {}, vw);

    const MotorState ps{y[kIa], y[kIb], y[kPa], y[kPb], y[kWm], y[kTh]};
    res.records.push_back({t, refs.omega_ref, y[kWm], omega_hat_e / P, y[kPa], y[kPb],
                           y[kPha], y[kPhb], y[kIa], y[kIb], y[kIha], y[kIhb],
                           v_cmd.alpha, v_cmd.beta, torque(ps, plant_p), T_L, y[kRh],
                           V});

    if (k == steps) break;

    const auto f = [&](double, const std::array<double, kNState>& s) {
      const MotorState st{s[kIa], s[kIb], s[kPa], s[kPb], s[kWm], s[kTh]};
      const MotorInputs in{v_cmd.alpha, v_cmd.beta, T_L};
      const ElectricalRates er = electrical_derivatives(st, in, plant_p, plant_d);
      const double Te = torque(st, plant_p);
      const MechanicalRates mr = mechanical_derivative(st, Te, T_L, plant_p);

      const ObserverState ob{s[kIha], s[kIhb], s[kPha], s[kPhb], 0.0, s[kRh], s[kZ]};
      const ObserverRates orr = observer_derivatives(
          ob, {s[kIa] + n_a, s[kIb] + n_b}, v_cmd, nom, nom_d, g);

      return std::array<double, kNState>{
          er.di_alpha,      er.di_beta,      er.dpsi_alpha,      er.dpsi_beta,
          mr.domega_m,      mr.dtheta_m,     orr.di_alpha_hat,   orr.di_beta_hat,
          orr.dpsi_alpha_hat, orr.dpsi_beta_hat, orr.dspeed_integrator, orr.dR_r_hat};
    };

    try {
      y = rk4_step<kNState>(f, t, y, cfg.dt);
    } catch (const std::exception& e) {
      char buf[192];
      std::snprintf(buf, sizeof buf, "%s (integrating from t = %.6f s)", e.what(), t);
      res.aborted = true;
      res.abort_reason = buf;
      break;
    }
    y[kRh] = clamp_R_r_hat(y[kRh], nom, g);
    y[kTh] = wrap_angle(y[kTh]);
    if (!all_finite(y)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "non-finite state after step to t = %.6f s",
                    t + cfg.dt);
      res.aborted = true;
      res.abort_reason = buf;
      break;
    }
  }

  if (!res.records.empty()) {
    try {
      res.metrics = compute_metrics(res.records, cfg);
    } catch (const std::exception&) {
      // An early abort can leave too few records for the stability
      // monitor; the partial result still goes back to the caller.
    }
  }
  return res;
}

Metrics compute_metrics(const std::vector<StepRecord>& records,
                        const ScenarioConfig& cfg) {
  if (records.empty()) throw InvalidInput("compute_metrics: no records");

  Metrics m;
  const std::size_t n = records.size();
  const std::size_t half = n / 2;  // final 50% window starts here

  double sum_sq_w = 0.0, max_w = 0.0, sum_sq_f = 0.0;
  for (std::size_t k = half; k < n; ++k) {
    const double ew = records[k].omega_hat - records[k].omega_true;
    const double efa = records[k].psi_ra_hat - records[k].psi_ra;
    const double efb = records[k].psi_rb_hat - records[k].psi_rb;
    sum_sq_w += ew * ew;
    sum_sq_f += efa * efa + efb * efb;
    max_w = std::max(max_w, std::abs(ew));
  }
  const auto cnt = static_cast<double>(n - half);
  m.speed_rms_error = std::sqrt(sum_sq_w / cnt);
  m.speed_max_error = max_w;
  m.flux_rms_error = std::sqrt(sum_sq_f / cnt);

  double max_ref = 0.0;
  for (const auto& r : records) max_ref = std::max(max_ref, std::abs(r.omega_ref));
  const double band = 0.02 * max_ref;
  // Earliest index from which the estimation error stays inside the band
  // to the end.  <= so a zero-reference, zero-error run converges at 0.
  std::size_t idx = n;
  for (std::size_t k = n; k-- > 0;) {
    if (std::abs(records[k].omega_hat - records[k].omega_true) <= band) {
      idx = k;
    } else {
      break;
    }
  }
  m.convergence_time = idx == n ? -1.0 : records[idx].t;

  m.Rr_final_error =
      std::abs(records.back().Rr_hat - cfg.motor.R_r * cfg.mismatch.R_r_factor);

  std::vector<double> V(n);
  for (std::size_t k = 0; k < n; ++k) V[k] = records[k].V_lyap;
  // Aborted runs span less than cfg.duration; keep the transient window
  // inside what was actually recorded.
  const double span = static_cast<double>(n) * cfg.dt;
  const StabilityReport rep =
      monitor_trajectory(V, cfg.dt, std::min(cfg.duration, span) / 4.0);
  m.stability_classification = rep.classification;
  return m;
}

}  // namespace imdrive
