#pragma once

#include <string>
#include <vector>

#include "imdrive/lyapunov.hpp"
#include "imdrive/sim/config.hpp"

namespace imdrive {

// One CSV row.  Speeds are mechanical rad/s (the estimate is divided by
// the pole-pair count so the columns compare directly).
struct StepRecord {
  double t{};
  double omega_ref{};
  double omega_true{};
  double omega_hat{};
  double psi_ra{};
  double psi_rb{};
  double psi_ra_hat{};
  double psi_rb_hat{};
  double i_a{};
  double i_b{};
  double i_a_hat{};
  double i_b_hat{};
  double v_a_cmd{};
  double v_b_cmd{};
  double Te{};
  double TL{};
  double Rr_hat{};
  double V_lyap{};
};

struct Metrics {
  double speed_rms_error{};   // mech rad/s, final half of the run
  double speed_max_error{};   // mech rad/s, final half of the run
  double convergence_time{};  // s; -1 when the band is never held
  double flux_rms_error{};    // Wb, final half of the run
  double Rr_final_error{};    // Ohm, |Rr_hat(end) - plant R_r|
  Stability stability_classification{Stability::kMarginal};
};

struct RunResult {
  std::vector<StepRecord> records;
  Metrics metrics{};
  bool aborted{};
  std::string abort_reason;
};

// Runs the coupled plant + observer + discrete controller scenario with
// one global fixed RK4 step.  The controller output is held over each
// step; measurement noise offsets are redrawn once per step.  Sensorless
// mode feeds the controller only observer outputs and measured currents;
// sensored mode feeds true speed and true flux, with the observer still
// integrated alongside for its telemetry.  On controller fault or
// non-finite state the result carries the records up to the failure and
// the reason; metrics are then computed over whatever exists.
RunResult run_scenario(const ScenarioConfig& cfg);

// Metric definitions (over the records as recorded):
//   speed/flux RMS and max: final 50% of the records;
//   convergence_time: earliest t from which |omega_hat - omega_true|
//     stays below 2% of the largest |speed reference| to the end (-1 if
//     that never happens);
//   stability_classification: monitor_trajectory on the V column.
// Throws InvalidInput on empty records.
Metrics compute_metrics(const std::vector<StepRecord>& records,
                        const ScenarioConfig& cfg);

}  // namespace imdrive
