#pragma once

// Stability bookkeeping for the adaptive observer.
//
// The scalar monitoring function is
//   V = 1/2 e_x' P e_x + d/2 dw^2 + sum_i alpha_i da_i^2 + sum_i beta_i db_i^2
// with e_x the current/flux estimation errors, dw the speed estimation
// error and da/db parameter estimation errors with diagonal weights.
// Trajectories of V are classified by the sign of a smoothed dV/dt; a
// dead zone keeps numerical chatter around zero from flipping verdicts.

#include <complex>
#include <span>
#include <vector>

#include "imdrive/motor_model.hpp"
#include "imdrive/observer.hpp"

namespace imdrive {

struct LyapunovWeights {
  Mat4 P{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
  double d = 1.0;
  std::vector<double> alpha_w;  // diagonal, one entry per adapted parameter
  std::vector<double> beta_w;

  void validate() const;  // P symmetric positive definite, d > 0, weights > 0
};

double evaluate_V(const ErrorVector& e, double delta_omega,
                  std::span<const double> delta_a, std::span<const double> delta_b,
                  const LyapunovWeights& w);

// Symmetric eigenvalue test; rejects non-symmetric input.  The matrix is
// row-major with n*n entries.
bool is_positive_definite(std::span<const double> m, std::size_t n);

enum class Stability {
  kAsymptoticallyStable,
  kMarginal,
  kUnstable,
};

const char* to_string(Stability s);

struct StabilityReport {
  std::vector<double> V_series;
  std::vector<double> Vdot_series;  // raw central differences, for diagnostics
  double max_Vdot_after_transient{};
  Stability classification{};
};

// Classifies a sampled V(t).  The verdict ignores the first
// transient_window seconds, smooths dV/dt with a 10 ms moving average,
// and treats V below the dead-zone floor (1e-6) as converged.
StabilityReport monitor_trajectory(std::span<const double> V_samples, double dt,
                                   double transient_window);

// Spectrum of the observer error dynamics linearized inside the boundary
// layer around an operating point (rotor flux and speed taken from
// `op`).  Includes the speed-adaptation integrator as a fifth state when
// k_omega_i > 0.  Requires phi > 0 unless M == 0.
std::vector<std::complex<double>> linearized_error_eigs(const MotorState& op,
                                                        const MotorParams& p,
                                                        const DerivedParams& d,
                                                        const ObserverGains& g);

}  // namespace imdrive
