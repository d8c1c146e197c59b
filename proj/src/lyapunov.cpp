#include "imdrive/lyapunov.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace imdrive {

namespace {

constexpr double kVFloor = 1e-6;
constexpr double kVdotWindow = 0.010;  // s
constexpr double kSymTol = 1e-12;

}  // namespace

void LyapunovWeights::validate() const {
  std::array<double, 16> flat;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) flat[4 * r + c] = P[r][c];
  if (!is_positive_definite(flat, 4)) {
    throw ParameterError("lyapunov: P must be symmetric positive definite");
  }
  if (!(d > 0.0)) {
    throw ParameterError("lyapunov: d must be positive");
  }
  for (double a : alpha_w) {
    if (!(a > 0.0)) throw ParameterError("lyapunov: alpha weights must be positive");
  }
  for (double b : beta_w) {
    if (!(b > 0.0)) throw ParameterError("lyapunov: beta weights must be positive");
  }
}

double evaluate_V(const ErrorVector& e, double delta_omega,
                  std::span<const double> delta_a, std::span<const double> delta_b,
                  const LyapunovWeights& w) {
  if (delta_a.size() != w.alpha_w.size() || delta_b.size() != w.beta_w.size()) {
    throw InvalidInput("evaluate_V: parameter-error dimension mismatch");
  }
  const std::array<double, 4> ex{e.e_i_alpha, e.e_i_beta, e.e_psi_alpha, e.e_psi_beta};
  double quad = 0.0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) quad += ex[r] * w.P[r][c] * ex[c];
  }
  double v = 0.5 * quad + 0.5 * w.d * delta_omega * delta_omega;
  for (std::size_t i = 0; i < delta_a.size(); ++i) v += w.alpha_w[i] * delta_a[i] * delta_a[i];
  for (std::size_t i = 0; i < delta_b.size(); ++i) v += w.beta_w[i] * delta_b[i] * delta_b[i];
  return v;
}

bool is_positive_definite(std::span<const double> m, std::size_t n) {
  if (n == 0 || m.size() != n * n) {
    throw InvalidInput("is_positive_definite: matrix size mismatch");
  }
  Eigen::MatrixXd a(n, n);
  double max_abs = 1.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      a(r, c) = m[n * r + c];
      max_abs = std::max(max_abs, std::abs(a(r, c)));
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r + 1; c < n; ++c) {
      if (std::abs(a(r, c) - a(c, r)) > kSymTol * max_abs) {
        throw InvalidInput("is_positive_definite: matrix is not symmetric");
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > 1e-10;
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::kAsymptoticallyStable: return "asymptotically-stable";
    case Stability::kMarginal: return "marginal";
    case Stability::kUnstable: return "unstable";
  }
  return "unknown";
}

StabilityReport monitor_trajectory(std::span<const double> V_samples, double dt,
                                   double transient_window) {
  if (!(dt > 0.0)) {
    throw InvalidInput("monitor_trajectory: dt must be positive");
  }
  const std::size_t n = V_samples.size();
  const std::size_t window = std::max<std::size_t>(1, std::llround(kVdotWindow / dt));
  const std::size_t i0 = static_cast<std::size_t>(std::ceil(transient_window / dt));
  if (n < 3 || n <= window || i0 + 2 >= n) {
    throw InvalidInput("monitor_trajectory: series too short for the requested windows");
  }

  StabilityReport rep;
  rep.V_series.assign(V_samples.begin(), V_samples.end());
  rep.Vdot_series.resize(n);
  rep.Vdot_series[0] = (V_samples[1] - V_samples[0]) / dt;
  rep.Vdot_series[n - 1] = (V_samples[n - 1] - V_samples[n - 2]) / dt;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    rep.Vdot_series[i] = (V_samples[i + 1] - V_samples[i - 1]) / (2.0 * dt);
  }

  // Centered moving average of Vdot, clamped at the ends.
  const auto smoothed = [&](std::size_t i) {
    const std::size_t half = window / 2;
    const std::size_t lo = i > half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double acc = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) acc += rep.Vdot_series[k];
    return acc / static_cast<double>(hi - lo + 1);
  };

  // Net growth over the post-transient segment marks instability.
  const std::size_t tail = std::max<std::size_t>(1, (n - i0) / 10);
  double v_end = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) v_end += V_samples[i];
  v_end /= static_cast<double>(tail);
  const double v_start = std::max(V_samples[i0], kVFloor);

  bool decaying = true;
  double max_vdot = -std::numeric_limits<double>::infinity();
  for (std::size_t i = i0; i < n; ++i) {
    if (V_samples[i] <= kVFloor) continue;
    const double sv = smoothed(i);
    max_vdot = std::max(max_vdot, sv);
    if (sv >= 0.0) decaying = false;
  }
  rep.max_Vdot_after_transient = std::isfinite(max_vdot) ? max_vdot : 0.0;

  if (v_end > 1.10 * v_start) {
    rep.classification = Stability::kUnstable;
  } else if (decaying) {
    rep.classification = Stability::kAsymptoticallyStable;
  } else {
    rep.classification = Stability::kMarginal;
  }
  return rep;
}

std::vector<std::complex<double>> linearized_error_eigs(const MotorState& op,
                                                        const MotorParams& p,
                                                        const DerivedParams& d,
                                                        const ObserverGains& g) {
  if (g.phi <= 0.0 && g.M != 0.0) {
    throw InvalidInput("linearized_error_eigs: needs phi > 0 (boundary layer) for a slope");
  }
  // The frozen operating point lives in a frame aligned with the rotor
  // flux and rotating at the electrical speed; there the periodic error
  // dynamics become time invariant.  In the stationary frame the same
  // modes appear shifted by the rotation frequency.
  const double slope = g.phi > 0.0 ? g.M / g.phi : 0.0;
  const double w = p.pole_pairs * op.omega_m;
  const double inv_tau = 1.0 / d.tau_r;
  const double psi = std::hypot(op.psi_alpha, op.psi_beta);
  if (!(psi > 0.0)) {
    throw InvalidInput("linearized_error_eigs: operating point needs nonzero rotor flux");
  }
  // In the flux-aligned frame psi = (psi, 0); J*psi = (0, psi) is the
  // lever of a speed error on both error equations.
  const double jp_b = psi;

  const bool with_integrator = g.k_omega_i > 0.0;
  const int n = with_integrator ? 5 : 4;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);

  // Current error block: decay, frame rotation, flux coupling.
  A(0, 0) = -(d.gamma + slope);
  A(1, 1) = -(d.gamma + slope);
  A(0, 1) = w;
  A(1, 0) = -w;
  A(0, 2) = d.K * inv_tau;
  A(1, 3) = d.K * inv_tau;
  A(0, 3) = d.K * w;
  A(1, 2) = -d.K * w;

  // Flux error block: the frame rotation cancels the rotor speed term.
  A(2, 0) = p.L_m * inv_tau + slope * g.L[0][0];
  A(2, 1) = slope * g.L[0][1];
  A(3, 0) = slope * g.L[1][0];
  A(3, 1) = p.L_m * inv_tau + slope * g.L[1][1];
  A(2, 2) = -inv_tau;
  A(3, 3) = -inv_tau;

  // Speed-adaptation coupling: dw = k_p * psi * e_i2 + k_i * z.
  const double kp = g.k_omega_p;
  A(1, 1) += -d.K * jp_b * kp * jp_b;
  A(3, 1) += jp_b * kp * jp_b;

  if (with_integrator) {
    A(1, 4) = -d.K * g.k_omega_i * jp_b;
    A(3, 4) = g.k_omega_i * jp_b;
    A(4, 1) = jp_b;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(A);
  std::vector<std::complex<double>> out(n);
  for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()[i];
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

}  // namespace imdrive
