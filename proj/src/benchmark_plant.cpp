#include "imdrive/benchmark_plant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "imdrive/errors.hpp"
#include "imdrive/sim/integrate.hpp"

namespace imdrive {
namespace {

// Pole placement at {-4, -5}: char(A - Bv k) = s^2 + (5 + k2) s + (6 + k1)
// against s^2 + 9s + 20.
constexpr double kFb1 = 14.0;
constexpr double kFb2 = 4.0;

constexpr double kDistAmp = 2.0;
constexpr double kDistFreq = 5.0;  // rad/s

}  // namespace

std::array<double, 2> plant_step(const std::array<double, 2>& x, double u, double d,
                                 double dt) {
  if (!(dt > 0.0)) throw InvalidInput("plant_step: dt must be positive");
  if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(u) ||
      !std::isfinite(d)) {
    throw InvalidInput("plant_step: non-finite argument");
  }
  const auto f = [&](double, const std::array<double, 2>& s) {
    const auto& A = SecondOrderPlant::A;
    const auto& B = SecondOrderPlant::Bv;
    return std::array<double, 2>{A[0][0] * s[0] + A[0][1] * s[1] + B[0] * (u + d),
                                 A[1][0] * s[0] + A[1][1] * s[1] + B[1] * (u + d)};
  };
  return rk4_step<2>(f, 0.0, x, dt);
}

void SmcController::validate() const {
  if (!(c > 0.0) || !(K_smc > 0.0)) {
    throw ParameterError("SmcController: c and K_smc must be positive");
  }
  if (phi_smc < 0.0) throw ParameterError("SmcController: phi_smc must be nonnegative");
}

double SmcController::control(const std::array<double, 2>& x) const {
  const double s = surface(x);
  if (phi_smc > 0.0) return -K_smc * std::clamp(s / phi_smc, -1.0, 1.0);
  if (s > 0.0) return -K_smc;
  if (s < 0.0) return K_smc;
  return 0.0;
}

DemoResult run_demo(DemoMode mode, double duration, double dt) {
  if (mode != DemoMode::kStateFeedback && mode != DemoMode::kDisturbed &&
      mode != DemoMode::kDisturbedSmc) {
    throw InvalidInput("run_demo: unknown mode");
  }
  if (!(dt > 0.0) || !(duration > dt)) {
    throw InvalidInput("run_demo: need duration > dt > 0");
  }

  SmcController smc;
  smc.validate();

  DemoResult res;
  const auto n = static_cast<std::size_t>(std::llround(duration / dt));
  res.t.reserve(n + 1);
  res.x.reserve(n + 1);
  res.u.reserve(n + 1);

  std::array<double, 2> x{1.0, 0.0};
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    double u = -kFb1 * x[0] - kFb2 * x[1];
    if (mode == DemoMode::kDisturbedSmc) u += smc.control(x);
    const double d =
        mode == DemoMode::kStateFeedback ? 0.0 : kDistAmp * std::sin(kDistFreq * t);
    res.t.push_back(t);
    res.x.push_back(x);
    res.u.push_back(u);
    if (k < n) x = plant_step(x, u, d, dt);
  }

  const std::size_t tail_start = res.x.size() - res.x.size() / 5;  // last 20%
  char buf[160];
  switch (mode) {
    case DemoMode::kStateFeedback: {
      const double final_norm = std::hypot(res.x.back()[0], res.x.back()[1]);
      res.pass = final_norm < 1e-3;
      std::snprintf(buf, sizeof buf, "mode 1: |x(T)| = %.3e (pass if < 1e-3)",
                    final_norm);
      break;
    }
    case DemoMode::kDisturbed: {
      double amp = 0.0;
      for (std::size_t k = tail_start; k < res.x.size(); ++k)
        amp = std::max(amp, std::abs(res.x[k][0]));
      res.pass = amp > 0.01;
      std::snprintf(buf, sizeof buf,
                    "mode 2: sustained |x1| amplitude = %.3e (pass if > 0.01)", amp);
      break;
    }
    case DemoMode::kDisturbedSmc: {
      double bound = 0.0;
      for (std::size_t k = tail_start; k < res.x.size(); ++k)
        bound = std::max(bound, std::hypot(res.x[k][0], res.x[k][1]));
      res.pass = bound < 5e-3;
      std::snprintf(buf, sizeof buf,
                    "mode 3: ultimate |x| bound = %.3e (pass if < 5e-3)", bound);
      break;
    }
  }
  res.verdict = buf;
  return res;
}

}  // namespace imdrive
