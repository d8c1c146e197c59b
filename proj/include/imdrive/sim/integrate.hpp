#pragma once

#include <array>
#include <cstddef>

namespace imdrive {

// Classical fixed-step fourth-order Runge-Kutta over a flat state array.
// f(t, y) must return the full derivative vector; it is evaluated four
// times per step.
template <std::size_t N, typename F>
std::array<double, N> rk4_step(F&& f, double t, const std::array<double, N>& y, double dt) {
  using State = std::array<double, N>;
  const auto axpy = [](const State& a, double h, const State& k) {
    State r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + h * k[i];
    return r;
  };
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
  const State k3 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
  const State k4 = f(t + dt, axpy(y, dt, k3));
  State out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

}  // namespace imdrive
