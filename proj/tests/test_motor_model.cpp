#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "imdrive/motor_model.hpp"
#include "imdrive/sim/integrate.hpp"
#include "imdrive/sim/rng.hpp"

using namespace imdrive;

namespace {

MotorParams bench_motor() {
  // The 3 hp machine every scenario runs on.
  return {1.54, 1.294, 0.1004, 0.0969, 0.0915, 2, 0.05, 0.005};
}

}  // namespace

TEST_CASE("derived quantities match hand arithmetic") {
  const MotorParams p = bench_motor();
  const DerivedParams d = derived(p);

  CHECK(std::abs(d.sigma - 0.1394) < 0.0005);
  CHECK(std::abs(d.tau_r - 0.0749) < 0.0005);

  // Same formulas, written out independently.
  const double sigma = 1.0 - 0.0915 * 0.0915 / (0.1004 * 0.0969);
  CHECK(d.sigma == doctest::Approx(sigma).epsilon(1e-14));
  CHECK(d.tau_r == doctest::Approx(0.0969 / 1.294).epsilon(1e-14));
  CHECK(d.sigma_L_s == doctest::Approx(sigma * 0.1004).epsilon(1e-14));
  CHECK(d.K == doctest::Approx(0.0915 / (sigma * 0.1004 * 0.0969)).epsilon(1e-13));
  CHECK(d.gamma ==
        doctest::Approx(1.54 / (sigma * 0.1004) +
                        1.294 * 0.0915 * 0.0915 / (sigma * 0.1004 * 0.0969 * 0.0969))
            .epsilon(1e-13));
}

TEST_CASE("vanishing mutual inductance pushes sigma to 1 and K to 0") {
  MotorParams p = bench_motor();
  p.L_m = 1e-9;
  const DerivedParams d = derived(p);
  CHECK(d.sigma == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(d.K) < 1e-6);
}

TEST_CASE("parameter validation rejects non-physical sets") {
  MotorParams p = bench_motor();
  p.L_m = std::sqrt(p.L_s * p.L_r);  // zero leakage boundary
  CHECK_THROWS_AS(derived(p), ParameterError);

  p = bench_motor();
  p.R_s = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = bench_motor();
  p.pole_pairs = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = bench_motor();
  p.J = -0.1;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = bench_motor();
  p.B = -1e-3;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  CHECK_NOTHROW(bench_motor().validate());
}

TEST_CASE("electrical derivatives at fixed points") {
  const MotorParams p = bench_motor();
  const DerivedParams d = derived(p);

  const ElectricalRates zero = electrical_derivatives({}, {}, p, d);
  CHECK(zero.di_alpha == 0.0);
  CHECK(zero.di_beta == 0.0);
  CHECK(zero.dpsi_alpha == 0.0);
  CHECK(zero.dpsi_beta == 0.0);

  // 1 V on alpha from rest couples only through the transient inductance.
  const ElectricalRates va = electrical_derivatives({}, {1.0, 0.0, 0.0}, p, d);
  CHECK(va.di_alpha == doctest::Approx(1.0 / d.sigma_L_s).epsilon(1e-14));
  CHECK(va.di_alpha == doctest::Approx(71.43).epsilon(1e-3));
  CHECK(va.di_beta == 0.0);
  CHECK(va.dpsi_alpha == 0.0);
  CHECK(va.dpsi_beta == 0.0);

  // Flux equilibrium for a held DC current at standstill: psi = L_m * i.
  MotorState s;
  s.i_alpha = 1.0;
  s.psi_alpha = p.L_m;
  const ElectricalRates eq = electrical_derivatives(s, {}, p, d);
  CHECK(std::abs(eq.dpsi_alpha) < 1e-12);
  CHECK(eq.dpsi_beta == 0.0);
}

TEST_CASE("electrical derivatives reject non-finite state") {
  const MotorParams p = bench_motor();
  const DerivedParams d = derived(p);
  MotorState s;
  s.psi_beta = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(electrical_derivatives(s, {}, p, d), InvalidInput);
  CHECK_THROWS_AS(
      electrical_derivatives({}, {std::numeric_limits<double>::infinity(), 0.0, 0.0}, p, d),
      InvalidInput);
}

TEST_CASE("torque fixed points and antisymmetry") {
  const MotorParams p = bench_motor();

  CHECK(torque({}, p) == 0.0);

  MotorState s;
  s.psi_alpha = 1.0;
  s.i_beta = 1.0;
  CHECK(torque(s, p) == doctest::Approx(3.0 * 0.0915 / 0.0969).epsilon(1e-14));
  CHECK(torque(s, p) == doctest::Approx(2.833).epsilon(1e-3));

  // Swapping flux and current vectors flips the cross product.
  Xoshiro256pp rng(5);
  for (int k = 0; k < 50; ++k) {
    MotorState a;
    a.i_alpha = rng.uniform01() - 0.5;
    a.i_beta = rng.uniform01() - 0.5;
    a.psi_alpha = rng.uniform01() - 0.5;
    a.psi_beta = rng.uniform01() - 0.5;
    MotorState b = a;
    std::swap(b.i_alpha, b.psi_alpha);
    std::swap(b.i_beta, b.psi_beta);
    CHECK(torque(b, p) == doctest::Approx(-torque(a, p)).epsilon(1e-12));
  }
}

TEST_CASE("mechanical derivative fixed points") {
  const MotorParams p = bench_motor();

  MotorState s;
  CHECK(mechanical_derivative(s, 2.0, 2.0, p).domega_m == 0.0);

  // Steady speed is where friction eats the net torque.
  s.omega_m = (3.0 - 1.0) / p.B;
  const MechanicalRates r = mechanical_derivative(s, 3.0, 1.0, p);
  CHECK(std::abs(r.domega_m) < 1e-12);
  CHECK(r.dtheta_m == s.omega_m);

  MotorParams nofric = p;
  nofric.B = 0.0;
  CHECK(mechanical_derivative({}, 1.0, 0.0, nofric).domega_m ==
        doctest::Approx(20.0).epsilon(1e-14));

  CHECK_THROWS_AS(
      mechanical_derivative({}, std::numeric_limits<double>::quiet_NaN(), 0.0, p),
      InvalidInput);
}

TEST_CASE("wrap_angle lands in [0, 2pi)") {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(two_pi + 0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(wrap_angle(-0.1) == doctest::Approx(two_pi - 0.1).epsilon(1e-14));
  CHECK(wrap_angle(7.0 * two_pi) < two_pi);
  CHECK(wrap_angle(-5.25 * two_pi) >= 0.0);
}

namespace {

// Electrical-only integration with the shaft speed frozen.
std::array<double, 4> step_electrical(const std::array<double, 4>& y, double omega_m,
                                      const MotorInputs& in, const MotorParams& p,
                                      const DerivedParams& d, double dt) {
  const auto f = [&](double, const std::array<double, 4>& s) {
    MotorState st{s[0], s[1], s[2], s[3], omega_m, 0.0};
    const ElectricalRates r = electrical_derivatives(st, in, p, d);
    return std::array<double, 4>{r.di_alpha, r.di_beta, r.dpsi_alpha, r.dpsi_beta};
  };
  return rk4_step<4>(f, 0.0, y, dt);
}

}  // namespace

TEST_CASE("unforced flux decays monotonically") {
  const MotorParams p = bench_motor();
  const DerivedParams d = derived(p);
  std::array<double, 4> y{0.0, 0.0, 0.5, -0.2};
  const double psi0 = std::hypot(y[2], y[3]);
  const double dt = 1e-4;
  const double horizon = 5.0 * d.tau_r;
  double prev = psi0;
  for (double t = 0.0; t < horizon; t += dt) {
    y = step_electrical(y, 15.0, {}, p, d, dt);
    const double mag = std::hypot(y[2], y[3]);
    CHECK(mag <= prev + 1e-12);
    prev = mag;
  }
  // Slowest electrical mode of this machine sits near 1.8 tau_r, so five
  // rotor time constants leave well under a fifth of the initial flux.
  CHECK(prev < 0.2 * psi0);
  CHECK(prev > 0.0);
}

TEST_CASE("locked rotor reaches a periodic steady state") {
  const MotorParams p = bench_motor();
  const DerivedParams d = derived(p);
  const double f0 = 2.0;  // low frequency so the transient dies within 10 cycles
  const double w = 2.0 * std::numbers::pi * f0;
  const double dt = 1e-4;
  const double period = 1.0 / f0;
  const auto per_period = static_cast<std::size_t>(std::llround(period / dt));

  std::array<double, 4> y{};
  std::vector<double> ia;
  ia.reserve(11 * per_period);
  double amp = 0.0;
  for (std::size_t k = 0; k < 11 * per_period; ++k) {
    const double t = static_cast<double>(k) * dt;
    const MotorInputs in{30.0 * std::cos(w * t), 30.0 * std::sin(w * t), 0.0};
    y = step_electrical(y, 0.0, in, p, d, dt);
    ia.push_back(y[0]);
    if (k >= 9 * per_period) amp = std::max(amp, std::abs(y[0]));
  }
  double residual = 0.0;
  for (std::size_t k = 0; k < per_period; ++k) {
    residual = std::max(residual,
                        std::abs(ia[10 * per_period + k] - ia[9 * per_period + k]));
  }
  CHECK(residual < 1e-6 * amp);
}

TEST_CASE("open-loop drive settles into torque balance") {
  const MotorParams p = bench_motor();
  const DerivedParams d = derived(p);
  const double w_e = 2.0 * std::numbers::pi * 10.0;
  const double dt = 1e-4;
  const double T_L = 0.0;

  std::array<double, 6> y{};  // i_a, i_b, psi_a, psi_b, omega_m, theta_m
  double Te = 0.0;
  for (double t = 0.0; t < 3.0; t += dt) {
    const MotorInputs in{40.0 * std::cos(w_e * t), 40.0 * std::sin(w_e * t), T_L};
    const auto f = [&](double, const std::array<double, 6>& s) {
      MotorState st{s[0], s[1], s[2], s[3], s[4], s[5]};
      const ElectricalRates r = electrical_derivatives(st, in, p, d);
      const MechanicalRates m = mechanical_derivative(st, torque(st, p), T_L, p);
      return std::array<double, 6>{r.di_alpha, r.di_beta, r.dpsi_alpha,
                                   r.dpsi_beta, m.domega_m, m.dtheta_m};
    };
    y = rk4_step<6>(f, t, y, dt);
    Te = torque({y[0], y[1], y[2], y[3], y[4], y[5]}, p);
  }
  CHECK(std::abs(Te - T_L - p.B * y[4]) < 1e-3);
  CHECK(y[4] > 0.5 * w_e / p.pole_pairs);  // spun up, not stuck at zero
}

TEST_CASE("derivatives agree with a flux-linkage formulation") {
  // Independent model in (psi_s, psi_r) states; currents recovered through
  // the inductance matrix. Both models must produce the same (di_s, dpsi_r).
  const MotorParams p = bench_motor();
  const DerivedParams d = derived(p);
  const double D = p.L_s * p.L_r - p.L_m * p.L_m;

  Xoshiro256pp rng(314);
  for (int k = 0; k < 100; ++k) {
    MotorState s;
    s.i_alpha = 10.0 * (rng.uniform01() - 0.5);
    s.i_beta = 10.0 * (rng.uniform01() - 0.5);
    s.psi_alpha = 2.0 * (rng.uniform01() - 0.5);
    s.psi_beta = 2.0 * (rng.uniform01() - 0.5);
    s.omega_m = 200.0 * (rng.uniform01() - 0.5);
    const MotorInputs in{100.0 * (rng.uniform01() - 0.5),
                         100.0 * (rng.uniform01() - 0.5), 0.0};
    const double we = p.pole_pairs * s.omega_m;

    // Rotor current for the same physical state, then the voltage
    // equations in linkage form.
    const double ir_a = (s.psi_alpha - p.L_m * s.i_alpha) / p.L_r;
    const double ir_b = (s.psi_beta - p.L_m * s.i_beta) / p.L_r;
    const double dpsis_a = in.v_alpha - p.R_s * s.i_alpha;
    const double dpsis_b = in.v_beta - p.R_s * s.i_beta;
    const double dpsir_a = -p.R_r * ir_a - we * s.psi_beta;
    const double dpsir_b = -p.R_r * ir_b + we * s.psi_alpha;

    // i_s = (L_r psi_s - L_m psi_r)/D, so di_s follows from the linkage rates.
    const double dis_a = (p.L_r * dpsis_a - p.L_m * dpsir_a) / D;
    const double dis_b = (p.L_r * dpsis_b - p.L_m * dpsir_b) / D;

    const ElectricalRates r = electrical_derivatives(s, in, p, d);
    const double scale = std::max({std::abs(dis_a), std::abs(dis_b), 1.0});
    CHECK(std::abs(r.di_alpha - dis_a) < 1e-6 * scale);
    CHECK(std::abs(r.di_beta - dis_b) < 1e-6 * scale);
    CHECK(std::abs(r.dpsi_alpha - dpsir_a) < 1e-6 * std::max(std::abs(dpsir_a), 1.0));
    CHECK(std::abs(r.dpsi_beta - dpsir_b) < 1e-6 * std::max(std::abs(dpsir_b), 1.0));
  }
}

TEST_CASE("power bookkeeping is consistent at a sample point") {
  const MotorParams p = bench_motor();
  MotorState s;
  s.i_alpha = 2.0;
  s.i_beta = -1.0;
  s.psi_alpha = 0.4;
  s.psi_beta = 0.1;

  CHECK(input_power(s, {3.0, 1.0, 0.0}) == doctest::Approx(1.5 * (3.0 * 2.0 - 1.0)));
  CHECK(input_power({}, {5.0, 5.0, 0.0}) == 0.0);

  const double ir_a = (s.psi_alpha - p.L_m * s.i_alpha) / p.L_r;
  const double ir_b = (s.psi_beta - p.L_m * s.i_beta) / p.L_r;
  const double expected_loss =
      1.5 * (p.R_s * (4.0 + 1.0) + p.R_r * (ir_a * ir_a + ir_b * ir_b));
  CHECK(copper_loss(s, p) == doctest::Approx(expected_loss).epsilon(1e-12));
  CHECK(copper_loss({}, p) == 0.0);
  CHECK(magnetic_energy({}, p) == 0.0);
  CHECK(magnetic_energy(s, p) > 0.0);
}
