#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "imdrive/benchmark_plant.hpp"
#include "imdrive/errors.hpp"

using namespace imdrive;

namespace {

// Feedback that places the closed-loop poles at {-4, -5}: matching
// s^2 + 9s + 20 against s^2 + (5 + k2)s + (6 + k1).
constexpr double kF1 = 20.0 - 6.0;
constexpr double kF2 = 9.0 - 5.0;

}  // namespace

TEST_CASE("plant realization") {
  // Eigenvalues straight from trace and determinant of the stored A.
  const auto& A = SecondOrderPlant::A;
  const double tr = A[0][0] + A[1][1];
  const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  const double disc = std::sqrt(tr * tr - 4.0 * det);
  const double lo = 0.5 * (tr - disc);
  const double hi = 0.5 * (tr + disc);
  CHECK(lo == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(hi == doctest::Approx(-2.0).epsilon(1e-12));

  // Zero state, zero input is an equilibrium.
  const auto still = plant_step({0.0, 0.0}, 0.0, 0.0, 1e-3);
  CHECK(still[0] == 0.0);
  CHECK(still[1] == 0.0);

  CHECK_THROWS_AS(plant_step({0.0, 0.0}, 0.0, 0.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(plant_step({0.0, 0.0}, 0.0, 0.0, -1e-3), InvalidInput);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(plant_step({nan, 0.0}, 0.0, 0.0, 1e-3), InvalidInput);
  CHECK_THROWS_AS(plant_step({0.0, 0.0}, nan, 0.0, 1e-3), InvalidInput);
}

TEST_CASE("dc gain is 1/6") {
  std::array<double, 2> x{0.0, 0.0};
  for (int k = 0; k < 10000; ++k) x = plant_step(x, 1.0, 0.0, 1e-3);
  CHECK(x[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
  CHECK(std::abs(x[1]) < 1e-6);
}

TEST_CASE("sliding surface and switching law") {
  SmcController smc;
  CHECK_NOTHROW(smc.validate());
  CHECK(smc.surface({0.3, -0.1}) == doctest::Approx(2.0 * 0.3 - 0.1).epsilon(1e-15));

  // Inside the boundary layer the law is linear in s.
  smc.phi_smc = 0.01;
  std::array<double, 2> mid{0.0, 0.005};  // s = phi/2
  CHECK(smc.control(mid) == doctest::Approx(-smc.K_smc / 2.0).epsilon(1e-12));
  // Outside it saturates.
  CHECK(smc.control({1.0, 0.0}) == -smc.K_smc);
  CHECK(smc.control({-1.0, 0.0}) == smc.K_smc);

  // phi = 0 selects the discontinuous law with sgn(0) = 0.
  smc.phi_smc = 0.0;
  CHECK(smc.control({1.0, 0.0}) == -smc.K_smc);
  CHECK(smc.control({-1.0, 0.0}) == smc.K_smc);
  CHECK(smc.control({0.0, 0.0}) == 0.0);

  SmcController bad;
  bad.c = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = SmcController{};
  bad.K_smc = -1.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = SmcController{};
  bad.phi_smc = -0.01;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("demo mode 1: nominal feedback decays") {
  const DemoResult r = run_demo(DemoMode::kStateFeedback, 10.0, 1e-4);
  CHECK(r.pass);
  REQUIRE(r.t.size() == r.x.size());
  REQUIRE(r.t.size() == 100001);
  CHECK(std::hypot(r.x.back()[0], r.x.back()[1]) < 1e-3);

  // x'x shrinks monotonically once the initial swing is over; compare
  // samples 10 ms apart while V is still far above double-precision dust.
  const auto V = [&](std::size_t k) {
    return r.x[k][0] * r.x[k][0] + r.x[k][1] * r.x[k][1];
  };
  for (std::size_t k = 5000; k + 100 <= 30000; k += 100) {
    CHECK(V(k + 100) < V(k));
  }
}

TEST_CASE("demo mode 2: the disturbance survives linear feedback") {
  const DemoResult r = run_demo(DemoMode::kDisturbed, 10.0, 1e-4);
  CHECK(r.pass);

  // Steady forced response of x1 to 2 sin(5t) through (A - Bv k):
  // |G(5j)| = 2 / |(5j)^2 + 9*5j + 20| = 2 / |(-5) + 45j| = 2 / sqrt(2050).
  const double amp_expect = 2.0 / std::sqrt((20.0 - 25.0) * (20.0 - 25.0) + 45.0 * 45.0);

  double amp = 0.0;
  for (std::size_t k = r.x.size() - r.x.size() / 5; k < r.x.size(); ++k) {
    amp = std::max(amp, std::abs(r.x[k][0]));
  }
  CHECK(std::abs(amp - amp_expect) < 0.02 * amp_expect);
  CHECK(amp > 0.042);
  CHECK(amp < 0.046);
}

TEST_CASE("demo mode 3: sliding-mode add-on rejects it") {
  const DemoResult r2 = run_demo(DemoMode::kDisturbed, 10.0, 1e-4);
  const DemoResult r3 = run_demo(DemoMode::kDisturbedSmc, 10.0, 1e-4);
  CHECK(r3.pass);

  const std::size_t start = r3.x.size() - r3.x.size() / 5;
  double bound = 0.0, rms2 = 0.0, rms3 = 0.0;
  for (std::size_t k = start; k < r3.x.size(); ++k) {
    bound = std::max(bound, std::hypot(r3.x[k][0], r3.x[k][1]));
    rms2 += r2.x[k][0] * r2.x[k][0];
    rms3 += r3.x[k][0] * r3.x[k][0];
  }
  CHECK(bound < 5e-3);
  // Residual ripple is a small fraction of the uncompensated response.
  CHECK(std::sqrt(rms3) < 0.2 * std::sqrt(rms2));
}

TEST_CASE("pure switching chatters within one step of the surface") {
  SmcController smc;
  smc.phi_smc = 0.0;
  const double dt = 1e-4;

  std::array<double, 2> x{1.0, 0.0};
  bool crossed = false;
  double prev_s = smc.surface(x);
  double worst = 0.0;
  for (int k = 0; k < 20000; ++k) {
    const double t = k * dt;
    const double u = -kF1 * x[0] - kF2 * x[1] + smc.control(x);
    x = plant_step(x, u, 2.0 * std::sin(5.0 * t), dt);
    const double s = smc.surface(x);
    if (!crossed && s * prev_s <= 0.0 && k > 0) crossed = true;
    if (crossed) worst = std::max(worst, std::abs(s));
    prev_s = s;
  }
  REQUIRE(crossed);
  CHECK(worst < 10.0 * dt * smc.K_smc);
}

TEST_CASE("thinner boundary layer tightens the ultimate bound") {
  const auto run = [&](double phi) {
    SmcController smc;
    smc.phi_smc = phi;
    std::array<double, 2> x{1.0, 0.0};
    const double dt = 1e-4;
    double bound = 0.0;
    for (int k = 0; k < 100000; ++k) {
      const double t = k * dt;
      const double u = -kF1 * x[0] - kF2 * x[1] + smc.control(x);
      x = plant_step(x, u, 2.0 * std::sin(5.0 * t), dt);
      if (t > 8.0) bound = std::max(bound, std::hypot(x[0], x[1]));
    }
    return bound;
  };
  const double wide = run(0.02);
  const double thin = run(0.01);
  CHECK(thin < wide);
  // Inside the layer the law is linear with slope K/phi, so the residual
  // scales about linearly with phi; measured ratio is 1.995.
  CHECK(wide / thin > 1.85);
  CHECK(wide / thin < 2.15);
}

TEST_CASE("demo argument validation") {
  CHECK_THROWS_AS(run_demo(static_cast<DemoMode>(7), 1.0, 1e-3), InvalidInput);
  CHECK_THROWS_AS(run_demo(DemoMode::kStateFeedback, 1.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(run_demo(DemoMode::kStateFeedback, 1e-4, 1e-3), InvalidInput);
}
