#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "characteristic.hpp"
#include "khe/error.hpp"
#include "khe/solver.hpp"

using namespace khe;

namespace {

const GasParams kAir(1.4);
constexpr double kPi = std::numbers::pi;

ConservedField advected_sine(int n, const GasParams& g) {
  ConservedField f(0, n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      const double x = static_cast<double>(j) / n, y = static_cast<double>(k) / n;
      const double rho = 1.0 + 0.2 * std::sin(2.0 * kPi * (x + y));
      f(j, k) = prim_to_cons({rho, 1.0, 1.0, 1.0}, g).to_array();
    }
  }
  return f;
}

State totals(const ConservedField& f) {
  State s{0.0, 0.0, 0.0, 0.0};
  for (const State& u : f.states())
    for (int c = 0; c < 4; ++c) s[c] += u[c];
  return s;
}

// Normal flux in x from the textbook formulas, independent of the solver's.
State flux_x(const State& u, double gamma) {
  const double p = (gamma - 1.0) * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0]);
  const double vx = u[1] / u[0];
  return {u[1], u[1] * vx + p, u[2] * vx, (u[3] + p) * vx};
}

}  // namespace

TEST_CASE("characteristic transforms are mutual inverses") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rho(0.2, 3.0), vel(-2.0, 2.0), pr(0.1, 4.0), w(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const State a = prim_to_cons({rho(rng), vel(rng), vel(rng), pr(rng)}, kAir).to_array();
    const State b = prim_to_cons({rho(rng), vel(rng), vel(rng), pr(rng)}, kAir).to_array();
    const auto f = detail::roe_frame(a, pressure(ConservedState::from_array(a), kAir), b,
                                     pressure(ConservedState::from_array(b), kAir), 1.4);
    const State x{w(rng), w(rng), w(rng), w(rng)};
    const State back = detail::from_characteristic(f, detail::to_characteristic(f, x));
    const State fwd = detail::to_characteristic(f, detail::from_characteristic(f, x));
    for (int c = 0; c < 4; ++c) {
      CHECK(back[c] == doctest::Approx(x[c]).epsilon(1e-12).scale(10.0));
      CHECK(fwd[c] == doctest::Approx(x[c]).epsilon(1e-12).scale(10.0));
    }
  }
}

TEST_CASE("right eigenvectors diagonalize the finite-difference flux Jacobian") {
  const State u = prim_to_cons({1.3, 0.4, -0.7, 2.1}, kAir).to_array();
  const double p = pressure(ConservedState::from_array(u), kAir);
  const auto f = detail::roe_frame(u, p, u, p, 1.4);
  const double lambda[4] = {f.u - f.c, f.u, f.u, f.u + f.c};
  for (int k = 0; k < 4; ++k) {
    State e{0.0, 0.0, 0.0, 0.0};
    e[k] = 1.0;
    const State r = detail::from_characteristic(f, e);
    // A r by central differences along r.
    const double h = 1e-6;
    State up = u, dn = u;
    for (int c = 0; c < 4; ++c) {
      up[c] += h * r[c];
      dn[c] -= h * r[c];
    }
    const State fu = flux_x(up, 1.4), fd = flux_x(dn, 1.4);
    for (int c = 0; c < 4; ++c) {
      const double ar = (fu[c] - fd[c]) / (2.0 * h);
      CHECK(ar == doctest::Approx(lambda[k] * r[c]).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("uniform state has zero tendency") {
  ConservedField f(0, 16);
  const State u = prim_to_cons({1.7, 0.3, -0.4, 2.2}, kAir).to_array();
  for (auto& s : f.states()) s = u;
  SolverConfig cfg;
  for (auto vars : {ReconstructionVars::Characteristic, ReconstructionVars::Primitive}) {
    cfg.vars = vars;
    const Tendency t = rhs(f, kAir, cfg);
    for (const State& s : t)
      for (double v : s) CHECK(std::abs(v) <= 1e-13);
  }
}

TEST_CASE("tendency sums telescope to zero") {
  ConservedField f(0, 24);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-0.1, 0.1);
  for (int k = 0; k < 24; ++k)
    for (int j = 0; j < 24; ++j)
      f(j, k) = prim_to_cons({1.0 + d(rng) + 0.5 * (k < 12), 0.5 - (k < 12) + d(rng), d(rng), 2.5 + d(rng)}, kAir)
                    .to_array();
  SolverConfig cfg;
  for (auto vars : {ReconstructionVars::Characteristic, ReconstructionVars::Primitive}) {
    cfg.vars = vars;
    const Tendency t = rhs(f, kAir, cfg);
    State sum{0.0, 0.0, 0.0, 0.0}, mag{0.0, 0.0, 0.0, 0.0};
    for (const State& s : t)
      for (int c = 0; c < 4; ++c) {
        sum[c] += s[c];
        mag[c] += std::abs(s[c]);
      }
    for (int c = 0; c < 4; ++c) CHECK(std::abs(sum[c]) <= 1e-12 * std::max(1.0, mag[c]));
  }
}

TEST_CASE("density tendency of an advected sine converges at fifth order") {
  // rho_t = -(rho_x + rho_y) = -0.8 pi cos(2 pi (x + y)).
  SolverConfig cfg;
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const Tendency t = rhs(advected_sine(n, kAir), kAir, cfg);
    double err = 0.0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        const double x = static_cast<double>(j) / n, y = static_cast<double>(k) / n;
        err += std::abs(t[static_cast<std::size_t>(k) * n + j][0] + 0.8 * kPi * std::cos(2.0 * kPi * (x + y)));
      }
    err /= static_cast<double>(n) * n;
    if (prev > 0.0) {
      const double order = std::log2(prev / err);
      MESSAGE("N=" << n << " order " << order);
      CHECK(order >= 4.5);
    }
    prev = err;
  }
}

TEST_CASE("SSP-RK3 on the scalar decay equation") {
  const std::vector<double> u0{1.0};
  auto op = [](const std::vector<double>& u) { return std::vector<double>{-u[0]}; };
  int stages = 0;
  const auto u = ssprk3(u0, 0.1, op, [&](int, const std::vector<double>&) { ++stages; });
  // Third-order Taylor polynomial of exp(-0.1).
  CHECK(u[0] == doctest::Approx(1.0 - 0.1 + 0.005 - 0.001 / 6.0).epsilon(1e-15));
  CHECK(std::abs(u[0] - std::exp(-0.1)) == doctest::Approx(1e-4 / 24.0).epsilon(0.03));
  CHECK(stages == 3);
}

TEST_CASE("one step conserves totals") {
  ConservedField f = advected_sine(32, kAir);
  SolverConfig cfg;
  const State before = totals(f);
  const ConservedField g = step_ssprk3(f, stable_dt(f, kAir, cfg), kAir, cfg);
  const State after = totals(g);
  for (int c = 0; c < 4; ++c) CHECK(std::abs(after[c] - before[c]) <= 1e-12 * std::max(1.0, std::abs(before[c])));
}

TEST_CASE("stable_dt follows the CFL formula") {
  ConservedField f(0, 10);
  const State u = prim_to_cons({1.0, 1.0, -0.5, 1.4 / 1.4}, kAir).to_array();
  for (auto& s : f.states()) s = u;
  SolverConfig cfg;
  cfg.cfl = 0.5;
  const double c = std::sqrt(1.4);
  CHECK(stable_dt(f, kAir, cfg) == doctest::Approx(0.5 * 0.1 / (1.0 + c)).epsilon(1e-14));
  cfg.accuracy_reference_cells = 80;
  CHECK(stable_dt(f, kAir, cfg) == doctest::Approx(0.5 * 0.1 / (1.0 + c) * 4.0).epsilon(1e-14));
  cfg.fixed_dt = 1e-3;
  CHECK(stable_dt(f, kAir, cfg) == 1e-3);
}

TEST_CASE("advance lands exactly on output times") {
  ConservedField f = advected_sine(16, kAir);
  SolverConfig cfg;
  cfg.snapshot_times = {0.05, 0.1};
  const RunResult r = advance(f, 0.12, kAir, cfg);
  REQUIRE(r.snapshots.size() == 2);
  CHECK(r.snapshots[0].t == 0.05);
  CHECK(r.snapshots[1].t == 0.1);
  REQUIRE(r.entropy_log.size() == 4);
  CHECK(r.entropy_log.back().first == 0.12);
  CHECK(r.final_field.names() == std::vector<std::string>{"rho", "m_x", "m_y", "E", "S"});
  CHECK(r.min_density > 0.79);
  CHECK(r.fallbacks == 0);
}

TEST_CASE("advance with t_end = 0 returns the input") {
  ConservedField f = advected_sine(8, kAir);
  const RunResult r = advance(f, 0.0, kAir, SolverConfig{});
  CHECK(r.steps == 0);
  CHECK(r.final_field == f.to_grid_field(kAir));
}

TEST_CASE("primitive-variable reconstruction also converges") {
  SolverConfig cfg;
  cfg.vars = ReconstructionVars::Primitive;
  ConservedField f = advected_sine(16, kAir);
  const RunResult r = advance(f, 0.1, kAir, cfg);
  // Density after translation by (0.1, 0.1).
  double err = 0.0;
  const auto& rho = r.final_field.get("rho");
  for (int k = 0; k < 16; ++k)
    for (int j = 0; j < 16; ++j) {
      const double x = j / 16.0 - 0.1, y = k / 16.0 - 0.1;
      err += std::abs(rho[static_cast<std::size_t>(k) * 16 + j] - 1.0 - 0.2 * std::sin(2.0 * kPi * (x + y)));
    }
  CHECK(err / 256.0 < 1e-3);
}

TEST_CASE("solver errors") {
  ConservedField f = advected_sine(8, kAir);
  SolverConfig cfg;
  cfg.max_steps = 1;
  CHECK_THROWS_AS(advance(f, 1.0, kAir, cfg), Error);
  try {
    advance(f, 1.0, kAir, cfg);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MaxStepsExceeded);
  }

  ConservedField bad = f;
  bad(3, 3)[3] = 0.0;  // negative pressure
  try {
    advance(bad, 0.1, kAir, SolverConfig{});
    FAIL("expected NonPhysicalState");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPhysicalState);
  }
  CHECK_THROWS_AS(step_ssprk3(f, 0.0, kAir, SolverConfig{}), Error);
  CHECK_THROWS_AS(advance(f, -1.0, kAir, SolverConfig{}), Error);

  SolverConfig c;
  c.cfl = 1.2;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SolverConfig{};
  c.t_end = 1.0;
  c.snapshot_times = {1.5};
  CHECK_THROWS_AS(c.validate(), Error);
}
