#include <doctest.h>

#include <cmath>
#include <random>

#include "khe/gas.hpp"
#include "khe/mesh.hpp"

using namespace khe;

namespace {
const GasParams kAir(1.4);
}

TEST_CASE("cons_to_prim on the two KH states") {
  auto w = cons_to_prim({2.0, -1.0, 0.0, 6.5}, kAir);
  CHECK(w.rho == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(w.u == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(w.v == 0.0);
  CHECK(w.p == doctest::Approx(2.5).epsilon(1e-14));

  w = cons_to_prim({1.0, 0.0, 0.0, 2.5}, kAir);
  CHECK(w.p == doctest::Approx(1.0).epsilon(1e-15));

  w = cons_to_prim({1.0, 0.5, 0.0, 6.375}, kAir);
  CHECK(w.u == doctest::Approx(0.5));
  CHECK(w.p == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("prim_to_cons inverts cons_to_prim") {
  auto U = prim_to_cons({1.0, 0.0, 0.0, 1.0}, kAir);
  CHECK(U.rho == 1.0);
  CHECK(U.E == doctest::Approx(2.5).epsilon(1e-15));
  U = prim_to_cons({2.0, -0.5, 0.0, 2.5}, kAir);
  CHECK(U.mx == doctest::Approx(-1.0));
  CHECK(U.E == doctest::Approx(6.5).epsilon(1e-15));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(0.1, 10.0), vel(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const PrimitiveState W{pos(rng), vel(rng), vel(rng), pos(rng)};
    const auto back = cons_to_prim(prim_to_cons(W, kAir), kAir);
    CHECK(std::abs(back.rho - W.rho) <= 1e-14 * W.rho);
    CHECK(std::abs(back.u - W.u) <= 1e-13 * (1.0 + std::abs(W.u)));
    CHECK(std::abs(back.v - W.v) <= 1e-13 * (1.0 + std::abs(W.v)));
    CHECK(std::abs(back.p - W.p) <= 1e-12 * W.p);

    const ConservedState U = prim_to_cons(W, kAir);
    const auto U2 = prim_to_cons(cons_to_prim(U, kAir), kAir);
    CHECK(std::abs(U2.E - U.E) <= 1e-13 * U.E);
  }
}

TEST_CASE("non-physical states are rejected") {
  CHECK_THROWS_AS(cons_to_prim({0.0, 0.0, 0.0, 1.0}, kAir), Error);
  CHECK_THROWS_AS(cons_to_prim({1.0, 2.0, 0.0, 1.0}, kAir), Error);
  try {
    prim_to_cons({1.0, 0.0, 0.0, -1.0}, kAir);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPhysicalState);
  }
  CHECK_THROWS_AS(GasParams(1.0), Error);
  CHECK_THROWS_AS(GasParams(1.7), Error);
}

TEST_CASE("entropy and its inverse") {
  CHECK(entropy(prim_to_cons({1, 0, 0, 1}, kAir), kAir) == doctest::Approx(0.0));
  CHECK(entropy_from_prim(2.0, 2.5, kAir) == doctest::Approx(-0.27057660454884184).epsilon(1e-13));
  CHECK(entropy_from_prim(1.0, 2.5, kAir) == doctest::Approx(2.2907268296853877).epsilon(1e-13));

  CHECK(pressure_from_entropy(1.0, 0.0, kAir) == doctest::Approx(1.0));
  CHECK(std::abs(pressure_from_entropy(2.0, -0.27057, kAir) - 2.5) < 1e-4);
  CHECK(pressure_from_entropy(2.0, 0.0, kAir) == doctest::Approx(2.6390158215457885).epsilon(1e-14));
  CHECK_THROWS_AS(pressure_from_entropy(0.0, 0.0, kAir), Error);

  for (double rho = 0.1; rho <= 10.0; rho *= 1.7) {
    for (double p = 0.1; p <= 10.0; p *= 1.9) {
      const double S = entropy_from_prim(rho, p, kAir);
      CHECK(std::abs(pressure_from_entropy(rho, S, kAir) - p) <= 1e-12 * p);
    }
    // isentrope normalization
    const double S0 = entropy(prim_to_cons({rho, 0, 0, std::pow(rho, 1.4)}, kAir), kAir);
    CHECK(std::abs(S0) < 1e-13 * rho);
  }
}

TEST_CASE("internal energy satisfies rho e = c_v p") {
  const double S = entropy_from_prim(1.7, 3.1, kAir);
  CHECK(1.7 * internal_energy_from_entropy(1.7, S, kAir) == doctest::Approx(2.5 * 3.1).epsilon(1e-13));
}

TEST_CASE("trace-bound constants") {
  CHECK(kAir.d1() == doctest::Approx(0.8));
  CHECK(kAir.d2() == 2.0);
  CHECK(1.0 / kAir.d2() == 0.5);
  CHECK(1.0 / kAir.d1() == doctest::Approx(1.25));
  CHECK(kAir.c_v() == doctest::Approx(2.5));
}

TEST_CASE("max wave speeds of uniform fields") {
  for (int n : {3, 8}) {
    ConservedField f(1, n);
    for (auto& s : f.states()) s = prim_to_cons({1, 0, 0, 1}, kAir).to_array();
    auto ws = max_wave_speeds(f, kAir);
    CHECK(ws.x == doctest::Approx(1.1832159566199232));
    CHECK(ws.y == doctest::Approx(1.1832159566199232));
    for (auto& s : f.states()) s = prim_to_cons({1, 0.5, 0, 2.5}, kAir).to_array();
    ws = max_wave_speeds(f, kAir);
    CHECK(ws.x == doctest::Approx(2.3708286933869707));
    CHECK(ws.y == doctest::Approx(1.8708286933869707));
  }
}
