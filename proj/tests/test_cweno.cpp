#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "khe/cweno.hpp"

using namespace khe;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sample(int L, double a, double b, auto&& f) {
  std::vector<double> v(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) v[static_cast<std::size_t>(l)] = f(a + (b - a) * l / (L - 1));
  return v;
}

double max_midpoint_error(int n, const CwenoConfig& cfg) {
  std::vector<double> coarse(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) coarse[static_cast<std::size_t>(j)] = std::sin(2 * kPi * j / n);
  const auto fine = refine_1d(coarse, cfg);
  double err = 0.0;
  for (int j = 0; j < 2 * n; ++j) {
    err = std::max(err, std::abs(fine[static_cast<std::size_t>(j)] - std::sin(2 * kPi * j / (2.0 * n))));
  }
  return err;
}

const CwenoConfig kLinear{.mode = CwenoMode::Linear};

}  // namespace

TEST_CASE("constant samples give constant pieces") {
  for (auto mode : {CwenoMode::Linear, CwenoMode::Nonlinear}) {
    const std::vector<double> c(12, 3.25);
    const auto pp = cweno7_build(c, 0.0, 1.0, {.mode = mode});
    for (double x = 0.0; x <= 1.0; x += 0.013) CHECK(poly_eval(pp, x) == doctest::Approx(3.25).epsilon(1e-14));
  }
}

TEST_CASE("degree-6 polynomials are reproduced in linear mode") {
  auto q = [](double x) { return std::pow(x, 6); };
  const auto pp = cweno7_build(sample(9, -1.0, 1.0, q), -1.0, 1.0, kLinear);
  double err = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -1.0 + 2.0 * i / 2000;
    err = std::max(err, std::abs(poly_eval(pp, x) - q(x)));
  }
  CHECK(err <= 1e-10);

  auto q2 = [](double x) { return 1 - 2 * x + 0.5 * x * x * x - 0.3 * std::pow(x, 5) + 0.1 * std::pow(x, 6); };
  const auto pp2 = cweno7_build(sample(23, -1.0, 2.0, q2), -1.0, 2.0, kLinear);
  for (int i = 0; i <= 3000; ++i) {
    const double x = -1.0 + 3.0 * i / 3000;
    CHECK(std::abs(poly_eval(pp2, x) - q2(x)) <= 1e-10);
  }
}

TEST_CASE("interpolation holds at every node in both modes") {
  auto f = [](double x) { return std::tanh(8 * x) + 0.3 * std::sin(5 * x); };
  for (auto mode : {CwenoMode::Linear, CwenoMode::Nonlinear}) {
    const auto s = sample(31, -1.0, 1.0, f);
    const auto pp = cweno7_build(s, -1.0, 1.0, {.mode = mode});
    for (std::size_t l = 0; l < s.size(); ++l) CHECK(poly_eval(pp, pp.node(l)) == s[l]);
  }
}

TEST_CASE("half-node ties go to the left piece") {
  auto f = [](double x) { return x > 0.3 ? 1.0 : 0.0; };
  const auto pp = cweno7_build(sample(21, 0.0, 1.0, f), 0.0, 1.0);
  const double half = 0.5 * (pp.node(6) + pp.node(7));
  CHECK(poly_eval(pp, half) == doctest::Approx(eval_local(pp.piece(6), 0.5)).epsilon(1e-12));
  CHECK(std::abs(poly_eval(pp, half) - eval_local(pp.piece(7), -0.5)) > 0.5);
  CHECK_THROWS_AS(poly_eval(pp, 1.5), Error);
  CHECK_THROWS_AS(poly_eval(pp, -0.01), Error);
}

TEST_CASE("unit step stays non-oscillatory") {
  for (int L : {11, 21, 40}) {
    auto step = [](double x) { return x < 0.237 ? 0.0 : 1.0; };
    const auto pp = cweno7_build(sample(L, -1.0, 1.0, step), -1.0, 1.0);
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double v = poly_eval(pp, -1.0 + 2.0 * i / 4000);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(lo >= -0.05);
    CHECK(hi <= 1.05);
  }
}

TEST_CASE("monotone data in nonlinear mode") {
  auto f = [](double x) { return std::atan(30 * x); };
  const auto s = sample(25, -1.0, 1.0, f);
  const auto pp = cweno7_build(s, -1.0, 1.0);
  const double range = s.back() - s.front();
  for (int i = 0; i <= 5000; ++i) {
    const double v = poly_eval(pp, -1.0 + 2.0 * i / 5000);
    CHECK(v >= s.front() - 0.05 * range);
    CHECK(v <= s.back() + 0.05 * range);
  }
}

TEST_CASE("builder preconditions") {
  CHECK_THROWS_AS(cweno7_build(std::vector<double>(6, 1.0), 0.0, 1.0), Error);
  const std::vector<double> nodes{0, 1, 2, 3, 4.5, 5, 6, 7};
  try {
    cweno7_build(std::vector<double>(8, 1.0), nodes);
    FAIL("expected NonUniform");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonUniform);
  }
  CHECK_THROWS_AS(cweno7_build(std::vector<double>(8, 1.0), 0.0, 1.0, {.eps = 0.0}), Error);
}

TEST_CASE("refine_1d copies coincident nodes and matches sine") {
  std::vector<double> c(10, -0.7);
  for (double v : refine_1d(c)) CHECK(v == doctest::Approx(-0.7).epsilon(1e-14));

  std::vector<double> coarse(32);
  for (int j = 0; j < 32; ++j) coarse[static_cast<std::size_t>(j)] = std::sin(2 * kPi * j / 32.0) + 0.1 * j;
  const auto fine = refine_1d(coarse);
  for (int j = 0; j < 32; ++j) CHECK(fine[2 * static_cast<std::size_t>(j)] == coarse[static_cast<std::size_t>(j)]);

  CHECK(max_midpoint_error(32, {}) <= 1e-8);
  CHECK(max_midpoint_error(32, kLinear) <= 1e-8);
}

TEST_CASE("refine_1d converges at seventh order or better") {
  for (const CwenoConfig& cfg : {CwenoConfig{}, kLinear}) {
    std::vector<double> err;
    for (int n : {16, 32, 64, 128}) err.push_back(max_midpoint_error(n, cfg));
    for (std::size_t i = 0; i + 1 < err.size(); ++i) {
      const double order = std::log2(err[i] / err[i + 1]);
      MESSAGE("order " << order << " err " << err[i + 1]);
      CHECK(order >= 6.5);
    }
  }
}

TEST_CASE("refine_2d") {
  GridField f(1, 32);
  auto& v = f.add("v");
  auto& c = f.add("c");
  for (int k = 0; k < 32; ++k)
    for (int j = 0; j < 32; ++j) {
      v[static_cast<std::size_t>(k * 32 + j)] = std::sin(2 * kPi * j / 32.0) * std::sin(2 * kPi * k / 32.0);
      c[static_cast<std::size_t>(k * 32 + j)] = 4.0;
    }
  CHECK(refine_2d(f, 1) == f);
  const auto g = refine_2d(f, 3);
  REQUIRE(g.n() == 128);
  CHECK(g.level() == 3);
  double err = 0.0;
  for (int k = 0; k < 128; ++k)
    for (int j = 0; j < 128; ++j) {
      err = std::max(err, std::abs(g.at("v", j, k) - std::sin(2 * kPi * j / 128.0) * std::sin(2 * kPi * k / 128.0)));
      CHECK(g.at("c", j, k) == doctest::Approx(4.0).epsilon(1e-14));
    }
  CHECK(err <= 1e-7);
  for (int k = 0; k < 32; ++k)
    for (int j = 0; j < 32; ++j) CHECK(g.at("v", 4 * j, 4 * k) == f.at("v", j, k));
  CHECK_THROWS_AS(refine_2d(g, 2), Error);
}

TEST_CASE("quadrature moments against analytic uniform moments") {
  const Weight w{WeightKind::Uniform, -1.0, 1.0};
  for (int L : {7, 11, 101}) {
    auto m = quadrature_moments(cweno7_build(std::vector<double>(static_cast<std::size_t>(L), 2.5), -1.0, 1.0), w);
    CHECK(m.mean == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(m.std <= 1e-14);

    m = quadrature_moments(cweno7_build(sample(L, -1, 1, [](double x) { return x; }), -1.0, 1.0, kLinear), w);
    CHECK(std::abs(m.mean) <= 1e-12);
    CHECK(std::abs(m.std - 1.0 / std::sqrt(3.0)) <= 1e-12);

    m = quadrature_moments(cweno7_build(sample(L, -1, 1, [](double x) { return x * x; }), -1.0, 1.0, kLinear), w);
    CHECK(std::abs(m.mean - 1.0 / 3.0) <= 1e-12);
    CHECK(std::abs(m.std - std::sqrt(4.0 / 45.0)) <= 1e-12);

    // degree-6 mean exactness: int_{-1}^{1} x^6 / 2 dx = 1/7
    m = quadrature_moments(cweno7_build(sample(L, -1, 1, [](double x) { return std::pow(x, 6) - x * x * x; }),
                                        -1.0, 1.0, kLinear),
                           w);
    CHECK(std::abs(m.mean - 1.0 / 7.0) <= 1e-12);
  }
  CHECK_THROWS_AS(quadrature_moments(cweno7_build(std::vector<double>(7, 1.0), -1.0, 1.0),
                                     Weight{WeightKind::Gaussian, -1, 1}),
                  Error);
}
