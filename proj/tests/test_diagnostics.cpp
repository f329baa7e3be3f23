#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "khe/diagnostics.hpp"
#include "khe/error.hpp"

using namespace khe;

namespace {

const GasParams kAir(1.4);

// Level-m solution field holding one constant primitive state.
GridField constant_solution(int level, int n, const PrimitiveState& w) {
  ConservedField f(level, n);
  const State u = prim_to_cons(w, kAir).to_array();
  for (auto& s : f.states()) s = u;
  return f.to_grid_field(kAir);
}

// Constant state with given rho, S and momentum.
PrimitiveState from_entropy(double rho, double S, double mx, double my) {
  return {rho, mx / rho, my / rho, pressure_from_entropy(rho, S, kAir)};
}

GridField smooth_solution(int level, int n, double phase) {
  ConservedField f(level, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      const double x = static_cast<double>(j) / n, y = static_cast<double>(k) / n;
      const double s = std::sin(2.0 * M_PI * (x + phase)), c = std::cos(2.0 * M_PI * y);
      f(j, k) = prim_to_cons({1.5 + 0.3 * s, 0.2 * c, -0.1 * s, 2.0 + 0.2 * c}, kAir).to_array();
    }
  return f.to_grid_field(kAir);
}

}  // namespace

TEST_CASE("auxiliaries are pointwise nonlinear evaluations") {
  const GridField f = with_auxiliaries(constant_solution(1, 4, {2.0, 0.5, -1.0, 3.0}), kAir);
  CHECK(f.get("mm_xx")[0] == doctest::Approx(2.0 * 0.25));
  CHECK(f.get("mm_xy")[0] == doctest::Approx(2.0 * -0.5));
  CHECK(f.get("mm_yy")[0] == doctest::Approx(2.0));
  CHECK(f.get("p")[0] == doctest::Approx(3.0));
  CHECK(f.get("m2_rho")[0] == doctest::Approx(2.5));
  CHECK(f.get("rho_e")[0] == doctest::Approx(7.5));
}

TEST_CASE("Cesaro averages") {
  SUBCASE("M = 1 is the identity on conserved fields") {
    const GridField s = smooth_solution(1, 8, 0.1);
    const GridField c = cesaro_average({s}, 1, kAir);
    for (const char* name : {"rho", "m_x", "m_y", "E", "S"}) CHECK(c.get(name) == s.get(name));
    CHECK(c.get("p") == with_auxiliaries(s, kAir).get("p"));
  }
  SUBCASE("equal constants average to the constant") {
    const PrimitiveState w{1.3, 0.2, 0.1, 2.0};
    const GridField c = cesaro_average({constant_solution(1, 7, w), constant_solution(2, 14, w),
                                        constant_solution(3, 28, w)},
                                       3, kAir);
    const GridField ref = with_auxiliaries(constant_solution(3, 28, w), kAir);
    for (const auto& name : kCesaroNames) {
      for (std::size_t i = 0; i < c.size(); ++i) CHECK(c.get(name)[i] == doctest::Approx(ref.get(name)[i]).epsilon(1e-13));
    }
  }
  SUBCASE("two constant densities average arithmetically") {
    const GridField c = cesaro_average({constant_solution(1, 7, {1.0, 0.0, 0.0, 1.0}),
                                        constant_solution(2, 14, {2.0, 0.0, 0.0, 1.0})},
                                       3, kAir);
    CHECK(c.n() == 28);
    CHECK(c.get("rho")[17] == doctest::Approx(1.5).epsilon(1e-14));
  }
  SUBCASE("prefix averages match separate averages bitwise") {
    const std::vector<GridField> levels{smooth_solution(1, 7, 0.1), smooth_solution(2, 14, 0.2),
                                        smooth_solution(3, 28, 0.3)};
    const auto prefixes = cesaro_prefixes(levels, 3, kAir);
    REQUIRE(prefixes.size() == 3);
    for (std::size_t k = 1; k <= 3; ++k) {
      const GridField direct = cesaro_average({levels.begin(), levels.begin() + static_cast<long>(k)}, 3, kAir);
      CHECK(prefixes[k - 1] == direct);
    }
  }
  SUBCASE("errors") {
    const GridField a = smooth_solution(1, 7, 0.0);
    CHECK_THROWS_AS(cesaro_average({}, 1, kAir), Error);
    CHECK_THROWS_AS(cesaro_average({smooth_solution(2, 14, 0.0)}, 2, kAir), Error);
    CHECK_THROWS_AS(cesaro_average({a, smooth_solution(2, 15, 0.0)}, 2, kAir), Error);
    CHECK_THROWS_AS(cesaro_average({a, smooth_solution(2, 14, 0.0)}, 1, kAir), Error);
  }
}

TEST_CASE("xi statistics") {
  const CollocationGrid grid{-1.0, 1.0, 9};
  const auto xi = grid.nodes();
  std::vector<std::vector<double>> data(9, std::vector<double>(3));
  for (int l = 0; l < 9; ++l) data[l] = {4.0, xi[l], xi[l] * xi[l]};
  std::vector<std::span<const double>> spans(data.begin(), data.end());

  CwenoConfig linear;
  linear.mode = CwenoMode::Linear;
  const XiStats s = xi_statistics(spans, grid, linear);
  CHECK(s.mean[0] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(s.std[0] <= 1e-12);
  CHECK(std::abs(s.mean[1]) <= 1e-14);
  CHECK(s.std[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(s.mean[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(s.std[2] == doctest::Approx(std::sqrt(4.0 / 45.0)).epsilon(1e-12));

  // Independent of xi gives zero spread in the default nonlinear mode too.
  std::vector<std::vector<double>> same(9, std::vector<double>{1.7, -0.3, 123.456});
  const XiStats z = xi_statistics(std::vector<std::span<const double>>(same.begin(), same.end()), grid);
  for (int i = 0; i < 3; ++i) {
    CHECK(z.mean[i] == doctest::Approx(same[0][i]).epsilon(1e-14));
    CHECK(z.std[i] <= 1e-12);
  }

  std::vector<GridField> fields;
  for (int l = 0; l < 9; ++l) fields.push_back(smooth_solution(1, 7, 0.0));
  const GridField g = xi_statistics(fields, {"rho", "S"}, grid);
  CHECK(g.names() == std::vector<std::string>{"rho_mean", "rho_std", "S_mean", "S_std"});
  for (double v : g.get("rho_std")) CHECK(v <= 1e-12);

  CHECK_THROWS_AS(xi_statistics(std::vector<std::span<const double>>(spans.begin(), spans.begin() + 5),
                                CollocationGrid{-1.0, 1.0, 5}),
                  Error);
  CHECK_THROWS_AS(xi_statistics(spans, CollocationGrid{-1.0, 1.0, 10}), Error);
}

TEST_CASE("defects vanish for a single level") {
  const GridField s = smooth_solution(1, 14, 0.2);
  const GridField d = defect_fields(cesaro_average({s}, 1, kAir), kAir);
  for (const char* name : {"R_xx", "R_xy", "R_yy", "trR", "Edef"}) {
    for (double v : d.get(name)) CHECK(std::abs(v) <= 1e-12);
  }
  for (double v : d.get("ratio")) CHECK(std::isnan(v));
}

TEST_CASE("two-state ensembles hit the trace bounds exactly") {
  SUBCASE("pure kinetic defect") {
    const GridField c = cesaro_average({constant_solution(1, 7, from_entropy(1.0, 0.0, 1.0, 0.0)),
                                        constant_solution(2, 14, from_entropy(1.0, 0.0, -1.0, 0.0))},
                                       2, kAir);
    const GridField d = defect_fields(c, kAir);
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(d.get("trR")[i] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(d.get("Edef")[i] == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(std::abs(d.get("ratio")[i] - 0.5) <= 1e-12);
      CHECK(std::abs(d.get("R_xy")[i]) <= 1e-12);
    }
  }
  SUBCASE("pure internal defect") {
    const GridField c = cesaro_average({constant_solution(1, 7, from_entropy(1.0, 0.0, 0.0, 0.0)),
                                        constant_solution(2, 14, from_entropy(3.0, 0.0, 0.0, 0.0))},
                                       2, kAir);
    const GridField d = defect_fields(c, kAir);
    const double pbar = 0.5 * (1.0 + 4.655536721746079);  // 3^1.4
    const double p2 = 2.6390158215457885;                   // 2^1.4
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(d.get("trR")[i] == doctest::Approx(2.0 * (pbar - p2)).epsilon(1e-12));
      CHECK(d.get("Edef")[i] == doctest::Approx(2.5 * (pbar - p2)).epsilon(1e-12));
      CHECK(std::abs(d.get("ratio")[i] - 1.25) <= 1e-12);
    }
  }
  SUBCASE("random two-state ensembles stay in the band") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> rho(0.3, 3.0), vel(-2.0, 2.0), pr(0.2, 3.0);
    for (int t = 0; t < 50; ++t) {
      const GridField c = cesaro_average({constant_solution(1, 7, {rho(rng), vel(rng), vel(rng), pr(rng)}),
                                          constant_solution(2, 14, {rho(rng), vel(rng), vel(rng), pr(rng)})},
                                         2, kAir);
      const GridField d = defect_fields(c, kAir);
      const double tr = d.get("trR")[0], e = d.get("Edef")[0];
      CHECK(tr >= -1e-12);
      CHECK(e >= -1e-12);
      CHECK(0.8 * e <= tr + 1e-12);
      CHECK(tr <= 2.0 * e + 1e-12);
    }
  }
}

TEST_CASE("ratio band report") {
  const double nan = std::nan("");
  const std::vector<double> r{0.5, 1.25, 0.48, 1.32, 0.4, nan, 1.0};
  const RatioBandReport b = ratio_band(r, 0.5, 1.25, 0.05);
  CHECK(b.considered == 6);
  CHECK(b.inside == 4);
  const auto q = defect_ratio(std::vector<double>{2.0, 0.0, 1e-11}, std::vector<double>{1.0, 1.0, 1.0});
  CHECK(q[0] == 0.5);
  CHECK(std::isnan(q[1]));
  CHECK(std::isnan(q[2]));
}

TEST_CASE("defect residuals") {
  const int n = 4;
  DefectMeans a{2, std::vector<double>(16, 1.0), std::vector<double>(16, 2.0)};
  DefectMeans b{3, std::vector<double>(16, 0.5), std::vector<double>(16, 1.5)};
  DefectMeans c{4, std::vector<double>(16, 0.25), std::vector<double>(16, 1.25)};
  const auto rows = defect_residuals({c, a, b}, n);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].M == 2);
  CHECK(rows[0].eps_R == doctest::Approx(0.75));
  CHECK(rows[0].eps_E == doctest::Approx(0.75));
  CHECK(rows[1].eps_R == doctest::Approx(0.25));
  CHECK(rows[2].eps_R == 0.0);
  CHECK(rows[2].eps_E == 0.0);
  CHECK(residual_slope(rows) == doctest::Approx(1.0));
  DefectMeans same{2, c.trR, c.edef};
  for (const auto& r : defect_residuals({same, c}, n)) CHECK(r.eps_R == 0.0);
  DefectMeans wrong{2, std::vector<double>(9, 0.0), std::vector<double>(9, 0.0)};
  CHECK_THROWS_AS(defect_residuals({wrong, c}, n), Error);
}

TEST_CASE("window node selection") {
  const int n = 112;
  std::vector<double> field(static_cast<std::size_t>(n) * n);
  for (std::size_t i = 0; i < field.size(); ++i) field[i] = static_cast<double>(i);
  const Window d1{"D1", 0.46, 0.54, 0.71, 0.79};
  const auto s = window_samples(field, n, d1);
  CHECK(s.size() == 81);
  CHECK(s.front() == 80.0 * n + 52.0);
  CHECK(s.back() == 88.0 * n + 60.0);
  const Window tiny{"tiny", 0.5, 0.51, 0.5, 0.51};
  CHECK_THROWS_AS(window_histogram(field, n, tiny), Error);
  const WindowHistogram h = window_histogram(field, n, d1);
  long total = 0;
  for (long c : h.counts) total += c;
  CHECK(total == 81);
  CHECK(h.window.name == "D1");
}

TEST_CASE("auto binning matches numpy") {
  const std::vector<double> d{0.3, 1.7, 2.2, 2.9, 3.1, 3.3, 4.0, 4.4, 5.8, 6.1,
                              6.15, 7.0, 7.7, 9.2, 9.9, 12.5, 13.0, 0.1, 2.5, 3.7};
  CHECK(percentile(d, 25.0) == doctest::Approx(2.8));
  CHECK(percentile(d, 75.0) == doctest::Approx(7.175));
  CHECK(auto_bin_count(d) == 6);
  const WindowHistogram h = histogram_from_samples(d);
  CHECK(h.counts == std::vector<long>{4, 6, 4, 2, 2, 2});
  CHECK(h.density[0] == doctest::Approx(0.09302325581395349).epsilon(1e-14));
  CHECK(h.density[1] == doctest::Approx(0.13953488372093026).epsilon(1e-14));
  double integral = 0.0;
  for (std::size_t b = 0; b < h.counts.size(); ++b) integral += h.density[b] * (h.edges[b + 1] - h.edges[b]);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_FALSE(h.degenerate);
}

TEST_CASE("Freedman-Diaconis count on normal samples") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  std::vector<double> s(1000);
  for (double& v : s) v = nd(rng);
  std::vector<double> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  auto q = [&](double p) {
    const double pos = p * 999.0;
    const int i = static_cast<int>(pos);
    return sorted[i] + (sorted[i + 1] - sorted[i]) * (pos - i);
  };
  const double iqr = q(0.75) - q(0.25);
  const double range = sorted.back() - sorted.front();
  const int oracle = static_cast<int>(std::ceil(range * std::cbrt(1000.0) / (2.0 * iqr)));
  CHECK(std::abs(auto_bin_count(s) - oracle) <= 1);
  CHECK(auto_bin_count(s) >= 11);  // never below Sturges
}

TEST_CASE("degenerate and small-sample statistics") {
  const WindowHistogram c = histogram_from_samples(std::vector<double>(20, 3.5));
  CHECK(c.degenerate);
  REQUIRE(c.counts.size() == 1);
  CHECK(c.counts[0] == 20);
  CHECK(c.density[0] == doctest::Approx(1.0));
  CHECK(c.edges == std::vector<double>{3.0, 4.0});
  const SampleStats cs = histogram_stats(c);
  CHECK(cs.mean == 3.5);
  CHECK(cs.std == 0.0);

  const SampleStats two = histogram_stats(histogram_from_samples({0.0, 1.0}));
  CHECK(two.mean == 0.5);
  CHECK(two.std == 0.5);
  const SampleStats four = histogram_stats(histogram_from_samples({1.0, 2.0, 3.0, 4.0}));
  CHECK(four.mean == 2.5);
  CHECK(four.std == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
  CHECK_THROWS_AS(histogram_from_samples({}), Error);
  CHECK_THROWS_AS(histogram_stats(WindowHistogram{}), Error);
}
