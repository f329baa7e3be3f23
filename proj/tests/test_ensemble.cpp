#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include "khe/campaign.hpp"
#include "khe/digest.hpp"
#include "khe/ensemble.hpp"
#include "khe/error.hpp"

using namespace khe;
namespace fs = std::filesystem;

namespace {

const GasParams kAir(1.4);

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("khe_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CampaignSpec small_spec(const fs::path& root, double tau, int levels, int count, double t_end) {
  CampaignSpec s;
  s.m0 = 0;
  s.levels = levels;
  s.grid = {-1.0, 1.0, count};
  s.kh.tau = tau;
  s.solver.t_end = t_end;
  s.coeffs = generate_coeffs(12345);
  s.coeff_sha256 = sha256_hex(format_coeffs(s.coeffs));
  s.dir = root / "campaign";
  s.cache_dir = root / "cache";
  return s;
}

}  // namespace

TEST_CASE("SplitMix64 reference stream") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next() == 0x06C45D188009454FULL);
  SplitMix64 r2(12345);
  CHECK(r2.uniform() == 0.1330796686614273);
}

TEST_CASE("generate_coeffs is normalized, in range and reproducible") {
  for (std::uint64_t seed : {0ULL, 1ULL, 12345ULL, 0xFFFFFFFFFFFFFFFFULL}) {
    const PerturbationCoeffs c = generate_coeffs(seed);
    for (int i = 0; i < 2; ++i) {
      double sum = 0.0;
      for (int k = 0; k < kModes; ++k) {
        sum += c.a[i][k];
        CHECK(c.a[i][k] >= 0.0);
        CHECK(std::abs(c.b[i][k]) <= std::numbers::pi);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-15);
    }
    CHECK(generate_coeffs(seed) == c);
  }
  // Values from an independent implementation of the same draw order.
  const PerturbationCoeffs c = generate_coeffs(12345);
  CHECK(c.a[0][0] == 0.03938561622124728);
  CHECK(c.a[0][9] == 0.25674760029918264);
  CHECK(c.b[1][0] == 1.9695782189164994);
  CHECK(c.b[1][9] == 1.617342007719511);
}

TEST_CASE("coefficient file round trip and overwrite protection") {
  TempDir tmp("coeffs");
  const PerturbationCoeffs c = generate_coeffs(7);
  const std::string text = format_coeffs(c);
  int lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == 4);
  CHECK(parse_coeffs(text) == c);

  const fs::path p = tmp.path / "coeffs.txt";
  write_coeffs(p, c);
  CHECK(read_coeffs(p) == c);
  CHECK(slurp(p) == text);
  CHECK_THROWS_AS(write_coeffs(p, generate_coeffs(8)), Error);
  CHECK(read_coeffs(p) == c);
  write_coeffs(p, generate_coeffs(8), true);
  CHECK(read_coeffs(p) == generate_coeffs(8));

  CHECK_THROWS_AS(parse_coeffs("1 2 3\n"), Error);
  std::string bad = text;
  bad.replace(0, bad.find(' '), "5.0e-01");  // row no longer sums to 1
  CHECK_THROWS_AS(parse_coeffs(bad), Error);
}

TEST_CASE("interface offsets") {
  const PerturbationCoeffs c = generate_coeffs(99);
  KhConfig cfg;
  cfg.tau = 0.0;
  for (double x : {0.0, 0.13, 0.5, 0.91}) {
    for (int i : {1, 2}) {
      const double y0 = interface_offset(x, 0.0, i, c, cfg);
      CHECK(interface_offset(x, -1.0, i, c, cfg) == y0);
      CHECK(interface_offset(x, 1.0, i, c, cfg) == y0);
    }
  }
  cfg.tau = 1.1;
  for (int i : {1, 2}) {
    double direct = 0.0;
    for (int k = 0; k < kModes; ++k) direct += c.a[i - 1][k] * std::cos(c.b[i - 1][k] + 10.0 * (k + 1) * std::numbers::pi * 0.3);
    CHECK(interface_offset(0.3, 0.0, i, c, cfg) == doctest::Approx(direct).epsilon(1e-15));
  }
  const double bound = 1.0 + 1.1 * std::tanh(1.0);
  double worst = 0.0;
  for (int s = 0; s <= 2000; ++s) {
    for (double xi : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
      for (int i : {1, 2}) worst = std::max(worst, std::abs(interface_offset(s / 2000.0, xi, i, c, cfg)));
    }
  }
  CHECK(worst <= bound);
  CHECK_THROWS_AS(interface_offset(0.0, 0.0, 3, c, cfg), Error);
}

TEST_CASE("KH initial data") {
  const PerturbationCoeffs c = generate_coeffs(4);
  KhConfig cfg;
  const ConservedField f = kh_initial_state(10, 1, 1.0, c, cfg, kAir);
  const PrimitiveState mid = cons_to_prim(ConservedState::from_array(f(5, 5)), kAir);
  CHECK(mid.rho == 2.0);
  CHECK(mid.u == -0.5);
  CHECK(mid.p == doctest::Approx(2.5).epsilon(1e-15));
  const PrimitiveState low = cons_to_prim(ConservedState::from_array(f(5, 1)), kAir);
  CHECK(low.rho == 1.0);
  CHECK(low.u == 0.5);

  cfg.tau = 0.0;
  const MeshHierarchy h(2, 2);
  const GridField a = kh_initial_field(h, 2, -1.0, c, cfg, kAir);
  CHECK(kh_initial_field(h, 2, 0.0, c, cfg, kAir) == a);
  CHECK(kh_initial_field(h, 2, 1.0, c, cfg, kAir) == a);
  CHECK(a.n() == 14);

  cfg.tau = 1.1;
  cfg.amplitude = 0.2;
  try {
    kh_initial_state(8, 1, 1.0, c, cfg, kAir);
    FAIL("expected InterfaceCross");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InterfaceCross);
  }
  cfg.amplitude = 0.05;
  cfg.tau = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("collocation nodes") {
  const CollocationGrid g;
  CHECK(g.node(1) == -1.0);
  CHECK(g.node(101) == 1.0);
  CHECK(g.node(51) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  const CollocationGrid g9{-1.0, 1.0, 9};
  const auto n = g9.nodes();
  REQUIRE(n.size() == 9);
  for (int l = 0; l < 9; ++l) CHECK(n[l] == doctest::Approx(-1.0 + 0.25 * l).epsilon(1e-15));
  CHECK(CollocationGrid{0.0, 2.0, 1}.node(1) == 0.0);
  CHECK_THROWS_AS(g.node(0), Error);
  CHECK_THROWS_AS((CollocationGrid{1.0, 1.0, 3}.validate()), Error);
}

TEST_CASE("single-run campaign at t = 0 stores the initial data") {
  TempDir tmp("camp1");
  CampaignSpec s = small_spec(tmp.path, 1.1, 1, 1, 0.0);
  const Manifest m = run_campaign(s);
  REQUIRE(m.runs.size() == 1);
  CHECK(m.sealed);
  CHECK_NOTHROW(m.require_sealed());
  const GridField f = m.load_field(1, 1);
  CHECK(f == kh_initial_field(MeshHierarchy(0, 1), 1, -1.0, s.coeffs, s.kh, kAir));

  const Manifest back = load_manifest(s.dir / "manifest.json");
  CHECK(back.config_hash == m.config_hash);
  CHECK(back.runs[0].hash == m.runs[0].hash);
  CHECK(back.sealed);
}

TEST_CASE("campaign caching, determinism and resumability") {
  TempDir tmp("camp2");
  CampaignSpec s = small_spec(tmp.path, 0.0, 2, 3, 0.05);
  std::vector<std::string> lines;
  s.log = [&](const std::string& l) { lines.push_back(l); };
  const Manifest first = run_campaign(s);
  CHECK(lines.size() == 6);
  for (const RunRecord& r : first.runs) CHECK_FALSE(r.cached);
  // tau = 0: every xi gives the same field at fixed level.
  for (int m = 1; m <= 2; ++m) {
    const GridField ref = first.load_field(1, m);
    for (int l = 2; l <= 3; ++l) CHECK(first.load_field(l, m) == ref);
  }

  lines.clear();
  const Manifest second = run_campaign(s);
  for (const RunRecord& r : second.runs) CHECK(r.cached);

  // Drop one cached run; only that run is recomputed.
  fs::remove(fs::path(first.record(2, 2).path));
  const Manifest third = run_campaign(s);
  int recomputed = 0;
  for (const RunRecord& r : third.runs) recomputed += r.cached ? 0 : 1;
  CHECK(recomputed == 1);
  CHECK(third.load_field(2, 2) == first.load_field(2, 2));

  // Worker count does not change results.
  CampaignSpec s2 = s;
  s2.kh.tau = 1.1;
  s2.use_cache = false;
  s2.workers = 1;
  const Manifest w1 = run_campaign(s2);
  std::vector<std::string> bytes;
  for (const RunRecord& r : w1.runs) bytes.push_back(slurp(r.path));
  s2.workers = 3;
  const Manifest w3 = run_campaign(s2);
  for (std::size_t i = 0; i < w3.runs.size(); ++i) CHECK(slurp(w3.runs[i].path) == bytes[i]);
}

TEST_CASE("failed runs make the campaign partial") {
  TempDir tmp("camp3");
  CampaignSpec s = small_spec(tmp.path, 1.1, 1, 2, 0.5);
  s.solver.max_steps = 1;
  try {
    run_campaign(s);
    FAIL("expected PartialCampaign");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PartialCampaign);
    CHECK(std::string(e.what()).find("l=2, m=1") != std::string::npos);
  }
  const Manifest m = load_manifest(s.dir / "manifest.json");
  CHECK_FALSE(m.sealed);
  CHECK(m.runs[0].status == RunStatus::Failed);
  CHECK_THROWS_AS(m.require_sealed(), Error);

  CampaignSpec bad = s;
  bad.solver.cfl = 1.5;
  CHECK_THROWS_AS(run_campaign(bad), Error);
}
