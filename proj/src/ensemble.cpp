#include "khe/ensemble.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "khe/error.hpp"

namespace khe {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

void PerturbationCoeffs::validate(double tol) const {
  for (int i = 0; i < 2; ++i) {
    double sum = 0.0;
    for (int k = 0; k < kModes; ++k) {
      if (!(a[i][k] >= 0.0)) throw Error(ErrorKind::Config, "negative perturbation amplitude");
      if (!(std::abs(b[i][k]) <= std::numbers::pi)) throw Error(ErrorKind::Config, "phase outside [-pi, pi]");
      sum += a[i][k];
    }
    if (!(std::abs(sum - 1.0) <= tol)) throw Error(ErrorKind::Config, "amplitudes do not sum to 1");
  }
}

PerturbationCoeffs generate_coeffs(std::uint64_t seed) {
  SplitMix64 rng(seed);
  PerturbationCoeffs c;
  for (auto& row : c.a)
    for (double& v : row) v = rng.uniform();
  for (auto& row : c.b)
    for (double& v : row) v = -std::numbers::pi + 2.0 * std::numbers::pi * rng.uniform();
  for (auto& row : c.a) {
    double sum = 0.0;
    for (double v : row) sum += v;
    for (double& v : row) v /= sum;
  }
  return c;
}

std::string format_coeffs(const PerturbationCoeffs& c) {
  std::string out;
  char buf[32];
  for (int i = 0; i < 2; ++i) {
    for (const auto* row : {&c.a[i], &c.b[i]}) {
      for (int k = 0; k < kModes; ++k) {
        std::snprintf(buf, sizeof buf, "%.16e", (*row)[k]);
        if (k) out += ' ';
        out += buf;
      }
      out += '\n';
    }
  }
  return out;
}

PerturbationCoeffs parse_coeffs(const std::string& text) {
  std::istringstream in(text);
  PerturbationCoeffs c;
  std::string line;
  for (int r = 0; r < 4; ++r) {
    if (!std::getline(in, line)) throw Error(ErrorKind::Io, "coefficient file needs 4 lines");
    auto& row = (r % 2 == 0) ? c.a[r / 2] : c.b[r / 2];
    std::istringstream ls(line);
    for (int k = 0; k < kModes; ++k) {
      if (!(ls >> row[k])) throw Error(ErrorKind::Io, "coefficient line " + std::to_string(r + 1) + " needs 10 values");
    }
    std::string extra;
    if (ls >> extra) throw Error(ErrorKind::Io, "coefficient line " + std::to_string(r + 1) + " has extra values");
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw Error(ErrorKind::Io, "trailing data in coefficient file");
  }
  c.validate();
  return c;
}

void write_coeffs(const std::filesystem::path& path, const PerturbationCoeffs& c, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw Error(ErrorKind::Io, path.string() + " exists (use --force to overwrite)");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << format_coeffs(c);
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

PerturbationCoeffs read_coeffs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_coeffs(ss.str());
}

double KhConfig::max_offset(double xi_max) const { return amplitude * (1.0 + tau * std::tanh(std::abs(xi_max))); }

void KhConfig::validate(double xi_max) const {
  if (!(tau >= 0.0 && tau <= 1.1)) throw Error(ErrorKind::Config, "tau must lie in [0, 1.1]");
  if (!(j1 < j2)) throw Error(ErrorKind::Config, "J1 must be below J2");
  if (!(amplitude >= 0.0)) throw Error(ErrorKind::Config, "amplitude must be >= 0");
  if (!(inner.rho > 0.0 && inner.p > 0.0 && outer.rho > 0.0 && outer.p > 0.0)) {
    throw Error(ErrorKind::Config, "KH states must have positive density and pressure");
  }
  if (!(max_offset(xi_max) < 0.5 * (j2 - j1))) {
    throw Error(ErrorKind::InterfaceCross, "interface offset " + std::to_string(max_offset(xi_max)) +
                                               " reaches half the layer width");
  }
}

double interface_offset(double x, double xi, int i, const PerturbationCoeffs& c, const KhConfig& cfg) {
  if (i != 1 && i != 2) throw Error(ErrorKind::Index, "interface index must be 1 or 2");
  const auto& a = c.a[i - 1];
  const auto& b = c.b[i - 1];
  double sum = 0.0;
  for (int k = 0; k < kModes; ++k) sum += a[k] * std::cos(b[k] + 10.0 * (k + 1) * std::numbers::pi * x);
  return (1.0 + cfg.tau * std::tanh(xi)) * sum;
}

ConservedField kh_initial_state(int n, int level, double xi, const PerturbationCoeffs& c, const KhConfig& cfg,
                                const GasParams& g) {
  cfg.validate(std::abs(xi));
  const State in = prim_to_cons(cfg.inner, g).to_array();
  const State out = prim_to_cons(cfg.outer, g).to_array();
  ConservedField f(level, n);
  for (int j = 0; j < n; ++j) {
    const double x = static_cast<double>(j) / n;
    const double lo = cfg.j1 + cfg.amplitude * interface_offset(x, xi, 1, c, cfg);
    const double hi = cfg.j2 + cfg.amplitude * interface_offset(x, xi, 2, c, cfg);
    for (int k = 0; k < n; ++k) {
      const double y = static_cast<double>(k) / n;
      f(j, k) = (lo < y && y < hi) ? in : out;
    }
  }
  return f;
}

GridField kh_initial_field(const MeshHierarchy& h, int level, double xi, const PerturbationCoeffs& c,
                           const KhConfig& cfg, const GasParams& g) {
  return kh_initial_state(h.cells(level), level, xi, c, cfg, g).to_grid_field(g);
}

void CollocationGrid::validate() const {
  if (count < 1) throw Error(ErrorKind::Config, "collocation node count must be >= 1");
  if (!(a < b)) throw Error(ErrorKind::Config, "collocation range needs a < b");
}

double CollocationGrid::node(int l) const {
  if (l < 1 || l > count) throw Error(ErrorKind::Index, "collocation index out of range");
  if (count == 1) return a;
  if (l == count) return b;
  return a + (l - 1) * (b - a) / (count - 1);
}

std::vector<double> CollocationGrid::nodes() const {
  std::vector<double> out;
  out.reserve(count);
  for (int l = 1; l <= count; ++l) out.push_back(node(l));
  return out;
}

double CollocationGrid::xi_max() const { return std::max(std::abs(a), std::abs(b)); }

}  // namespace khe
