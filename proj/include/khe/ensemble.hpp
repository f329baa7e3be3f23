#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "khe/gas.hpp"
#include "khe/mesh.hpp"

namespace khe {

/// SplitMix64 generator. The stream is fixed by the seed and these rules:
///   state += 0x9E3779B97F4A7C15
///   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31)
/// uniform() = (next() >> 11) * 2^-53, a double in [0, 1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();

 private:
  std::uint64_t state_;
};

inline constexpr int kModes = 10;

/// Interface perturbation coefficients; row i = 0, 1 is interface 1, 2.
struct PerturbationCoeffs {
  std::array<std::array<double, kModes>, 2> a{};  // amplitudes, each row sums to 1
  std::array<std::array<double, kModes>, 2> b{};  // phases in [-pi, pi]

  bool operator==(const PerturbationCoeffs&) const = default;
  /// Throws Config unless a >= 0, rows sum to 1 within `tol`, and |b| <= pi.
  void validate(double tol = 1e-12) const;
};

/// Draw order: a1[0..9], a2[0..9], b1[0..9], b2[0..9]. a = u, b = -pi + 2 pi u,
/// then each amplitude row is divided by its sum.
PerturbationCoeffs generate_coeffs(std::uint64_t seed);

/// Four lines a1, b1, a2, b2; ten space-separated values per line in %.16e.
std::string format_coeffs(const PerturbationCoeffs& c);
PerturbationCoeffs parse_coeffs(const std::string& text);
/// Refuses to replace an existing file unless `force` (throws Io).
void write_coeffs(const std::filesystem::path& path, const PerturbationCoeffs& c, bool force = false);
PerturbationCoeffs read_coeffs(const std::filesystem::path& path);

struct KhConfig {
  double tau = 1.1;
  double j1 = 0.25;
  double j2 = 0.75;
  double amplitude = 0.05;
  PrimitiveState inner{2.0, -0.5, 0.0, 2.5};
  PrimitiveState outer{1.0, 0.5, 0.0, 2.5};

  /// Interface bound amplitude * (1 + tau tanh(xi_max)).
  double max_offset(double xi_max = 1.0) const;
  /// Config for tau outside [0, 1.1] or j1 >= j2; InterfaceCross when the
  /// displaced interfaces could touch for |xi| <= xi_max.
  void validate(double xi_max = 1.0) const;
};

/// Y_i(x; xi) = (1 + tau tanh xi) sum_k a_i^k cos(b_i^k + 10 k pi x), i in {1, 2}.
double interface_offset(double x, double xi, int i, const PerturbationCoeffs& c, const KhConfig& cfg);

/// Inner state where J1 + amp Y_1 < y < J2 + amp Y_2, outer state elsewhere.
ConservedField kh_initial_state(int n, int level, double xi, const PerturbationCoeffs& c, const KhConfig& cfg,
                                const GasParams& g);
GridField kh_initial_field(const MeshHierarchy& h, int level, double xi, const PerturbationCoeffs& c,
                           const KhConfig& cfg, const GasParams& g);

/// Equispaced collocation nodes xi_l = a + (l - 1)(b - a)/(L - 1), l = 1..L.
struct CollocationGrid {
  double a = -1.0;
  double b = 1.0;
  int count = 101;

  void validate() const;
  /// Node l in 1..count. A single node sits at a.
  double node(int l) const;
  std::vector<double> nodes() const;
  double xi_max() const;
};

}  // namespace khe
