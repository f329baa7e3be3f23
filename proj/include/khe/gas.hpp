#pragma once

#include <array>
#include <cmath>

#include "khe/error.hpp"

namespace khe {

/// Ideal-gas parameters in two space dimensions. `c_v` is derived from
/// `gamma` on every call so the two can never disagree.
class GasParams {
 public:
  static constexpr int kDim = 2;

  explicit GasParams(double gamma = 1.4);

  double gamma() const noexcept { return gamma_; }
  double c_v() const noexcept { return 1.0 / (gamma_ - 1.0); }

  /// Lower/upper constants of the Reynolds-stress trace bound
  /// d1 * E <= tr R <= d2 * E.
  double d1() const noexcept { return std::min(2.0, kDim * (gamma_ - 1.0)); }
  double d2() const noexcept { return std::max(2.0, kDim * (gamma_ - 1.0)); }

 private:
  double gamma_;
};

/// Conserved variables (rho, m_x, m_y, E) in the layout the solver uses.
using State = std::array<double, 4>;

struct ConservedState {
  double rho = 0.0;
  double mx = 0.0;
  double my = 0.0;
  double E = 0.0;

  State to_array() const { return {rho, mx, my, E}; }
  static ConservedState from_array(const State& s) { return {s[0], s[1], s[2], s[3]}; }
};

struct PrimitiveState {
  double rho = 0.0;
  double u = 0.0;
  double v = 0.0;
  double p = 0.0;
};

/// p = (gamma - 1)(E - |m|^2 / (2 rho)); throws NonPhysicalState if rho <= 0 or p <= 0.
double pressure(const ConservedState& U, const GasParams& g);

PrimitiveState cons_to_prim(const ConservedState& U, const GasParams& g);
ConservedState prim_to_cons(const PrimitiveState& W, const GasParams& g);

/// Total entropy S = c_v rho ln(p / rho^gamma).
double entropy(const ConservedState& U, const GasParams& g);
double entropy_from_prim(double rho, double p, const GasParams& g);

/// Inverse of the entropy at fixed density: p = rho^gamma exp(S / (c_v rho)).
double pressure_from_entropy(double rho, double S, const GasParams& g);

/// Internal energy per unit mass e(rho, S) = c_v rho^(gamma-1) exp(S / (c_v rho)).
double internal_energy_from_entropy(double rho, double S, const GasParams& g);

double sound_speed(double rho, double p, const GasParams& g);

}  // namespace khe

namespace khe {

class ConservedField;

struct WaveSpeeds {
  double x = 0.0;
  double y = 0.0;
};

/// Maximum |u| + c and |v| + c over all nodes of the field.
WaveSpeeds max_wave_speeds(const ConservedField& field, const GasParams& g);

}  // namespace khe
