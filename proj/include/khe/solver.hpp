#pragma once

#include <type_traits>
#include <vector>

#include "khe/gas.hpp"
#include "khe/mesh.hpp"

namespace khe {

enum class ReconstructionVars { Characteristic, Primitive };

struct SolverConfig {
  double cfl = 0.45;
  double weno_eps = 1e-12;
  ReconstructionVars vars = ReconstructionVars::Characteristic;
  double t_end = 2.0;
  /// Intermediate output times in (0, t_end); t_end itself is always produced.
  std::vector<double> snapshot_times;
  long max_steps = 10'000'000;
  /// When > 0, dt is additionally scaled by (reference / N)^(2/3) so the
  /// third-order time error shrinks like dx^5 in convergence studies.
  int accuracy_reference_cells = 0;
  /// When > 0, every step uses this dt (clipped at output times) instead of
  /// the CFL-based one.
  double fixed_dt = 0.0;

  void validate() const;
};

using Tendency = std::vector<State>;

/// Semi-discrete right-hand side in conservative flux-difference form,
/// dU/dt = -(H_{j+1/2} - H_{j-1/2}) / dx - (G_{k+1/2} - G_{k-1/2}) / dy.
/// `fallbacks`, when given, is incremented once per interface side that had
/// to drop to first order because the interpolated state was non-physical.
Tendency rhs(const ConservedField& field, const GasParams& g, const SolverConfig& cfg,
             long* fallbacks = nullptr);

/// Three-stage SSP Runge-Kutta update for any vector of doubles or States:
/// U1 = U + dt L(U); U2 = 3/4 U + 1/4 (U1 + dt L(U1)); U+ = 1/3 U + 2/3 (U2 + dt L(U2)).
/// `check(stage, U)` runs after each stage (stage = 1, 2, 3).
template <class Elem, class Op, class Check>
std::vector<Elem> ssprk3(const std::vector<Elem>& u0, double dt, Op&& op, Check&& check) {
  auto blend = [dt](double a, const Elem& x, double b, const Elem& y, const Elem& l) {
    if constexpr (std::is_arithmetic_v<Elem>) {
      return a * x + b * (y + dt * l);
    } else {
      Elem out{};
      for (std::size_t c = 0; c < out.size(); ++c) out[c] = a * x[c] + b * (y[c] + dt * l[c]);
      return out;
    }
  };
  const std::size_t n = u0.size();
  std::vector<Elem> u1(n), u2(n), u3(n);
  {
    const std::vector<Elem> l = op(u0);
    for (std::size_t i = 0; i < n; ++i) u1[i] = blend(0.0, u0[i], 1.0, u0[i], l[i]);
    check(1, u1);
  }
  {
    const std::vector<Elem> l = op(u1);
    for (std::size_t i = 0; i < n; ++i) u2[i] = blend(0.75, u0[i], 0.25, u1[i], l[i]);
    check(2, u2);
  }
  {
    const std::vector<Elem> l = op(u2);
    for (std::size_t i = 0; i < n; ++i) u3[i] = blend(1.0 / 3.0, u0[i], 2.0 / 3.0, u2[i], l[i]);
    check(3, u3);
  }
  return u3;
}

/// Three-stage SSP Runge-Kutta step of the Euler semi-discretization.
ConservedField step_ssprk3(const ConservedField& field, double dt, const GasParams& g,
                           const SolverConfig& cfg, long* fallbacks = nullptr);

/// Time step from the CFL condition (and optional accuracy scaling).
double stable_dt(const ConservedField& field, const GasParams& g, const SolverConfig& cfg);

struct Snapshot {
  double t = 0.0;
  GridField field;
  double total_entropy = 0.0;
};

struct RunResult {
  GridField final_field;  // rho, m_x, m_y, E, S
  long steps = 0;
  double wall_seconds = 0.0;
  double min_density = 0.0;
  double min_pressure = 0.0;
  long fallbacks = 0;
  std::vector<Snapshot> snapshots;  // intermediate times only
  /// (t, integral of S) at t = 0, each snapshot time, and t_end.
  std::vector<std::pair<double, double>> entropy_log;
};

RunResult advance(const ConservedField& initial, double t_end, const GasParams& g, const SolverConfig& cfg);

}  // namespace khe
