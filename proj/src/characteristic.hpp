#pragma once

#include <algorithm>
#include <cmath>

#include "khe/gas.hpp"

// Characteristic decomposition of the normal-flux Jacobian of the 2-D Euler
// system for states ordered (rho, m_n, m_t, E).
namespace khe::detail {

/// Roe-averaged state defining the characteristic frame of the normal-flux
/// Jacobian; eigenvectors are applied in closed form below.
struct RoeFrame {
  double u, v, H, c, q2, b1;
};

inline RoeFrame roe_frame(const State& a, double pa, const State& b, double pb, double gamma) {
  const double ra = std::sqrt(a[0]), rb = std::sqrt(b[0]);
  const double inv = 1.0 / (ra + rb);
  RoeFrame f{};
  f.u = (a[1] / ra + b[1] / rb) * inv;
  f.v = (a[2] / ra + b[2] / rb) * inv;
  f.H = ((a[3] + pa) / ra + (b[3] + pb) / rb) * inv;
  f.q2 = f.u * f.u + f.v * f.v;
  const double c2 = std::max((gamma - 1.0) * (f.H - 0.5 * f.q2), 1e-300);
  f.c = std::sqrt(c2);
  f.b1 = (gamma - 1.0) / c2;
  return f;
}

/// Left eigenvectors (rows): acoustic (u - c), entropy, shear, acoustic (u + c).
inline State to_characteristic(const RoeFrame& f, const State& x) {
  const double k = f.b1 * (0.5 * f.q2 * x[0] - f.u * x[1] - f.v * x[2] + x[3]);
  const double a = (f.u * x[0] - x[1]) / f.c;
  return {0.5 * (k + a), x[0] - k, x[2] - f.v * x[0], 0.5 * (k - a)};
}

/// Right eigenvectors (columns) (1, u-c, v, H-uc), (1, u, v, q^2/2), (0, 0, 1, v), (1, u+c, v, H+uc).
inline State from_characteristic(const RoeFrame& f, const State& w) {
  const double rho = w[0] + w[1] + w[3];
  const double jump = w[3] - w[0];
  return {rho, f.u * rho + f.c * jump, f.v * rho + w[2],
          f.H * (w[0] + w[3]) + f.u * f.c * jump + 0.5 * f.q2 * w[1] + f.v * w[2]};
}

}  // namespace khe::detail
