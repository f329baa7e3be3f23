#include "khe/solver.hpp"

#include "characteristic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace khe {

namespace {

using detail::RoeFrame;
using detail::from_characteristic;
using detail::roe_frame;
using detail::to_characteristic;

/// Fifth-order WENO-Z interpolation of point values v0..v4 (at j-2..j+2)
/// to the half node j+1/2.
inline double weno5z_midpoint(double v0, double v1, double v2, double v3, double v4, double eps) {
  const double p0 = (3.0 * v0 - 10.0 * v1 + 15.0 * v2) * 0.125;
  const double p1 = (-v1 + 6.0 * v2 + 3.0 * v3) * 0.125;
  const double p2 = (3.0 * v2 + 6.0 * v3 - v4) * 0.125;

  const double a0 = v0 - 2.0 * v1 + v2, b0 = v0 - 4.0 * v1 + 3.0 * v2;
  const double a1 = v1 - 2.0 * v2 + v3, b1 = v1 - v3;
  const double a2 = v2 - 2.0 * v3 + v4, b2 = 3.0 * v2 - 4.0 * v3 + v4;
  const double beta0 = 13.0 / 12.0 * a0 * a0 + 0.25 * b0 * b0;
  const double beta1 = 13.0 / 12.0 * a1 * a1 + 0.25 * b1 * b1;
  const double beta2 = 13.0 / 12.0 * a2 * a2 + 0.25 * b2 * b2;
  const double tau5 = std::abs(beta0 - beta2);

  // Linear weights (1, 10, 5) / 16 and alpha_k = d_k (1 + (tau5 / (beta_k + eps))^2),
  // scaled by the product of all (beta_k + eps)^2 so only one division remains.
  const double s0 = (beta0 + eps) * (beta0 + eps);
  const double s1 = (beta1 + eps) * (beta1 + eps);
  const double s2 = (beta2 + eps) * (beta2 + eps);
  const double t2 = tau5 * tau5;
  const double w0 = 1.0 * (s0 + t2) * s1 * s2;
  const double w1 = 10.0 * (s1 + t2) * s0 * s2;
  const double w2 = 5.0 * (s2 + t2) * s0 * s1;
  return (w0 * p0 + w1 * p1 + w2 * p2) / (w0 + w1 + w2);
}

/// Pressure without throwing; the caller decides how to treat p <= 0.
inline double raw_pressure(const State& u, double gm1) {
  return gm1 * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0]);
}

inline bool physical(const State& u, double gm1) {
  return u[0] > 0.0 && raw_pressure(u, gm1) > 0.0;
}

/// Flux in the normal direction for a state ordered (rho, m_n, m_t, E).
inline State normal_flux(const State& u, double p) {
  const double un = u[1] / u[0];
  return {u[1], u[1] * un + p, u[2] * un, (u[3] + p) * un};
}

inline State to_prim(const State& u, double p) { return {u[0], u[1] / u[0], u[2] / u[0], p}; }

inline State from_prim(const State& w, double gm1) {
  return {w[0], w[0] * w[1], w[0] * w[2], w[3] / gm1 + 0.5 * w[0] * (w[1] * w[1] + w[2] * w[2])};
}

/// One periodic 1-D line: `u` holds n + 6 states (three ghosts per side) in
/// (rho, m_n, m_t, E) order; accumulates -(H_{i+1/2} - H_{i-1/2}) / dx into `out`.
class LineSweep {
 public:
  LineSweep(const GasParams& g, const SolverConfig& cfg) : gamma_(g.gamma()), gm1_(g.gamma() - 1.0), cfg_(cfg) {}

  void run(const std::vector<State>& u, int n, double inv_dx, State* out, int stride, long& fallbacks) {
    const int ext = n + 6;
    p_.resize(static_cast<std::size_t>(ext));
    f_.resize(static_cast<std::size_t>(ext));
    w_.resize(static_cast<std::size_t>(ext));
    h_.resize(static_cast<std::size_t>(n) + 1);
    for (int e = 0; e < ext; ++e) {
      p_[e] = raw_pressure(u[e], gm1_);
      f_[e] = normal_flux(u[e], p_[e]);
    }
    // h_[i] is the numerical flux at the interface between nodes i-1 and i
    // (extended indices i+2 and i+3), i = 0..n.
    for (int i = 0; i <= n; ++i) h_[i] = interface_flux(u, i + 2, fallbacks);
    for (int i = 0; i < n; ++i) {
      State& t = out[static_cast<std::ptrdiff_t>(i) * stride];
      for (int c = 0; c < 4; ++c) t[c] -= (h_[i + 1][c] - h_[i][c]) * inv_dx;
    }
  }

 private:
  // Interface between extended nodes e and e+1.
  State interface_flux(const std::vector<State>& u, int e, long& fallbacks) {
    State um{}, up{};
    const double eps = cfg_.weno_eps;
    if (cfg_.vars == ReconstructionVars::Characteristic) {
      const RoeFrame frame = roe_frame(u[e], p_[e], u[e + 1], p_[e + 1], gamma_);
      for (int k = -2; k <= 3; ++k) w_[e + k] = to_characteristic(frame, u[e + k]);
      State wm{}, wp{};
      for (int c = 0; c < 4; ++c) {
        wm[c] = weno5z_midpoint(w_[e - 2][c], w_[e - 1][c], w_[e][c], w_[e + 1][c], w_[e + 2][c], eps);
        wp[c] = weno5z_midpoint(w_[e + 3][c], w_[e + 2][c], w_[e + 1][c], w_[e][c], w_[e - 1][c], eps);
      }
      um = from_characteristic(frame, wm);
      up = from_characteristic(frame, wp);
    } else {
      for (int k = -2; k <= 3; ++k) w_[e + k] = to_prim(u[e + k], p_[e + k]);
      State wm{}, wp{};
      for (int c = 0; c < 4; ++c) {
        wm[c] = weno5z_midpoint(w_[e - 2][c], w_[e - 1][c], w_[e][c], w_[e + 1][c], w_[e + 2][c], eps);
        wp[c] = weno5z_midpoint(w_[e + 3][c], w_[e + 2][c], w_[e + 1][c], w_[e][c], w_[e - 1][c], eps);
      }
      um = (wm[0] > 0.0 && wm[3] > 0.0) ? from_prim(wm, gm1_) : State{-1.0, 0.0, 0.0, 0.0};
      up = (wp[0] > 0.0 && wp[3] > 0.0) ? from_prim(wp, gm1_) : State{-1.0, 0.0, 0.0, 0.0};
    }
    if (!physical(um, gm1_)) {
      um = u[e];
      ++fallbacks;
    }
    if (!physical(up, gm1_)) {
      up = u[e + 1];
      ++fallbacks;
    }

    const double pm = raw_pressure(um, gm1_);
    const double pp = raw_pressure(up, gm1_);
    const double cm = std::sqrt(gamma_ * pm / um[0]);
    const double cp = std::sqrt(gamma_ * pp / up[0]);
    const double unm = um[1] / um[0];
    const double unp = up[1] / up[0];
    const double ap = std::max({unm + cm, unp + cp, 0.0});
    const double am = std::min({unm - cm, unp - cp, 0.0});
    const State fm = normal_flux(um, pm);
    const State fp = normal_flux(up, pp);

    State h{};
    const double span = ap - am;
    for (int c = 0; c < 4; ++c) {
      double cu;
      if (span > 1e-14) {
        cu = (ap * fm[c] - am * fp[c]) / span + ap * am / span * (up[c] - um[c]);
      } else {
        cu = 0.5 * (fm[c] + fp[c]);
      }
      // High-order corrections -(dx^2/24) F_xx + (7 dx^4/5760) F_xxxx at the
      // half node from the six surrounding point fluxes.
      const double f0 = f_[e - 2][c], f1 = f_[e - 1][c], f2 = f_[e][c];
      const double f3 = f_[e + 1][c], f4 = f_[e + 2][c], f5 = f_[e + 3][c];
      const double d2 = -5.0 * f0 + 39.0 * f1 - 34.0 * f2 - 34.0 * f3 + 39.0 * f4 - 5.0 * f5;
      const double d4 = f0 - 3.0 * f1 + 2.0 * f2 + 2.0 * f3 - 3.0 * f4 + f5;
      h[c] = cu - d2 / 1152.0 + 7.0 * d4 / 11520.0;
    }
    return h;
  }

  double gamma_;
  double gm1_;
  const SolverConfig& cfg_;
  std::vector<double> p_;
  std::vector<State> f_, w_, h_;
};

void check_physical(const std::vector<State>& states, double gm1, const std::string& where) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!physical(states[i], gm1)) {
      std::ostringstream os;
      os << where << ": node " << i << " rho=" << states[i][0] << " p=" << raw_pressure(states[i], gm1);
      throw Error(ErrorKind::NonPhysicalState, os.str());
    }
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(cfl > 0.0 && cfl < 1.0)) throw Error(ErrorKind::Config, "cfl must lie in (0, 1)");
  if (!(t_end >= 0.0)) throw Error(ErrorKind::Config, "t_end must be >= 0");
  if (!(weno_eps > 0.0)) throw Error(ErrorKind::Config, "weno_eps must be > 0");
  if (max_steps < 1) throw Error(ErrorKind::Config, "max_steps must be >= 1");
  if (fixed_dt < 0.0) throw Error(ErrorKind::Config, "fixed_dt must be >= 0");
  for (double t : snapshot_times) {
    if (!(t > 0.0 && t <= t_end)) throw Error(ErrorKind::Config, "snapshot times must lie in (0, t_end]");
  }
}

Tendency rhs(const ConservedField& field, const GasParams& g, const SolverConfig& cfg, long* fallbacks) {
  const int n = field.n();
  const double inv_dx = static_cast<double>(n);  // dx = dy = 1/N
  Tendency out(field.states().size(), State{0.0, 0.0, 0.0, 0.0});
  LineSweep sweep(g, cfg);
  std::vector<State> line(static_cast<std::size_t>(n) + 6);
  long count = 0;

  // x direction: rows k, normal momentum m_x.
  for (int k = 0; k < n; ++k) {
    for (int e = 0; e < n + 6; ++e) line[e] = field(e - 3, k);
    sweep.run(line, n, inv_dx, &out[static_cast<std::size_t>(k) * n], 1, count);
  }
  // y direction: columns j, normal momentum m_y (swap components 1 and 2).
  std::vector<State> col(static_cast<std::size_t>(n), State{0.0, 0.0, 0.0, 0.0});
  for (int j = 0; j < n; ++j) {
    for (int e = 0; e < n + 6; ++e) {
      const State& s = field(j, e - 3);
      line[e] = {s[0], s[2], s[1], s[3]};
    }
    std::fill(col.begin(), col.end(), State{0.0, 0.0, 0.0, 0.0});
    sweep.run(line, n, inv_dx, col.data(), 1, count);
    for (int k = 0; k < n; ++k) {
      State& t = out[static_cast<std::size_t>(k) * n + j];
      const State& c = col[static_cast<std::size_t>(k)];
      t[0] += c[0];
      t[1] += c[2];
      t[2] += c[1];
      t[3] += c[3];
    }
  }
  if (fallbacks) *fallbacks += count;
  return out;
}

ConservedField step_ssprk3(const ConservedField& field, double dt, const GasParams& g, const SolverConfig& cfg,
                           long* fallbacks) {
  if (!(dt > 0.0)) throw Error(ErrorKind::Domain, "dt must be > 0");
  const double gm1 = g.gamma() - 1.0;
  ConservedField work(field.level(), field.n());
  auto op = [&](const std::vector<State>& u) {
    work.states() = u;
    return rhs(work, g, cfg, fallbacks);
  };
  auto check = [gm1](int stage, const std::vector<State>& u) {
    check_physical(u, gm1, "SSP-RK3 stage " + std::to_string(stage));
  };
  ConservedField out(field.level(), field.n());
  out.states() = ssprk3(field.states(), dt, op, check);
  return out;
}

double stable_dt(const ConservedField& field, const GasParams& g, const SolverConfig& cfg) {
  if (cfg.fixed_dt > 0.0) return cfg.fixed_dt;
  const WaveSpeeds ws = max_wave_speeds(field, g);
  const double h = 1.0 / field.n();
  double dt = cfg.cfl * std::min(h / ws.x, h / ws.y);
  if (cfg.accuracy_reference_cells > 0) {
    dt *= std::pow(static_cast<double>(cfg.accuracy_reference_cells) / field.n(), 2.0 / 3.0);
  }
  return dt;
}

namespace {

void track_extrema(const ConservedField& f, double gm1, RunResult& r) {
  for (const State& s : f.states()) {
    r.min_density = std::min(r.min_density, s[0]);
    r.min_pressure = std::min(r.min_pressure, raw_pressure(s, gm1));
  }
}

}  // namespace

RunResult advance(const ConservedField& initial, double t_end, const GasParams& g, const SolverConfig& cfg) {
  if (t_end < 0.0) throw Error(ErrorKind::Domain, "t_end must be >= 0");
  const auto start = std::chrono::steady_clock::now();
  const double gm1 = g.gamma() - 1.0;
  check_physical(initial.states(), gm1, "initial data");

  RunResult result;
  result.min_density = std::numeric_limits<double>::infinity();
  result.min_pressure = std::numeric_limits<double>::infinity();
  track_extrema(initial, gm1, result);

  std::vector<double> stops;
  for (double t : cfg.snapshot_times)
    if (t > 0.0 && t < t_end) stops.push_back(t);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  stops.push_back(t_end);

  auto total_entropy = [&](const GridField& f) { return integral(f.get("S"), f.n()); };

  ConservedField u = initial;
  result.entropy_log.emplace_back(0.0, total_entropy(u.to_grid_field(g)));
  double t = 0.0;
  std::size_t next = 0;
  if (t_end == 0.0) next = stops.size();
  while (next < stops.size()) {
    if (result.steps >= cfg.max_steps) {
      throw Error(ErrorKind::MaxStepsExceeded, "exceeded " + std::to_string(cfg.max_steps) + " steps at t=" +
                                                   std::to_string(t));
    }
    double dt = stable_dt(u, g, cfg);
    bool hit = false;
    if (t + dt >= stops[next]) {
      dt = stops[next] - t;
      hit = true;
    }
    try {
      u = step_ssprk3(u, dt, g, cfg, &result.fallbacks);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonPhysicalState) throw;
      std::ostringstream os;
      os << "blow-up at t=" << t << " (step " << result.steps + 1 << "): " << e.what();
      throw Error(ErrorKind::NonPhysicalState, os.str());
    }
    ++result.steps;
    track_extrema(u, gm1, result);
    if (hit) {
      t = stops[next];
      GridField snap = u.to_grid_field(g);
      const double s_total = total_entropy(snap);
      result.entropy_log.emplace_back(t, s_total);
      if (next + 1 < stops.size()) result.snapshots.push_back({t, std::move(snap), s_total});
      ++next;
    } else {
      t += dt;
    }
  }
  result.final_field = u.to_grid_field(g);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace khe
