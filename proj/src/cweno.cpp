#include "khe/cweno.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

namespace khe {

namespace {

constexpr int kStencil = 7;
constexpr int kCubic = 4;

// Undivided sixth difference; O(h^6) on smooth data and O(1) across a jump.
constexpr std::array<double, kStencil> kSixthDifference = {1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0};

/// Monomial coefficients of the Lagrange basis on integer offsets.
template <int N>
std::array<LocalPoly, N> lagrange_basis(const std::array<int, N>& offsets) {
  std::array<LocalPoly, N> basis{};
  for (int i = 0; i < N; ++i) {
    LocalPoly p{};
    p[0] = 1.0;
    int deg = 0;
    double denom = 1.0;
    for (int k = 0; k < N; ++k) {
      if (k == i) continue;
      // p *= (t - o_k)
      for (int d = deg + 1; d >= 1; --d) p[d] = p[d - 1] - offsets[k] * p[d];
      p[0] = -offsets[k] * p[0];
      ++deg;
      denom *= offsets[i] - offsets[k];
    }
    for (double& c : p) c /= denom;
    basis[i] = p;
  }
  return basis;
}

struct Tables {
  // central[c][i]: basis on offsets i - c, i = 0..6 (c = position of the target node).
  std::array<std::array<LocalPoly, kStencil>, kStencil> central{};
  // cubic[r][i]: basis on offsets i - r, i = 0..3.
  std::array<std::array<LocalPoly, kCubic>, kCubic> cubic{};

  Tables() {
    for (int c = 0; c < kStencil; ++c) {
      std::array<int, kStencil> off{};
      for (int i = 0; i < kStencil; ++i) off[i] = i - c;
      central[c] = lagrange_basis<kStencil>(off);
    }
    for (int r = 0; r < kCubic; ++r) {
      std::array<int, kCubic> off{};
      for (int i = 0; i < kCubic; ++i) off[i] = i - r;
      cubic[r] = lagrange_basis<kCubic>(off);
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

// Integral of t^n over [-1/2, 1/2].
double monomial_moment(int n) {
  if (n % 2 == 1) return 0.0;
  return 2.0 * std::pow(0.5, n + 1) / (n + 1);
}

/// Jiang-Shu indicator in local coordinates: sum over derivative orders
/// s >= 1 of the integral of (d^s p / dt^s)^2 over the cell.
double smoothness(const LocalPoly& p) {
  double beta = 0.0;
  LocalPoly d = p;
  for (int s = 1; s < kStencil; ++s) {
    for (int k = 0; k + 1 < kStencil; ++k) d[k] = (k + 1) * d[k + 1];
    d[kStencil - 1] = 0.0;
    for (int i = 0; i < kStencil; ++i) {
      if (d[i] == 0.0) continue;
      for (int j = 0; j < kStencil; ++j) beta += d[i] * d[j] * monomial_moment(i + j);
    }
  }
  return beta;
}

LocalPoly combine(const std::array<LocalPoly, kStencil>& basis, const double* values, int count) {
  LocalPoly p{};
  for (int i = 0; i < count; ++i) {
    for (int d = 0; d < kStencil; ++d) p[d] += values[i] * basis[i][d];
  }
  return p;
}

LocalPoly combine_cubic(const std::array<LocalPoly, kCubic>& basis, const double* values) {
  LocalPoly p{};
  for (int i = 0; i < kCubic; ++i) {
    for (int d = 0; d < kStencil; ++d) p[d] += values[i] * basis[i][d];
  }
  return p;
}

/// One CWENO7 piece from a 7-sample window; `c` is the window position of
/// the node the piece belongs to.
LocalPoly build_piece(const double* window, int c, const CwenoConfig& cfg) {
  const Tables& tab = tables();
  const LocalPoly optimal = combine(tab.central[c], window, kStencil);
  if (cfg.mode == CwenoMode::Linear) {
    LocalPoly p = optimal;
    p[0] = window[c];
    return p;
  }

  std::array<LocalPoly, kCubic> cubics{};
  int count = 0;
  for (int q = std::max(0, c - (kCubic - 1)); q <= std::min(c, kStencil - kCubic); ++q) {
    cubics[count++] = combine_cubic(tab.cubic[c - q], window + q);
  }

  const double d0 = cfg.central_weight;
  const double dk = (1.0 - d0) / count;

  double diff = 0.0;
  for (int i = 0; i < kStencil; ++i) diff += kSixthDifference[i] * window[i];
  const double tau = diff * diff;

  auto alpha = [&](double linear, double beta) {
    return linear * (1.0 + std::pow(tau / (beta + cfg.eps), cfg.power));
  };

  std::array<double, kCubic + 1> w{};
  w[0] = alpha(d0, smoothness(optimal));
  double total = w[0];
  for (int k = 0; k < count; ++k) {
    w[k + 1] = alpha(dk, smoothness(cubics[k]));
    total += w[k + 1];
  }
  for (int k = 0; k <= count; ++k) w[k] /= total;

  // sum_k w_k P_k with P_0 = (P_opt - sum_k dk P_k) / d0.
  LocalPoly p{};
  const double scale = w[0] / d0;
  for (int d = 0; d < kStencil; ++d) p[d] = scale * optimal[d];
  for (int k = 0; k < count; ++k) {
    const double coef = w[k + 1] - scale * dk;
    for (int d = 0; d < kStencil; ++d) p[d] += coef * cubics[k][d];
  }
  p[0] = window[c];
  return p;
}

}  // namespace

void CwenoConfig::validate() const {
  if (!(eps > 0.0)) throw Error(ErrorKind::Config, "cweno eps must be > 0");
  if (!(power >= 1.0)) throw Error(ErrorKind::Config, "cweno power must be >= 1");
  if (!(central_weight > 0.0 && central_weight < 1.0)) {
    throw Error(ErrorKind::Config, "cweno central weight must lie in (0, 1)");
  }
}

double eval_local(const LocalPoly& p, double t) {
  double v = p[kStencil - 1];
  for (int d = kStencil - 2; d >= 0; --d) v = v * t + p[d];
  return v;
}

PiecewisePoly cweno7_build(std::span<const double> samples, double lower, double upper,
                           const CwenoConfig& cfg) {
  cfg.validate();
  const auto L = static_cast<int>(samples.size());
  if (L < kStencil) {
    throw Error(ErrorKind::TooFewSamples, "CWENO7 needs at least 7 samples, got " + std::to_string(L));
  }
  if (!(upper > lower)) throw Error(ErrorKind::NonUniform, "empty sample interval");
  const double h = (upper - lower) / (L - 1);
  std::vector<LocalPoly> pieces(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    const int s = std::clamp(l - kStencil / 2, 0, L - kStencil);
    pieces[static_cast<std::size_t>(l)] = build_piece(samples.data() + s, l - s, cfg);
  }
  return PiecewisePoly(lower, h, std::move(pieces));
}

PiecewisePoly cweno7_build(std::span<const double> samples, std::span<const double> nodes,
                           const CwenoConfig& cfg) {
  if (nodes.size() != samples.size()) throw Error(ErrorKind::Shape, "nodes/samples length mismatch");
  if (nodes.size() < kStencil) {
    throw Error(ErrorKind::TooFewSamples, "CWENO7 needs at least 7 samples");
  }
  const double h = (nodes.back() - nodes.front()) / static_cast<double>(nodes.size() - 1);
  if (!(h > 0.0)) throw Error(ErrorKind::NonUniform, "nodes must be strictly increasing");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (std::abs((nodes[i] - nodes[i - 1]) - h) > 1e-12 * h) {
      throw Error(ErrorKind::NonUniform, "sample nodes are not uniformly spaced");
    }
  }
  return cweno7_build(samples, nodes.front(), nodes.back(), cfg);
}

double poly_eval(const PiecewisePoly& pp, double xi) {
  const double lo = pp.lower();
  const double hi = pp.upper();
  const double h = pp.spacing();
  if (xi < lo - 1e-14 * h || xi > hi + 1e-14 * h) throw Error(ErrorKind::OutOfRange, "xi outside node range");
  const double s = (xi - lo) / h;
  const double nearest = std::round(s);
  // Snap node hits so poly_eval(xi_l) returns the stored sample exactly.
  if (std::abs(s - nearest) <= 1e-12) return pp.piece(static_cast<std::size_t>(nearest))[0];
  const auto last = static_cast<long>(pp.size()) - 1;
  // Interface points (within roundoff) belong to the left cell.
  const long cell = std::clamp(static_cast<long>(std::ceil(s - 0.5 - 1e-12)), 0L, last);
  return eval_local(pp.piece(static_cast<std::size_t>(cell)), s - static_cast<double>(cell));
}

std::vector<LocalPoly> cweno7_periodic_pieces(std::span<const double> samples, const CwenoConfig& cfg) {
  const auto n = static_cast<int>(samples.size());
  if (n < 1) throw Error(ErrorKind::TooFewSamples, "empty periodic sample set");
  std::vector<LocalPoly> pieces(static_cast<std::size_t>(n));
  std::array<double, kStencil> window{};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < kStencil; ++i) {
      const int idx = (((j + i - kStencil / 2) % n) + n) % n;
      window[i] = samples[static_cast<std::size_t>(idx)];
    }
    pieces[static_cast<std::size_t>(j)] = build_piece(window.data(), kStencil / 2, cfg);
  }
  return pieces;
}

std::vector<double> refine_1d(std::span<const double> coarse, const CwenoConfig& cfg) {
  cfg.validate();
  const auto n = coarse.size();
  const auto pieces = cweno7_periodic_pieces(coarse, cfg);
  std::vector<double> fine(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    fine[2 * j] = coarse[j];
    const double left = eval_local(pieces[j], 0.5);
    const double right = eval_local(pieces[(j + 1) % n], -0.5);
    fine[2 * j + 1] = 0.5 * (left + right);
  }
  return fine;
}

namespace {

std::vector<double> double_2d(const std::vector<double>& values, int n, const CwenoConfig& cfg) {
  const int fn = 2 * n;
  // x sweep: n rows of length n -> n rows of length 2n.
  std::vector<double> wide(static_cast<std::size_t>(n) * fn);
  std::vector<double> line(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(k) * n, n, line.begin());
    const auto row = refine_1d(line, cfg);
    std::copy(row.begin(), row.end(), wide.begin() + static_cast<std::ptrdiff_t>(k) * fn);
  }
  // y sweep: 2n columns of length n -> length 2n.
  std::vector<double> out(static_cast<std::size_t>(fn) * fn);
  for (int j = 0; j < fn; ++j) {
    for (int k = 0; k < n; ++k) line[static_cast<std::size_t>(k)] = wide[static_cast<std::size_t>(k) * fn + j];
    const auto col = refine_1d(line, cfg);
    for (int k = 0; k < fn; ++k) out[static_cast<std::size_t>(k) * fn + j] = col[static_cast<std::size_t>(k)];
  }
  return out;
}

}  // namespace

GridField refine_2d(const GridField& field, int target_level, const CwenoConfig& cfg) {
  if (target_level < field.level()) {
    throw Error(ErrorKind::HierarchyMismatch, "cannot refine level " + std::to_string(field.level()) +
                                                  " to coarser level " + std::to_string(target_level));
  }
  cfg.validate();
  if (target_level == field.level()) return field;
  const int doublings = target_level - field.level();
  GridField out(target_level, field.n() << doublings);
  for (const auto& [name, values] : field.components()) {
    std::vector<double> current = values;
    int n = field.n();
    for (int d = 0; d < doublings; ++d) {
      current = double_2d(current, n, cfg);
      n *= 2;
    }
    out.add(name, std::move(current));
  }
  return out;
}

Moments quadrature_moments(const PiecewisePoly& pp, const Weight& weight) {
  if (weight.kind != WeightKind::Uniform) {
    throw Error(ErrorKind::UnsupportedWeight, "only the uniform density is supported");
  }
  if (!(weight.b > weight.a)) throw Error(ErrorKind::Domain, "weight interval is empty");
  using Rule = boost::math::quadrature::gauss<double, 7>;
  const double density = 1.0 / (weight.b - weight.a);
  const double h = pp.spacing();
  const std::size_t L = pp.size();

  // Integrates f(piece value) over piece l's cell in local t coordinates.
  auto cell_integral = [&](std::size_t l, auto&& f) {
    const double lo = (l == 0) ? 0.0 : -0.5;
    const double hi = (l + 1 == L) ? 0.0 : 0.5;
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    // Rule stores nonnegative abscissae; odd point count includes x = 0.
    double sum = w[0] * f(eval_local(pp.piece(l), mid));
    for (std::size_t i = 1; i < x.size(); ++i) {
      sum += w[i] * (f(eval_local(pp.piece(l), mid + half * x[i])) +
                     f(eval_local(pp.piece(l), mid - half * x[i])));
    }
    return sum * half * h * density;
  };

  Moments m;
  for (std::size_t l = 0; l < L; ++l) m.mean += cell_integral(l, [](double v) { return v; });
  double var = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    var += cell_integral(l, [&](double v) { return (v - m.mean) * (v - m.mean); });
  }
  if (var < 0.0 && var > -1e-14) var = 0.0;
  m.std = std::sqrt(var);
  return m;
}

}  // namespace khe
