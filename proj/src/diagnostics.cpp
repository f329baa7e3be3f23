#include "khe/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "khe/error.hpp"

namespace khe {

GridField with_auxiliaries(const GridField& solution, const GasParams& g) {
  const auto& rho = solution.get("rho");
  const auto& mx = solution.get("m_x");
  const auto& my = solution.get("m_y");
  const auto& e = solution.get("E");
  const std::size_t size = rho.size();
  GridField out(solution.level(), solution.n());
  for (const char* name : {"rho", "m_x", "m_y", "E", "S"}) out.add(name, solution.get(name));
  std::vector<double> xx(size), xy(size), yy(size), p(size), m2(size), re(size);
  const double gm1 = g.gamma() - 1.0;
  for (std::size_t i = 0; i < size; ++i) {
    if (!(rho[i] > 0.0)) throw Error(ErrorKind::NonPhysicalState, "non-positive density in solution field");
    const double inv = 1.0 / rho[i];
    xx[i] = mx[i] * mx[i] * inv;
    xy[i] = mx[i] * my[i] * inv;
    yy[i] = my[i] * my[i] * inv;
    m2[i] = xx[i] + yy[i];
    p[i] = gm1 * (e[i] - 0.5 * m2[i]);
    re[i] = g.c_v() * p[i];
  }
  out.add("mm_xx", std::move(xx));
  out.add("mm_xy", std::move(xy));
  out.add("mm_yy", std::move(yy));
  out.add("p", std::move(p));
  out.add("m2_rho", std::move(m2));
  out.add("rho_e", std::move(re));
  return out;
}

std::vector<GridField> cesaro_prefixes(const std::vector<GridField>& per_level, int target_level, const GasParams& g,
                                       const CwenoConfig& cfg) {
  const int M = static_cast<int>(per_level.size());
  if (M < 1) throw Error(ErrorKind::MissingLevel, "Cesaro average needs at least one level");
  for (int m = 1; m <= M; ++m) {
    if (per_level[m - 1].level() != m) {
      throw Error(ErrorKind::MissingLevel, "expected level " + std::to_string(m) + " at position " +
                                               std::to_string(m - 1) + ", found level " +
                                               std::to_string(per_level[m - 1].level()));
    }
    if (m > 1 && per_level[m - 1].n() != 2 * per_level[m - 2].n()) {
      throw Error(ErrorKind::HierarchyMismatch, "levels are not nested by factor 2");
    }
  }
  if (target_level < M) throw Error(ErrorKind::HierarchyMismatch, "target level below the finest input level");

  const int n_target = per_level[M - 1].n() << (target_level - M);
  std::vector<std::vector<double>> sums(kCesaroNames.size(),
                                        std::vector<double>(static_cast<std::size_t>(n_target) * n_target, 0.0));
  std::vector<GridField> out;
  out.reserve(static_cast<std::size_t>(M));
  for (int m = 1; m <= M; ++m) {
    const GridField fine = refine_2d(with_auxiliaries(per_level[m - 1], g), target_level, cfg);
    GridField avg(target_level, n_target);
    const double w = 1.0 / m;
    for (std::size_t c = 0; c < kCesaroNames.size(); ++c) {
      const auto& v = fine.get(kCesaroNames[c]);
      auto& s = sums[c];
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += v[i];
      std::vector<double> a(s);
      for (double& x : a) x *= w;
      avg.add(kCesaroNames[c], std::move(a));
    }
    out.push_back(std::move(avg));
  }
  return out;
}

GridField cesaro_average(const std::vector<GridField>& per_level, int target_level, const GasParams& g,
                         const CwenoConfig& cfg) {
  return std::move(cesaro_prefixes(per_level, target_level, g, cfg).back());
}

XiStats xi_statistics(const std::vector<std::span<const double>>& per_xi, const CollocationGrid& grid,
                      const CwenoConfig& cfg) {
  grid.validate();
  const std::size_t L = per_xi.size();
  if (static_cast<int>(L) != grid.count) throw Error(ErrorKind::Shape, "sample count differs from collocation grid");
  if (L < 7) throw Error(ErrorKind::TooFewSamples, "xi statistics need at least 7 collocation nodes");
  const std::size_t size = per_xi[0].size();
  for (const auto& s : per_xi)
    if (s.size() != size) throw Error(ErrorKind::Shape, "per-xi fields differ in size");
  XiStats out;
  out.mean.resize(size);
  out.std.resize(size);
  const Weight weight{WeightKind::Uniform, grid.a, grid.b};
  std::vector<double> samples(L);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t l = 0; l < L; ++l) samples[l] = per_xi[l][i];
    const Moments mo = quadrature_moments(cweno7_build(samples, grid.a, grid.b, cfg), weight);
    out.mean[i] = mo.mean;
    out.std[i] = mo.std;
  }
  return out;
}

GridField xi_statistics(const std::vector<GridField>& per_xi, const std::vector<std::string>& names,
                        const CollocationGrid& grid, const CwenoConfig& cfg) {
  if (per_xi.empty()) throw Error(ErrorKind::TooFewSamples, "no realizations");
  GridField out(per_xi[0].level(), per_xi[0].n());
  for (const std::string& name : names) {
    std::vector<std::span<const double>> spans;
    for (const GridField& f : per_xi) {
      if (f.n() != out.n()) throw Error(ErrorKind::Shape, "per-xi fields live on different grids");
      spans.emplace_back(f.get(name));
    }
    XiStats s = xi_statistics(spans, grid, cfg);
    out.add(name + "_mean", std::move(s.mean));
    out.add(name + "_std", std::move(s.std));
  }
  return out;
}

std::vector<double> defect_ratio(std::span<const double> trR, std::span<const double> edef, double threshold) {
  if (trR.size() != edef.size()) throw Error(ErrorKind::Shape, "trR and Edef differ in size");
  std::vector<double> r(trR.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = trR[i] > threshold ? edef[i] / trR[i] : std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

GridField defect_fields(const GridField& ces, const GasParams& g, double threshold) {
  const auto& rho = ces.get("rho");
  const auto& mx = ces.get("m_x");
  const auto& my = ces.get("m_y");
  const auto& s = ces.get("S");
  const auto& xx = ces.get("mm_xx");
  const auto& xy = ces.get("mm_xy");
  const auto& yy = ces.get("mm_yy");
  const auto& p = ces.get("p");
  const auto& m2 = ces.get("m2_rho");
  const auto& re = ces.get("rho_e");
  const std::size_t size = rho.size();
  std::vector<double> rxx(size), rxy(size), ryy(size), tr(size), ed(size);
  for (std::size_t i = 0; i < size; ++i) {
    if (!(rho[i] > 0.0)) throw Error(ErrorKind::NonPhysicalState, "non-positive averaged density");
    const double inv = 1.0 / rho[i];
    const double pbar = pressure_from_entropy(rho[i], s[i], g);
    rxx[i] = xx[i] + p[i] - mx[i] * mx[i] * inv - pbar;
    rxy[i] = xy[i] - mx[i] * my[i] * inv;
    ryy[i] = yy[i] + p[i] - my[i] * my[i] * inv - pbar;
    tr[i] = rxx[i] + ryy[i];
    ed[i] = 0.5 * m2[i] + re[i] - 0.5 * (mx[i] * mx[i] + my[i] * my[i]) * inv - g.c_v() * pbar;
  }
  std::vector<double> ratio = defect_ratio(tr, ed, threshold);
  GridField out(ces.level(), ces.n());
  out.add("R_xx", std::move(rxx));
  out.add("R_xy", std::move(rxy));
  out.add("R_yy", std::move(ryy));
  out.add("trR", std::move(tr));
  out.add("Edef", std::move(ed));
  out.add("ratio", std::move(ratio));
  return out;
}

RatioBandReport ratio_band(std::span<const double> ratio, double lo, double hi, double slack) {
  RatioBandReport r;
  for (double v : ratio) {
    if (std::isnan(v)) continue;
    ++r.considered;
    if (v >= lo * (1.0 - slack) && v <= hi * (1.0 + slack)) ++r.inside;
  }
  return r;
}

std::vector<ResidualRow> defect_residuals(const std::vector<DefectMeans>& means, int n) {
  if (means.empty()) throw Error(ErrorKind::MissingLevel, "no defect means");
  const std::size_t size = static_cast<std::size_t>(n) * n;
  const DefectMeans* ref = &means[0];
  for (const DefectMeans& d : means) {
    if (d.trR.size() != size || d.edef.size() != size) throw Error(ErrorKind::Shape, "defect means on a different grid");
    if (d.M > ref->M) ref = &d;
  }
  std::vector<ResidualRow> rows;
  std::vector<double> diff(size);
  for (const DefectMeans& d : means) {
    ResidualRow row{d.M, 0.0, 0.0};
    for (std::size_t i = 0; i < size; ++i) diff[i] = d.trR[i] - ref->trR[i];
    row.eps_R = l1_norm(diff, n);
    for (std::size_t i = 0; i < size; ++i) diff[i] = d.edef[i] - ref->edef[i];
    row.eps_E = l1_norm(diff, n);
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const ResidualRow& a, const ResidualRow& b) { return a.M < b.M; });
  return rows;
}

double residual_slope(const std::vector<ResidualRow>& rows) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int k = 0;
  for (const ResidualRow& r : rows) {
    if (!(r.eps_R > 0.0 && r.eps_E > 0.0)) continue;
    const double x = std::log(r.eps_R), y = std::log(r.eps_E);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = k * sxx - sx * sx;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (k * sxy - sx * sy) / den;
}

std::vector<double> window_samples(std::span<const double> field, int n, const Window& w) {
  if (field.size() != static_cast<std::size_t>(n) * n) throw Error(ErrorKind::Shape, "field size is not N^2");
  constexpr double tol = 1e-12;
  std::vector<int> js, ks;
  for (int j = 0; j < n; ++j) {
    const double x = static_cast<double>(j) / n;
    if (x >= w.x0 - tol && x <= w.x1 + tol) js.push_back(j);
    if (x >= w.y0 - tol && x <= w.y1 + tol) ks.push_back(j);
  }
  std::vector<double> out;
  out.reserve(js.size() * ks.size());
  for (int k : ks)
    for (int j : js) out.push_back(field[static_cast<std::size_t>(k) * n + j]);
  return out;
}

double percentile(std::span<const double> samples, double q) {
  if (samples.empty()) throw Error(ErrorKind::EmptyWindow, "percentile of no samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double pos = q / 100.0 * static_cast<double>(s.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + (s[hi] - s[lo]) * frac;
}

int auto_bin_count(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n == 0) throw Error(ErrorKind::EmptyWindow, "no samples");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double range = *hi_it - *lo_it;
  if (range == 0.0) return 1;
  const int sturges = static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
  const double iqr = percentile(samples, 75.0) - percentile(samples, 25.0);
  if (!(iqr > 0.0)) return sturges;
  const double fd_width = 2.0 * iqr * std::pow(static_cast<double>(n), -1.0 / 3.0);
  const int fd = static_cast<int>(std::ceil(range / fd_width));
  return std::max(sturges, fd);
}

WindowHistogram histogram_from_samples(std::vector<double> samples) {
  if (samples.empty()) throw Error(ErrorKind::EmptyWindow, "no samples in window");
  WindowHistogram h;
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it, hi = *hi_it;
  const int bins = auto_bin_count(samples);
  if (hi == lo) {
    h.degenerate = true;
    lo -= 0.5;
    hi += 0.5;
  }
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
  h.edges.back() = hi;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : samples) {
    int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    b = std::clamp(b, 0, bins - 1);
    if (v < h.edges[b] && b > 0) --b;
    if (b + 1 < bins && v >= h.edges[b + 1]) ++b;
    ++h.counts[b];
  }
  const double n = static_cast<double>(samples.size());
  h.density.resize(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) h.density[b] = h.counts[b] / (n * (h.edges[b + 1] - h.edges[b]));
  h.samples = std::move(samples);
  return h;
}

WindowHistogram window_histogram(std::span<const double> field, int n, const Window& w) {
  std::vector<double> s = window_samples(field, n, w);
  if (static_cast<int>(s.size()) < kMinWindowNodes) {
    throw Error(ErrorKind::EmptyWindow, "window " + w.name + " holds " + std::to_string(s.size()) + " nodes (need " +
                                            std::to_string(kMinWindowNodes) + ")");
  }
  WindowHistogram h = histogram_from_samples(std::move(s));
  h.window = w;
  return h;
}

SampleStats histogram_stats(const WindowHistogram& h) {
  if (h.samples.empty()) throw Error(ErrorKind::EmptyWindow, "empty histogram");
  const double n = static_cast<double>(h.samples.size());
  SampleStats s;
  for (double v : h.samples) s.mean += v;
  s.mean /= n;
  double var = 0.0;
  for (double v : h.samples) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / n);
  return s;
}

}  // namespace khe
