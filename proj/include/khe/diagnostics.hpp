#pragma once

#include <span>
#include <string>
#include <vector>

#include "khe/cweno.hpp"
#include "khe/ensemble.hpp"
#include "khe/gas.hpp"
#include "khe/mesh.hpp"

namespace khe {

/// Names of the per-level nonlinear auxiliaries added by with_auxiliaries:
/// m_x^2/rho, m_x m_y/rho, m_y^2/rho, p, |m|^2/rho, rho e.
inline const std::vector<std::string> kAuxiliaryNames{"mm_xx", "mm_xy", "mm_yy", "p", "m2_rho", "rho_e"};
/// Components carried by a Cesaro average.
inline const std::vector<std::string> kCesaroNames{"rho", "m_x",   "m_y", "E",      "S",
                                                   "mm_xx", "mm_xy", "mm_yy", "p", "m2_rho", "rho_e"};

/// Copies rho, m_x, m_y, E, S and evaluates the auxiliaries pointwise.
GridField with_auxiliaries(const GridField& solution, const GasParams& g);

/// Cesaro average of one realization over levels 1..M (`per_level[m-1]` on
/// level m). Auxiliaries are evaluated on each level's own grid, every
/// component is refined to `target_level` (>= M), then averaged with 1/M.
GridField cesaro_average(const std::vector<GridField>& per_level, int target_level, const GasParams& g,
                         const CwenoConfig& cfg = {});

/// All Cesaro averages over levels 1..M' for M' = 1..M, on `target_level`;
/// element M'-1 equals cesaro_average of the first M' levels.
std::vector<GridField> cesaro_prefixes(const std::vector<GridField>& per_level, int target_level,
                                       const GasParams& g, const CwenoConfig& cfg = {});

struct XiStats {
  std::vector<double> mean;
  std::vector<double> std;
};

/// Per-node mean and standard deviation over xi: a CWENO7 interpolant of the
/// L samples at each node integrated against the uniform density on [a, b].
XiStats xi_statistics(const std::vector<std::span<const double>>& per_xi, const CollocationGrid& grid,
                      const CwenoConfig& cfg = {});
/// Component-wise version; output components are "<name>_mean" and "<name>_std".
GridField xi_statistics(const std::vector<GridField>& per_xi, const std::vector<std::string>& names,
                        const CollocationGrid& grid, const CwenoConfig& cfg = {});

inline constexpr double kRatioThreshold = 1e-10;

/// Reynolds stress R (R_xx, R_xy, R_yy), trR, energy defect Edef and the
/// ratio Edef / trR, which is NaN where trR <= threshold.
GridField defect_fields(const GridField& cesaro, const GasParams& g, double threshold = kRatioThreshold);

/// Ratio of xi-mean defects Edef_mean / trR_mean, NaN where trR_mean <= threshold.
std::vector<double> defect_ratio(std::span<const double> trR, std::span<const double> edef,
                                 double threshold = kRatioThreshold);

struct RatioBandReport {
  long considered = 0;  // nodes with trR above the threshold
  long inside = 0;      // ratio within [lo (1 - slack), hi (1 + slack)]
  double fraction() const { return considered ? static_cast<double>(inside) / considered : 1.0; }
};
RatioBandReport ratio_band(std::span<const double> ratio, double lo, double hi, double slack);

struct DefectMeans {
  int M = 0;
  std::vector<double> trR;   // xi-mean of trR for Cesaro level M, on the reference grid
  std::vector<double> edef;  // xi-mean of Edef
};

struct ResidualRow {
  int M = 0;
  double eps_R = 0.0;
  double eps_E = 0.0;
};

/// eps(M) = cell-weighted L1 distance to the entry with the largest M.
std::vector<ResidualRow> defect_residuals(const std::vector<DefectMeans>& means, int n);

/// Least-squares slope of log eps_E against log eps_R over rows with both > 0.
double residual_slope(const std::vector<ResidualRow>& rows);

struct Window {
  std::string name;
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
};

struct WindowHistogram {
  Window window;
  std::vector<double> samples;  // raw node values in the window
  std::vector<double> edges;    // bins + 1 entries
  std::vector<long> counts;
  std::vector<double> density;  // integrates to 1 over [edges.front(), edges.back()]
  bool degenerate = false;      // all samples equal: one unit-width bin
};

inline constexpr int kMinWindowNodes = 16;

/// Node values with x0 <= j/N <= x1 and y0 <= k/N <= y1 (row-major field).
std::vector<double> window_samples(std::span<const double> field, int n, const Window& w);
/// max(Sturges, Freedman-Diaconis) bin count; Sturges alone when IQR = 0.
int auto_bin_count(std::span<const double> samples);
/// Linear-interpolation percentile (q in [0, 100]) of unsorted data.
double percentile(std::span<const double> samples, double q);
WindowHistogram histogram_from_samples(std::vector<double> samples);
/// Throws EmptyWindow when fewer than kMinWindowNodes nodes fall in the window.
WindowHistogram window_histogram(std::span<const double> field, int n, const Window& w);

struct SampleStats {
  double mean = 0.0;
  double std = 0.0;  // population
};
SampleStats histogram_stats(const WindowHistogram& h);

}  // namespace khe
