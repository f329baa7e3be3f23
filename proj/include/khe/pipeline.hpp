#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "khe/campaign.hpp"
#include "khe/config.hpp"
#include "khe/diagnostics.hpp"
#include "khe/pod.hpp"

namespace khe {

enum class Stage { Cesaro, Stats, Defects, Hist, Pod };

std::string to_string(Stage s);
/// "all" or a comma-separated subset of cesaro, stats, defects, hist, pod.
std::vector<Stage> parse_stages(const std::string& text);

/// Quantities carried on the finest grid for statistics and histograms.
inline const std::vector<std::string> kStatNames{"rho", "m_x", "m_y", "E", "S", "trR", "Edef"};

/// Everything the analysis stages need from one sealed campaign, gathered in
/// a single pass over the run files. Index l is 0-based over collocation
/// nodes, index M-1 over Cesaro levels.
struct EnsembleData {
  double tau = 0.0;
  int levels = 0;
  int n_finest = 0;
  std::vector<int> cells;  // N_m, m = 1..levels
  CollocationGrid grid;
  std::string campaign_hash;

  std::vector<GridField> finest;                         // [l]: kStatNames at M = levels
  std::vector<std::vector<std::vector<double>>> trR;     // [M-1][l] on the finest grid
  std::vector<std::vector<std::vector<double>>> edef;    // [M-1][l]
  std::vector<std::vector<std::vector<double>>> raw_rho; // [m-1][l] on level m
  std::vector<std::vector<std::vector<double>>> ces_rho; // [M-1][l] on level M
  std::vector<int> kept_xi;                              // 1-based nodes with full Cesaro output
  std::vector<std::vector<GridField>> kept_cesaro;       // [i][M-1] for kept_xi[i]
};

/// Reads every run of a sealed manifest and computes the per-node Cesaro
/// prefixes and defects. Realizations are processed on `workers` threads;
/// results do not depend on the worker count.
EnsembleData collect_ensemble(const Manifest& manifest, const CwenoConfig& cweno, double ratio_threshold,
                              int workers, bool keep_cesaro);

/// Values on level `level` taken from the coincident nodes of a finer grid.
std::vector<double> restrict_to_level(const std::vector<double>& fine, int n_fine, int n_coarse);

struct PodTarget {
  std::string name;  // raw_rho, cesaro_rho, cesaro_E, cesaro_trR
  int level = 0;     // m for raw_rho, M otherwise
  SnapshotMatrix matrix;
};
std::vector<PodTarget> pod_targets(const EnsembleData& d);

struct TauSummary {
  double tau = 0.0;
  std::string campaign_hash;
  int levels = 0;
  int n_finest = 0;
  std::vector<ResidualRow> residuals;
  double residual_slope = 0.0;
  std::vector<RatioBandReport> band_mean;    // [M-1], ratio of xi-mean defects
  std::vector<RatioBandReport> band_pooled;  // [M-1], every realization's ratio
  std::vector<std::pair<std::string, double>> max_std;  // per kStatNames entry
  struct K {
    std::string target;
    int level = 0;
    int k = 0;
  };
  std::vector<K> pod_k;

  int k_of(const std::string& target, int level) const;
  nlohmann::json to_json() const;
};

inline constexpr double kBandLo = 0.5;
inline constexpr double kBandHi = 1.25;
inline constexpr double kBandSlack = 0.05;

struct AnalysisReport {
  std::string config_hash;
  std::vector<TauSummary> taus;
  std::vector<std::string> artifacts;  // relative to the analysis directory
  nlohmann::json to_json() const;
};

/// Runs the selected stages for every tau of the configuration, reading
/// <output>/tau_*/manifest.json and writing under <output>/analysis.
AnalysisReport analyze(const RunConfig& cfg, const std::vector<Stage>& stages);

/// Stage computations for one campaign; writes into `dir` and returns the summary.
TauSummary analyze_campaign(const EnsembleData& d, const RunConfig& cfg, const std::vector<Stage>& stages,
                            const std::filesystem::path& dir);

/// Writes index.json listing every file under `analysis_dir` with its SHA-256.
nlohmann::json write_index(const std::filesystem::path& analysis_dir, const std::string& config_hash);

}  // namespace khe
