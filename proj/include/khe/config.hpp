#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "khe/campaign.hpp"
#include "khe/cweno.hpp"
#include "khe/diagnostics.hpp"

namespace khe {

/// Full pipeline configuration. Defaults are the full-scale setup; desk
/// runs override m0, levels, xi count and t_end.
struct RunConfig {
  int m0 = 4;
  int levels = 5;
  CollocationGrid xi;
  std::vector<double> taus{1.1};
  double gamma = 1.4;
  double cfl = 0.45;
  double t_end = 2.0;
  ReconstructionVars vars = ReconstructionVars::Characteristic;
  std::vector<double> snapshot_times;
  std::uint64_t seed = 20240611;
  std::string coeff_file = "data/kh_coeffs.txt";
  std::string output_dir = "khe_out";
  std::string cache_dir;  // empty: KHE_CACHE_DIR, else <output_dir>/cache
  bool use_cache = true;
  int workers = 0;  // 0: hardware concurrency
  CwenoMode cweno_mode = CwenoMode::Nonlinear;
  std::vector<Window> windows{{"D1", 0.46, 0.54, 0.71, 0.79}, {"D2", 0.76, 0.84, 0.71, 0.79}};
  double pod_threshold = 0.95;
  double ratio_threshold = kRatioThreshold;

  /// Checks every module precondition; throws Config (or InterfaceCross).
  void validate() const;
  /// Settings that determine outputs; paths, caching and workers excluded.
  nlohmann::json canonical() const;
  std::string hash() const;

  int resolved_workers() const;
  std::filesystem::path resolved_cache_dir() const;
  std::filesystem::path campaign_dir(double tau) const;
  std::filesystem::path analysis_dir() const { return std::filesystem::path(output_dir) / "analysis"; }
  CwenoConfig cweno() const;
  SolverConfig solver() const;
};

/// Sets one option by "section.key" name from its text value (the same
/// names as the config file). Throws Config for unknown keys or bad values.
void set_option(RunConfig& cfg, const std::string& key, const std::string& value);

/// INI-style text: [section] headers, key = value lines, ';' or '#' comments.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Text that parse_config maps back to the same configuration.
std::string format_config(const RunConfig& cfg);

/// Short stable label for a tau value, e.g. "tau_1.1".
std::string tau_label(double tau);

/// Campaign for one tau, with the coefficients already loaded.
CampaignSpec campaign_spec(const RunConfig& cfg, double tau, const PerturbationCoeffs& coeffs,
                           const std::string& coeff_sha256);

}  // namespace khe
