#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "khe/ensemble.hpp"
#include "khe/solver.hpp"

namespace khe {

enum class RunStatus { Pending, Ok, Blowup, Failed };

std::string to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);

/// One (l, m) solver run. l is 1-based over collocation nodes, m over levels.
struct RunRecord {
  int l = 0;
  int m = 0;
  double xi = 0.0;
  RunStatus status = RunStatus::Pending;
  std::string hash;  // SHA-256 of the canonical per-run config
  std::string path;  // GridField at t_end
  std::vector<std::pair<double, std::string>> snapshot_paths;
  long steps = 0;
  double wall_seconds = 0.0;
  double min_density = 0.0;
  double min_pressure = 0.0;
  long fallbacks = 0;
  bool cached = false;
  std::string message;
  std::vector<std::pair<double, double>> entropy_log;
};

/// Everything needed to reproduce one tau campaign.
struct CampaignSpec {
  int m0 = 2;
  int levels = 4;
  CollocationGrid grid;
  KhConfig kh;
  double gamma = 1.4;
  SolverConfig solver;
  PerturbationCoeffs coeffs;
  std::string coeff_sha256;
  std::filesystem::path dir;        // manifest.json and campaign.log
  std::filesystem::path cache_dir;  // run outputs keyed by run hash
  int workers = 1;
  bool use_cache = true;
  /// Called (serialized) with one line per finished run.
  std::function<void(const std::string&)> log;

  void validate() const;
  /// Canonical physics/numerics description; excludes paths and worker count.
  nlohmann::json canonical() const;
  std::string config_hash() const;
  std::string run_hash(int l, int m) const;
};

struct Manifest {
  static constexpr const char* kSchema = "khe-manifest/1";

  nlohmann::json config;  // CampaignSpec::canonical()
  std::string config_hash;
  int m0 = 0;
  int levels = 0;
  CollocationGrid grid;
  double tau = 0.0;
  double gamma = 1.4;
  bool sealed = false;
  std::vector<RunRecord> runs;  // ordered by (m, l)

  const RunRecord& record(int l, int m) const;
  RunRecord& record(int l, int m);
  MeshHierarchy hierarchy() const { return MeshHierarchy(m0, levels); }
  /// Throws PartialCampaign naming every run that is not Ok.
  void require_sealed() const;
  GridField load_field(int l, int m) const;

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);
};

void save_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest load_manifest(const std::filesystem::path& path);

/// Runs every (l, m) pair not already cached, on `workers` threads. Each run
/// is single-threaded, so results do not depend on the worker count. The
/// manifest is rewritten after every run. Throws PartialCampaign (after
/// saving) if any run failed.
Manifest run_campaign(const CampaignSpec& spec);

}  // namespace khe
