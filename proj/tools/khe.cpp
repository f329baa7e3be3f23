#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "khe/config.hpp"
#include "khe/digest.hpp"
#include "khe/error.hpp"
#include "khe/pipeline.hpp"
#include "khe/text.hpp"
#include "khe/verify.hpp"

namespace fs = std::filesystem;
using namespace khe;

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kPartial = 3, kVerify = 4 };

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::vector<double> taus;
  int L = 0, M = 0, m0 = -1, workers = -1;
  double T = -1.0;
  long long seed = -1;
  std::string cache_dir, output;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "INI configuration file");
  cmd->add_option("--set", c.sets, "override one option, section.key=value (repeatable)");
  cmd->add_option("--tau", c.taus, "tau values (space or comma separated)")->delimiter(',');
  cmd->add_option("--L", c.L, "collocation node count");
  cmd->add_option("--M", c.M, "number of mesh levels");
  cmd->add_option("--m0", c.m0, "base refinement");
  cmd->add_option("--T", c.T, "final time");
  cmd->add_option("--seed", c.seed, "perturbation seed");
  cmd->add_option("--cache-dir", c.cache_dir, "run cache directory (overrides KHE_CACHE_DIR)");
  cmd->add_option("--workers", c.workers, "worker threads (0: all cores)");
  cmd->add_option("--output", c.output, "output directory");
}

// Precedence: flags > KHE_CACHE_DIR > config file > defaults.
RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (const char* env = std::getenv("KHE_CACHE_DIR"); env && *env) cfg.cache_dir = env;
  for (const std::string& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Config, "--set expects section.key=value, got '" + kv + "'");
    set_option(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!c.taus.empty()) cfg.taus = c.taus;
  if (c.L > 0) cfg.xi.count = c.L;
  if (c.M > 0) cfg.levels = c.M;
  if (c.m0 >= 0) cfg.m0 = c.m0;
  if (c.T >= 0.0) cfg.t_end = c.T;
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  if (!c.cache_dir.empty()) cfg.cache_dir = c.cache_dir;
  if (c.workers >= 0) cfg.workers = c.workers;
  if (!c.output.empty()) cfg.output_dir = c.output;
  cfg.validate();
  return cfg;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config:
    case ErrorKind::InterfaceCross:
    case ErrorKind::TooFewSamples:
    case ErrorKind::EmptyWindow:
      return kConfig;
    case ErrorKind::PartialCampaign:
    case ErrorKind::MissingLevel:
      return kPartial;
    default:
      return kOther;
  }
}

void log_line(const std::string& s) { std::cerr << s << '\n'; }

int cmd_coeffs(const Common& c, bool force) {
  RunConfig cfg = resolve(c);
  const PerturbationCoeffs coeffs = generate_coeffs(cfg.seed);
  const fs::path path = cfg.coeff_file;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  try {
    write_coeffs(path, coeffs, force);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io && fs::exists(path)) {
      throw Error(ErrorKind::Config, path.string() + " exists; pass --force to overwrite");
    }
    throw;
  }
  std::cout << path.string() << " seed=" << cfg.seed << " sha256=" << sha256_file(path) << '\n';
  return kOk;
}

std::pair<PerturbationCoeffs, std::string> load_coefficients(const RunConfig& cfg) {
  if (!fs::exists(cfg.coeff_file)) {
    throw Error(ErrorKind::Config, "coefficient file " + cfg.coeff_file + " is missing; run `khe coeffs` first");
  }
  return {read_coeffs(cfg.coeff_file), sha256_file(cfg.coeff_file)};
}

int cmd_run(const Common& c) {
  const RunConfig cfg = resolve(c);
  const auto [coeffs, sha] = load_coefficients(cfg);
  fs::create_directories(cfg.output_dir);
  std::ofstream(fs::path(cfg.output_dir) / "config.ini") << format_config(cfg);
  int status = kOk;
  for (double tau : cfg.taus) {
    CampaignSpec spec = campaign_spec(cfg, tau, coeffs, sha);
    spec.log = log_line;
    try {
      const Manifest m = run_campaign(spec);
      long cached = 0;
      for (const RunRecord& r : m.runs) cached += r.cached;
      std::cout << tau_label(tau) << ": " << m.runs.size() << " runs sealed (" << cached << " from cache), manifest "
                << (spec.dir / "manifest.json").string() << '\n';
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PartialCampaign) throw;
      std::cerr << tau_label(tau) << ": " << e.what() << '\n';
      status = kPartial;
    }
  }
  return status;
}

int cmd_analyze(const Common& c, const std::string& stages) {
  const RunConfig cfg = resolve(c);
  const AnalysisReport rep = analyze(cfg, parse_stages(stages));
  std::cout << rep.artifacts.size() << " artifacts indexed in " << (cfg.analysis_dir() / "index.json").string()
            << " (config " << rep.config_hash.substr(0, 12) << ")\n";
  return kOk;
}

int cmd_verify(const Common& c, const std::vector<std::string>& only, const std::string& work_dir) {
  VerifyOptions opts;
  const RunConfig cfg = resolve(c);
  opts.work_dir = work_dir.empty() ? fs::path(cfg.output_dir) / "verify" : fs::path(work_dir);
  opts.workers = cfg.resolved_workers();
  opts.log = [](const std::string& s) { std::cerr << "  " << s << '\n'; };
  Verifier v(opts);
  std::vector<CheckResult> results;
  for (const std::string& id : only.empty() ? acceptance_ids() : only) {
    results.push_back(v.run(id));
    std::cout << format_result(results.back()) << std::endl;
  }
  const nlohmann::json summary = results_json(results);
  std::ofstream(opts.work_dir / "verify.json") << summary.dump(1) << '\n';
  return summary["pass"].get<bool>() ? kOk : kVerify;
}

std::string cell(const nlohmann::json& v) {
  if (v.is_number_float()) return fmt_double(v.get<double>());
  if (v.is_null()) return "nan";
  return v.dump();
}

int cmd_report(const Common& c) {
  const RunConfig cfg = resolve(c);
  const fs::path path = cfg.analysis_dir() / "summary.json";
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::PartialCampaign, "no analysis summary at " + path.string() + "; run `khe analyze`");
  const nlohmann::json s = nlohmann::json::parse(in);
  std::ostream& os = std::cout;
  os << "config " << s["config_hash"].get<std::string>() << "\n";
  for (const auto& t : s["taus"]) {
    os << "\ntau = " << cell(t["tau"]) << "  (levels " << t["levels"] << ", finest N " << t["n_finest"] << ")\n";
    if (!t["residuals"].empty()) {
      os << "  defect residuals   M  eps_R  eps_E\n";
      for (const auto& r : t["residuals"]) os << "    " << r["M"] << "  " << cell(r["eps_R"]) << "  " << cell(r["eps_E"]) << "\n";
      os << "  log-log slope eps_E vs eps_R: " << cell(t["residual_slope"]) << "\n";
    }
    for (const auto& b : t["band_xi_mean"]) {
      os << "  ratio band M=" << b["M"] << ": " << b["inside"] << "/" << b["considered"] << " = " << cell(b["fraction"])
         << "\n";
    }
    for (const auto& [name, v] : t["max_std"].items()) os << "  max xi-std " << name << ": " << cell(v) << "\n";
  }
  bool any_pod = false;
  for (const auto& t : s["taus"]) any_pod = any_pod || !t["pod_k"].empty();
  if (any_pod) {
    for (const std::string target : {"raw_rho", "cesaro_rho", "cesaro_E", "cesaro_trR"}) {
      os << "\nK_" << fmt_double(cfg.pod_threshold) << " " << target << "\n  " << (target == "raw_rho" ? "m" : "M");
      for (const auto& t : s["taus"]) os << "  tau=" << cell(t["tau"]);
      os << "\n";
      for (int level = target == "raw_rho" ? 1 : 2; level <= cfg.levels; ++level) {
        os << "  " << level;
        for (const auto& t : s["taus"]) {
          int k = -1;
          for (const auto& e : t["pod_k"])
            if (e["target"] == target && e["level"] == level) k = e["K"];
          os << "  " << k;
        }
        os << "\n";
      }
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-collocation Kelvin-Helmholtz pipeline"};
  app.require_subcommand(1);
  Common common;

  auto* coeffs = app.add_subcommand("coeffs", "write the perturbation coefficient file");
  bool force = false;
  add_common(coeffs, common);
  coeffs->add_flag("--force", force, "overwrite an existing file");

  auto* run = app.add_subcommand("run", "run (or resume) the campaign for every tau");
  add_common(run, common);

  auto* an = app.add_subcommand("analyze", "run analysis stages on sealed campaigns");
  std::string stages = "all";
  add_common(an, common);
  an->add_option("--stages", stages, "all, or a comma list of cesaro,stats,defects,hist,pod");

  auto* ver = app.add_subcommand("verify", "run the acceptance checks A1..A9");
  std::vector<std::string> only;
  std::string work_dir;
  add_common(ver, common);
  ver->add_option("--only", only, "check ids to run");
  ver->add_option("--work-dir", work_dir, "scratch directory (default <output>/verify)");

  auto* rep = app.add_subcommand("report", "print the analysis summary");
  add_common(rep, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (*coeffs) return cmd_coeffs(common, force);
    if (*run) return cmd_run(common);
    if (*an) return cmd_analyze(common, stages);
    if (*ver) return cmd_verify(common, only, work_dir);
    if (*rep) return cmd_report(common);
  } catch (const Error& e) {
    std::cerr << "khe: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "khe: " << e.what() << '\n';
    return kOther;
  }
  return kOk;
}
