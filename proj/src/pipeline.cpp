#include "khe/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "khe/digest.hpp"
#include "khe/error.hpp"
#include "khe/text.hpp"

namespace khe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kHistQuantities{"rho_mean", "S_mean", "trR_mean"};
const std::vector<std::string> kPodTargets{"raw_rho", "cesaro_rho", "cesaro_E", "cesaro_trR"};
constexpr int kExportedModes = 3;

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : path_(path), os_(path, std::ios::trunc) {
    if (!os_) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    row(header);
  }
  void row(const std::vector<std::string>& cells) { os_ << join(cells, ",") << '\n'; }

 private:
  fs::path path_;
  std::ofstream os_;
};

std::string num(double v) { return fmt_double(v); }
std::string num(long v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }

std::vector<std::span<const double>> spans_of(const std::vector<std::vector<double>>& v) {
  return {v.begin(), v.end()};
}

void append_body(const fs::path& from, std::ofstream& to, bool with_header) {
  std::ifstream in(from);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first && !with_header) {
      first = false;
      continue;
    }
    first = false;
    to << line << '\n';
  }
}

bool has(const std::vector<Stage>& stages, Stage s) { return std::find(stages.begin(), stages.end(), s) != stages.end(); }

template <class F>
void parallel_for(int count, int workers, F&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min(workers, count));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Cesaro: return "cesaro";
    case Stage::Stats: return "stats";
    case Stage::Defects: return "defects";
    case Stage::Hist: return "hist";
    case Stage::Pod: return "pod";
  }
  return "?";
}

std::vector<Stage> parse_stages(const std::string& text) {
  const std::vector<Stage> all{Stage::Cesaro, Stage::Stats, Stage::Defects, Stage::Hist, Stage::Pod};
  if (text.empty() || text == "all") return all;
  std::vector<Stage> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    auto it = std::find_if(all.begin(), all.end(), [&](Stage s) { return to_string(s) == cur; });
    if (it == all.end()) throw Error(ErrorKind::Config, "unknown analysis stage '" + cur + "'");
    if (!has(out, *it)) out.push_back(*it);
    cur.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush();
    } else if (c != ' ') {
      cur += c;
    }
  }
  flush();
  if (out.empty()) throw Error(ErrorKind::Config, "no analysis stage selected");
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> restrict_to_level(const std::vector<double>& fine, int n_fine, int n_coarse) {
  if (n_coarse < 1 || n_fine % n_coarse != 0) throw Error(ErrorKind::HierarchyMismatch, "grids are not nested");
  if (fine.size() != static_cast<std::size_t>(n_fine) * n_fine) throw Error(ErrorKind::Shape, "field size is not N^2");
  const int s = n_fine / n_coarse;
  std::vector<double> out(static_cast<std::size_t>(n_coarse) * n_coarse);
  for (int k = 0; k < n_coarse; ++k)
    for (int j = 0; j < n_coarse; ++j)
      out[static_cast<std::size_t>(k) * n_coarse + j] = fine[static_cast<std::size_t>(k * s) * n_fine + j * s];
  return out;
}

EnsembleData collect_ensemble(const Manifest& manifest, const CwenoConfig& cweno, double ratio_threshold,
                              int workers, bool keep_cesaro) {
  manifest.require_sealed();
  const MeshHierarchy h = manifest.hierarchy();
  const GasParams g(manifest.gamma);
  const int L = manifest.grid.count;
  const int levels = manifest.levels;

  EnsembleData d;
  d.tau = manifest.tau;
  d.levels = levels;
  d.cells = h.cell_counts();
  d.n_finest = d.cells.back();
  d.grid = manifest.grid;
  d.campaign_hash = manifest.config_hash;
  const auto L_size = static_cast<std::size_t>(L);
  const auto M_size = static_cast<std::size_t>(levels);
  d.finest.resize(L_size);
  d.trR.assign(M_size, std::vector<std::vector<double>>(L_size));
  d.edef.assign(M_size, std::vector<std::vector<double>>(L_size));
  d.raw_rho.assign(M_size, std::vector<std::vector<double>>(L_size));
  d.ces_rho.assign(M_size, std::vector<std::vector<double>>(L_size));
  if (keep_cesaro) {
    std::set<int> kept{1, (L + 1) / 2, L};
    d.kept_xi.assign(kept.begin(), kept.end());
    d.kept_cesaro.resize(d.kept_xi.size());
  }

  parallel_for(L, workers, [&](int li) {
    const auto l = static_cast<std::size_t>(li);
    std::vector<GridField> per_level;
    for (int m = 1; m <= levels; ++m) {
      per_level.push_back(manifest.load_field(li + 1, m));
      d.raw_rho[static_cast<std::size_t>(m - 1)][l] = per_level.back().get("rho");
    }
    std::vector<GridField> prefixes = cesaro_prefixes(per_level, levels, g, cweno);
    per_level.clear();
    for (int M = 1; M <= levels; ++M) {
      const auto mi = static_cast<std::size_t>(M - 1);
      const GridField def = defect_fields(prefixes[mi], g, ratio_threshold);
      d.trR[mi][l] = def.get("trR");
      d.edef[mi][l] = def.get("Edef");
      d.ces_rho[mi][l] = restrict_to_level(prefixes[mi].get("rho"), d.n_finest, d.cells[mi]);
    }
    GridField fin(levels, d.n_finest);
    for (const char* name : {"rho", "m_x", "m_y", "E", "S"}) fin.add(name, prefixes.back().get(name));
    fin.add("trR", d.trR[M_size - 1][l]);
    fin.add("Edef", d.edef[M_size - 1][l]);
    d.finest[l] = std::move(fin);
    const auto it = std::find(d.kept_xi.begin(), d.kept_xi.end(), li + 1);
    if (it != d.kept_xi.end()) d.kept_cesaro[static_cast<std::size_t>(it - d.kept_xi.begin())] = std::move(prefixes);
  });
  return d;
}

std::vector<PodTarget> pod_targets(const EnsembleData& d) {
  std::vector<PodTarget> out;
  for (int m = 1; m <= d.levels; ++m) {
    const auto mi = static_cast<std::size_t>(m - 1);
    out.push_back({"raw_rho", m, center_snapshots(spans_of(d.raw_rho[mi]), "raw_rho m=" + std::to_string(m))});
  }
  for (int M = 2; M <= d.levels; ++M) {
    const auto mi = static_cast<std::size_t>(M - 1);
    const int n = d.cells[mi];
    out.push_back({"cesaro_rho", M, center_snapshots(spans_of(d.ces_rho[mi]), "cesaro_rho M=" + std::to_string(M))});
    std::vector<std::vector<double>> e, t;
    for (std::size_t l = 0; l < d.edef[mi].size(); ++l) {
      e.push_back(restrict_to_level(d.edef[mi][l], d.n_finest, n));
      t.push_back(restrict_to_level(d.trR[mi][l], d.n_finest, n));
    }
    out.push_back({"cesaro_E", M, center_snapshots(spans_of(e), "cesaro_E M=" + std::to_string(M))});
    out.push_back({"cesaro_trR", M, center_snapshots(spans_of(t), "cesaro_trR M=" + std::to_string(M))});
  }
  return out;
}

int TauSummary::k_of(const std::string& target, int level) const {
  for (const K& k : pod_k)
    if (k.target == target && k.level == level) return k.k;
  return -1;
}

json TauSummary::to_json() const {
  json res = json::array();
  for (const ResidualRow& r : residuals) res.push_back({{"M", r.M}, {"eps_R", r.eps_R}, {"eps_E", r.eps_E}});
  auto bands = [](const std::vector<RatioBandReport>& v) {
    json a = json::array();
    for (std::size_t i = 0; i < v.size(); ++i) {
      a.push_back({{"M", i + 1}, {"considered", v[i].considered}, {"inside", v[i].inside}, {"fraction", v[i].fraction()}});
    }
    return a;
  };
  json stds = json::object();
  for (const auto& [name, v] : max_std) stds[name] = v;
  json ks = json::array();
  for (const K& k : pod_k) ks.push_back({{"target", k.target}, {"level", k.level}, {"K", k.k}});
  return {{"tau", tau},
          {"campaign_hash", campaign_hash},
          {"levels", levels},
          {"n_finest", n_finest},
          {"residuals", res},
          {"residual_slope", residual_slope},
          {"band_xi_mean", bands(band_mean)},
          {"band_pooled", bands(band_pooled)},
          {"max_std", stds},
          {"pod_k", ks}};
}

json AnalysisReport::to_json() const {
  json t = json::array();
  for (const TauSummary& s : taus) t.push_back(s.to_json());
  return {{"config_hash", config_hash}, {"taus", t}};
}

TauSummary analyze_campaign(const EnsembleData& d, const RunConfig& cfg, const std::vector<Stage>& stages,
                            const fs::path& dir) {
  fs::create_directories(dir);
  const CwenoConfig cweno = cfg.cweno();
  const std::string tau = num(d.tau);
  const int nf = d.n_finest;
  TauSummary s;
  s.tau = d.tau;
  s.campaign_hash = d.campaign_hash;
  s.levels = d.levels;
  s.n_finest = nf;

  if (has(stages, Stage::Cesaro)) {
    const fs::path cdir = dir / "cesaro";
    fs::create_directories(cdir);
    for (std::size_t i = 0; i < d.kept_xi.size(); ++i) {
      for (int M = 1; M <= d.levels; ++M) {
        const GridField& c = d.kept_cesaro[i][static_cast<std::size_t>(M - 1)];
        const std::string stem = "xi" + std::to_string(d.kept_xi[i]) + "_M" + std::to_string(M);
        write_grid_field(c, cdir / (stem + ".khf"));
        write_grid_csv(c, "rho", cdir / (stem + "_rho.csv"));
      }
    }
  }

  GridField stats;
  const bool need_stats = has(stages, Stage::Stats) || has(stages, Stage::Hist);
  if (need_stats) stats = xi_statistics(d.finest, kStatNames, d.grid, cweno);

  if (has(stages, Stage::Stats)) {
    write_grid_field(stats, dir / "stats.khf");
    Csv sum(dir / "stats_summary.csv", {"quantity", "tau", "mean_min", "mean_max", "mean_l1", "std_max", "std_l1"});
    for (const std::string& name : kStatNames) {
      const auto& mean = stats.get(name + "_mean");
      const auto& sd = stats.get(name + "_std");
      const double smax = *std::max_element(sd.begin(), sd.end());
      sum.row({name, tau, num(*std::min_element(mean.begin(), mean.end())),
               num(*std::max_element(mean.begin(), mean.end())), num(l1_norm(mean, nf)), num(smax), num(l1_norm(sd, nf))});
      s.max_std.emplace_back(name, smax);
      write_grid_csv(stats, name + "_mean", dir / ("stats_" + name + "_mean.csv"));
      write_grid_csv(stats, name + "_std", dir / ("stats_" + name + "_std.csv"));
    }
  }

  if (has(stages, Stage::Defects)) {
    std::vector<DefectMeans> means;
    s.band_mean.resize(static_cast<std::size_t>(d.levels));
    s.band_pooled.resize(static_cast<std::size_t>(d.levels));
    for (int M = 1; M <= d.levels; ++M) {
      const auto mi = static_cast<std::size_t>(M - 1);
      DefectMeans dm;
      dm.M = M;
      dm.trR = xi_statistics(spans_of(d.trR[mi]), d.grid, cweno).mean;
      dm.edef = xi_statistics(spans_of(d.edef[mi]), d.grid, cweno).mean;
      const std::vector<double> ratio = defect_ratio(dm.trR, dm.edef, cfg.ratio_threshold);
      s.band_mean[mi] = ratio_band(ratio, kBandLo, kBandHi, kBandSlack);
      for (std::size_t l = 0; l < d.trR[mi].size(); ++l) {
        const RatioBandReport r =
            ratio_band(defect_ratio(d.trR[mi][l], d.edef[mi][l], cfg.ratio_threshold), kBandLo, kBandHi, kBandSlack);
        s.band_pooled[mi].considered += r.considered;
        s.band_pooled[mi].inside += r.inside;
      }
      if (M == d.levels) {
        GridField f(d.levels, nf);
        f.add("trR_mean", dm.trR);
        f.add("Edef_mean", dm.edef);
        f.add("ratio", ratio);
        write_grid_field(f, dir / "defects.khf");
        write_grid_csv(f, "trR_mean", dir / "defect_trR_mean.csv");
        write_grid_csv(f, "Edef_mean", dir / "defect_Edef_mean.csv");
        write_grid_csv(f, "ratio", dir / "defect_ratio.csv");
      }
      if (M >= 2) means.push_back(std::move(dm));
    }
    if (!means.empty()) s.residuals = defect_residuals(means, nf);
    s.residual_slope = residual_slope(s.residuals);
    Csv res(dir / "residuals.csv", {"M", "tau", "eps_R", "eps_E"});
    for (const ResidualRow& r : s.residuals) res.row({num(r.M), tau, num(r.eps_R), num(r.eps_E)});
    Csv fit(dir / "residual_fit.csv", {"tau", "slope", "points"});
    long points = std::count_if(s.residuals.begin(), s.residuals.end(),
                                [](const ResidualRow& r) { return r.eps_R > 0.0 && r.eps_E > 0.0; });
    fit.row({tau, num(s.residual_slope), num(points)});
    Csv band(dir / "ratio_band.csv", {"M", "tau", "scope", "considered", "inside", "fraction"});
    for (int M = 1; M <= d.levels; ++M) {
      const auto mi = static_cast<std::size_t>(M - 1);
      for (const auto& [scope, r] : {std::pair{"xi_mean", s.band_mean[mi]}, std::pair{"pooled", s.band_pooled[mi]}}) {
        band.row({num(M), tau, scope, num(r.considered), num(r.inside), num(r.fraction())});
      }
    }
  }

  if (has(stages, Stage::Hist)) {
    Csv hs(dir / "hist_stats.csv", {"window", "quantity", "tau", "mean", "std"});
    for (const Window& w : cfg.windows) {
      for (const std::string& q : kHistQuantities) {
        const WindowHistogram h = window_histogram(stats.get(q), nf, w);
        Csv out(dir / ("hist_" + w.name + "_" + q + ".csv"), {"bin_left", "bin_right", "count", "density"});
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
          out.row({num(h.edges[b]), num(h.edges[b + 1]), num(h.counts[b]), num(h.density[b])});
        }
        const SampleStats st = histogram_stats(h);
        hs.row({w.name, q, tau, num(st.mean), num(st.std)});
      }
    }
  }

  if (has(stages, Stage::Pod)) {
    Csv sv(dir / "pod_singular_values.csv", {"target", "level", "tau", "j", "s", "energy", "cef"});
    Csv kt(dir / "pod_K.csv", {"target", "level", "tau", "K"});
    for (const PodTarget& t : pod_targets(d)) {
      const PodResult r = pod_svd(t.matrix, SvdRoute::Auto, true);
      const int k = k_at(r, cfg.pod_threshold);
      s.pod_k.push_back({t.name, t.level, k});
      kt.row({t.name, num(t.level), tau, num(k)});
      for (std::size_t j = 0; j < r.s.size(); ++j) {
        sv.row({t.name, num(t.level), tau, num(static_cast<int>(j + 1)), num(r.s[j]), num(r.s[j] * r.s[j]),
                num(cef(r, static_cast<int>(j + 1)))});
      }
      const int n = d.cells[static_cast<std::size_t>(t.level - 1)];
      const int modes = std::min<int>(kExportedModes, static_cast<int>(r.modes.cols()));
      if (k > 0 && modes > 0) {
        GridField f(t.level, n);
        for (int j = 0; j < modes; ++j) {
          const auto col = r.modes.col(j);
          f.add("mode_" + std::to_string(j + 1), std::vector<double>(col.data(), col.data() + col.size()));
        }
        write_grid_field(f, dir / ("pod_modes_" + t.name + "_" + std::to_string(t.level) + ".khf"));
      }
    }
  }
  return s;
}

json write_index(const fs::path& analysis_dir, const std::string& config_hash) {
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(analysis_dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), analysis_dir).generic_string();
    if (rel == "index.json") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  json arts = json::array();
  for (const std::string& f : files) {
    const fs::path p = analysis_dir / f;
    arts.push_back({{"path", f}, {"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}});
  }
  json index{{"schema", "khe-analysis-index/1"}, {"config_hash", config_hash}, {"artifacts", arts}};
  const fs::path tmp = analysis_dir / "index.json.tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    os << index.dump(1) << '\n';
  }
  fs::rename(tmp, analysis_dir / "index.json");
  return index;
}

AnalysisReport analyze(const RunConfig& cfg, const std::vector<Stage>& stages) {
  cfg.validate();
  const fs::path root = cfg.analysis_dir();
  fs::create_directories(root);
  AnalysisReport report;
  report.config_hash = cfg.hash();
  for (double tau : cfg.taus) {
    const fs::path mpath = cfg.campaign_dir(tau) / "manifest.json";
    if (!fs::exists(mpath)) throw Error(ErrorKind::PartialCampaign, "no manifest at " + mpath.string());
    const Manifest m = load_manifest(mpath);
    if (m.m0 != cfg.m0 || m.levels != cfg.levels || m.grid.count != cfg.xi.count || m.grid.a != cfg.xi.a ||
        m.grid.b != cfg.xi.b || m.tau != tau || m.gamma != cfg.gamma) {
      throw Error(ErrorKind::Config, "manifest " + mpath.string() + " was produced by a different configuration");
    }
    const EnsembleData d =
        collect_ensemble(m, cfg.cweno(), cfg.ratio_threshold, cfg.resolved_workers(), has(stages, Stage::Cesaro));
    report.taus.push_back(analyze_campaign(d, cfg, stages, root / tau_label(tau)));
  }

  auto combine = [&](const std::string& name) {
    std::ofstream os(root / name, std::ios::trunc);
    bool first = true;
    for (double tau : cfg.taus) {
      const fs::path p = root / tau_label(tau) / name;
      if (!fs::exists(p)) continue;
      append_body(p, os, first);
      first = false;
    }
  };
  if (has(stages, Stage::Stats)) combine("stats_summary.csv");
  if (has(stages, Stage::Defects)) {
    combine("residuals.csv");
    combine("residual_fit.csv");
    combine("ratio_band.csv");
  }
  if (has(stages, Stage::Hist)) combine("hist_stats.csv");
  if (has(stages, Stage::Pod)) {
    combine("pod_singular_values.csv");
    for (const std::string& target : kPodTargets) {
      const bool raw = target == "raw_rho";
      std::vector<std::string> header{raw ? "m" : "M"};
      for (double tau : cfg.taus) header.push_back(num(tau));
      Csv table(root / ("pod_K_" + target + ".csv"), header);
      for (int level = raw ? 1 : 2; level <= cfg.levels; ++level) {
        std::vector<std::string> row{num(level)};
        for (const TauSummary& s : report.taus) row.push_back(num(s.k_of(target, level)));
        table.row(row);
      }
    }
  }
  {
    std::ofstream os(root / "summary.json", std::ios::trunc);
    os << report.to_json().dump(1) << '\n';
  }
  const json index = write_index(root, report.config_hash);
  for (const auto& a : index["artifacts"]) report.artifacts.push_back(a["path"].get<std::string>());
  return report;
}

}  // namespace khe
