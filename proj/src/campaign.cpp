#include "khe/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "khe/digest.hpp"
#include "khe/error.hpp"
#include "khe/text.hpp"

namespace khe {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Pending: return "pending";
    case RunStatus::Ok: return "ok";
    case RunStatus::Blowup: return "blowup";
    case RunStatus::Failed: return "failed";
  }
  return "failed";
}

RunStatus run_status_from_string(const std::string& s) {
  if (s == "pending") return RunStatus::Pending;
  if (s == "ok") return RunStatus::Ok;
  if (s == "blowup") return RunStatus::Blowup;
  if (s == "failed") return RunStatus::Failed;
  throw Error(ErrorKind::Io, "unknown run status '" + s + "'");
}

namespace {

json prim_json(const PrimitiveState& w) { return json::array({w.rho, w.u, w.v, w.p}); }

json solver_json(const SolverConfig& s) {
  return {{"cfl", s.cfl},
          {"weno_eps", s.weno_eps},
          {"vars", s.vars == ReconstructionVars::Characteristic ? "characteristic" : "primitive"},
          {"t_end", s.t_end},
          {"snapshot_times", s.snapshot_times},
          {"max_steps", s.max_steps},
          {"accuracy_reference_cells", s.accuracy_reference_cells},
          {"fixed_dt", s.fixed_dt}};
}

// Inputs that determine a single run's output, independent of L and M.
json physics_json(const CampaignSpec& s) {
  return {{"scheme", "khe-awenoz5-ssprk3/1"},
          {"m0", s.m0},
          {"kh",
           {{"tau", s.kh.tau},
            {"j1", s.kh.j1},
            {"j2", s.kh.j2},
            {"amplitude", s.kh.amplitude},
            {"inner", prim_json(s.kh.inner)},
            {"outer", prim_json(s.kh.outer)}}},
          {"gamma", s.gamma},
          {"solver", solver_json(s.solver)},
          {"coefficients_sha256", s.coeff_sha256}};
}

json record_json(const RunRecord& r) {
  json snaps = json::array();
  for (const auto& [t, p] : r.snapshot_paths) snaps.push_back({{"t", t}, {"path", p}});
  json elog = json::array();
  for (const auto& [t, s] : r.entropy_log) elog.push_back({t, s});
  return {{"l", r.l},
          {"m", r.m},
          {"xi", r.xi},
          {"status", to_string(r.status)},
          {"hash", r.hash},
          {"path", r.path},
          {"snapshots", snaps},
          {"steps", r.steps},
          {"wall_seconds", r.wall_seconds},
          {"min_density", r.min_density},
          {"min_pressure", r.min_pressure},
          {"fallbacks", r.fallbacks},
          {"cached", r.cached},
          {"message", r.message},
          {"entropy_log", elog}};
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.l = j.at("l").get<int>();
  r.m = j.at("m").get<int>();
  r.xi = j.at("xi").get<double>();
  r.status = run_status_from_string(j.at("status").get<std::string>());
  r.hash = j.at("hash").get<std::string>();
  r.path = j.at("path").get<std::string>();
  for (const auto& s : j.at("snapshots")) r.snapshot_paths.emplace_back(s.at("t").get<double>(), s.at("path").get<std::string>());
  r.steps = j.at("steps").get<long>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.min_density = j.at("min_density").get<double>();
  r.min_pressure = j.at("min_pressure").get<double>();
  r.fallbacks = j.at("fallbacks").get<long>();
  r.cached = j.at("cached").get<bool>();
  r.message = j.at("message").get<std::string>();
  for (const auto& e : j.at("entropy_log")) r.entropy_log.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  return r;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, path.string() + ": " + e.what());
  }
}

// Loads a finished run from the cache; false when absent or incomplete.
bool load_cached(const fs::path& cache_dir, RunRecord& r) {
  const fs::path meta = cache_dir / (r.hash + ".json");
  if (!fs::exists(meta)) return false;
  try {
    RunRecord c = record_from_json(read_json(meta));
    if (c.status != RunStatus::Ok || c.hash != r.hash || !fs::exists(c.path)) return false;
    for (const auto& s : c.snapshot_paths)
      if (!fs::exists(s.second)) return false;
    c.l = r.l;
    c.m = r.m;
    c.cached = true;
    r = std::move(c);
    return true;
  } catch (const Error&) {
    return false;
  } catch (const json::exception&) {
    return false;
  }
}

void execute(const CampaignSpec& spec, RunRecord& r) {
  const GasParams g(spec.gamma);
  const MeshHierarchy h(spec.m0, spec.levels);
  const fs::path cache = fs::absolute(spec.cache_dir);
  try {
    const ConservedField init = kh_initial_state(h.cells(r.m), r.m, r.xi, spec.coeffs, spec.kh, g);
    RunResult res = advance(init, spec.solver.t_end, g, spec.solver);
    const fs::path out = cache / (r.hash + ".khf");
    write_grid_field(res.final_field, out);
    r.path = out.string();
    r.snapshot_paths.clear();
    for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
      const fs::path sp = cache / (r.hash + "_s" + std::to_string(i) + ".khf");
      write_grid_field(res.snapshots[i].field, sp);
      r.snapshot_paths.emplace_back(res.snapshots[i].t, sp.string());
    }
    r.status = RunStatus::Ok;
    r.steps = res.steps;
    r.wall_seconds = res.wall_seconds;
    r.min_density = res.min_density;
    r.min_pressure = res.min_pressure;
    r.fallbacks = res.fallbacks;
    r.entropy_log = res.entropy_log;
    r.message.clear();
    r.cached = false;
    write_text_atomic(cache / (r.hash + ".json"), record_json(r).dump(1) + "\n");
  } catch (const Error& e) {
    r.status = e.kind() == ErrorKind::NonPhysicalState ? RunStatus::Blowup : RunStatus::Failed;
    r.message = e.what();
  } catch (const std::exception& e) {
    r.status = RunStatus::Failed;
    r.message = e.what();
  }
}

std::string log_line(const CampaignSpec& spec, const RunRecord& r) {
  std::ostringstream os;
  os << "tau=" << fmt_double(spec.kh.tau) << " l=" << r.l << "/" << spec.grid.count << " m=" << r.m
     << " N=" << MeshHierarchy(spec.m0, spec.levels).cells(r.m) << " xi=" << fmt_double(r.xi)
     << " status=" << to_string(r.status) << " steps=" << r.steps << " wall=" << fmt_double(r.wall_seconds)
     << "s cached=" << (r.cached ? "yes" : "no");
  if (!r.message.empty()) os << " msg=\"" << r.message << "\"";
  return os.str();
}

}  // namespace

void CampaignSpec::validate() const {
  MeshHierarchy(m0, levels);
  grid.validate();
  kh.validate(grid.xi_max());
  GasParams{gamma};
  solver.validate();
  coeffs.validate();
  if (workers < 1) throw Error(ErrorKind::Config, "workers must be >= 1");
  if (dir.empty() || cache_dir.empty()) throw Error(ErrorKind::Config, "campaign and cache directories are required");
}

json CampaignSpec::canonical() const {
  json j = physics_json(*this);
  j["levels"] = levels;
  j["collocation"] = {{"a", grid.a}, {"b", grid.b}, {"count", grid.count}};
  return j;
}

std::string CampaignSpec::config_hash() const { return sha256_hex(canonical().dump()); }

std::string CampaignSpec::run_hash(int l, int m) const {
  json j = physics_json(*this);
  j["level"] = m;
  j["xi"] = grid.node(l);
  return sha256_hex(j.dump());
}

const RunRecord& Manifest::record(int l, int m) const {
  for (const RunRecord& r : runs)
    if (r.l == l && r.m == m) return r;
  throw Error(ErrorKind::MissingLevel, "no run record for l=" + std::to_string(l) + " m=" + std::to_string(m));
}

RunRecord& Manifest::record(int l, int m) {
  return const_cast<RunRecord&>(static_cast<const Manifest&>(*this).record(l, m));
}

void Manifest::require_sealed() const {
  std::vector<std::string> bad;
  for (const RunRecord& r : runs) {
    if (r.status != RunStatus::Ok) {
      bad.push_back("(l=" + std::to_string(r.l) + ", m=" + std::to_string(r.m) + ") " + to_string(r.status) +
                    (r.message.empty() ? "" : ": " + r.message));
    }
  }
  if (runs.size() != static_cast<std::size_t>(grid.count) * levels) {
    bad.push_back("expected " + std::to_string(grid.count * levels) + " records, found " + std::to_string(runs.size()));
  }
  if (!bad.empty() || !sealed) {
    throw Error(ErrorKind::PartialCampaign, "campaign incomplete: " + (bad.empty() ? "not sealed" : join(bad, "; ")));
  }
}

GridField Manifest::load_field(int l, int m) const {
  const RunRecord& r = record(l, m);
  if (r.status != RunStatus::Ok) {
    throw Error(ErrorKind::PartialCampaign, "run (l=" + std::to_string(l) + ", m=" + std::to_string(m) + ") is " +
                                                to_string(r.status));
  }
  return read_grid_field(r.path);
}

json Manifest::to_json() const {
  json runs_j = json::array();
  for (const RunRecord& r : runs) runs_j.push_back(record_json(r));
  return {{"schema", kSchema}, {"config", config},   {"config_hash", config_hash}, {"m0", m0},
          {"levels", levels},  {"collocation", {{"a", grid.a}, {"b", grid.b}, {"count", grid.count}}},
          {"tau", tau},        {"gamma", gamma},     {"sealed", sealed},           {"runs", runs_j}};
}

Manifest Manifest::from_json(const json& j) {
  try {
    if (j.at("schema").get<std::string>() != kSchema) throw Error(ErrorKind::Io, "unsupported manifest schema");
    Manifest m;
    m.config = j.at("config");
    m.config_hash = j.at("config_hash").get<std::string>();
    m.m0 = j.at("m0").get<int>();
    m.levels = j.at("levels").get<int>();
    const json& c = j.at("collocation");
    m.grid = {c.at("a").get<double>(), c.at("b").get<double>(), c.at("count").get<int>()};
    m.tau = j.at("tau").get<double>();
    m.gamma = j.at("gamma").get<double>();
    m.sealed = j.at("sealed").get<bool>();
    for (const json& r : j.at("runs")) m.runs.push_back(record_from_json(r));
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed manifest: ") + e.what());
  }
}

void save_manifest(const fs::path& path, const Manifest& m) { write_text_atomic(path, m.to_json().dump(1) + "\n"); }

Manifest load_manifest(const fs::path& path) { return Manifest::from_json(read_json(path)); }

Manifest run_campaign(const CampaignSpec& spec) {
  spec.validate();
  fs::create_directories(spec.dir);
  fs::create_directories(spec.cache_dir);

  Manifest man;
  man.config = spec.canonical();
  man.config_hash = spec.config_hash();
  man.m0 = spec.m0;
  man.levels = spec.levels;
  man.grid = spec.grid;
  man.tau = spec.kh.tau;
  man.gamma = spec.gamma;
  for (int m = 1; m <= spec.levels; ++m) {
    for (int l = 1; l <= spec.grid.count; ++l) {
      RunRecord r;
      r.l = l;
      r.m = m;
      r.xi = spec.grid.node(l);
      r.hash = spec.run_hash(l, m);
      man.runs.push_back(std::move(r));
    }
  }

  const fs::path manifest_path = spec.dir / "manifest.json";
  std::ofstream log_file(spec.dir / "campaign.log", std::ios::app);
  std::mutex mu;
  auto finish = [&](std::size_t i, RunRecord rec) {
    std::lock_guard<std::mutex> lock(mu);
    man.runs[i] = std::move(rec);
    const std::string line = log_line(spec, man.runs[i]);
    log_file << line << '\n';
    log_file.flush();
    if (spec.log) spec.log(line);
    save_manifest(manifest_path, man);
  };

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < man.runs.size(); ++i) {
    RunRecord r = man.runs[i];
    if (spec.use_cache && load_cached(spec.cache_dir, r)) {
      finish(i, std::move(r));
    } else {
      todo.push_back(i);
    }
  }
  // Finest levels first so the longest runs start early.
  std::stable_sort(todo.begin(), todo.end(), [&](std::size_t a, std::size_t b) { return man.runs[a].m > man.runs[b].m; });

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= todo.size()) return;
      RunRecord r;
      {
        std::lock_guard<std::mutex> lock(mu);
        r = man.runs[todo[k]];
      }
      execute(spec, r);
      finish(todo[k], std::move(r));
    }
  };
  const int nthreads = std::max(1, std::min<int>(spec.workers, static_cast<int>(todo.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  man.sealed = std::all_of(man.runs.begin(), man.runs.end(), [](const RunRecord& r) { return r.status == RunStatus::Ok; });
  save_manifest(manifest_path, man);
  if (!man.sealed) man.require_sealed();
  return man;
}

}  // namespace khe
