#include "khe/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "khe/digest.hpp"
#include "khe/error.hpp"
#include "khe/text.hpp"

namespace khe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    throw Error(ErrorKind::Config, key + ": '" + v + "' is not a number");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  long long out = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    throw Error(ErrorKind::Config, key + ": '" + v + "' is not an integer");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    throw Error(ErrorKind::Config, key + ": '" + v + "' is not a non-negative integer");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw Error(ErrorKind::Config, key + ": '" + v + "' is not a boolean");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const std::string& part : split_list(v)) out.push_back(to_double(key, part));
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::vector<std::string> parts;
  for (double x : v) parts.push_back(fmt_double(x));
  return join(parts, ", ");
}

const char* vars_name(ReconstructionVars v) {
  return v == ReconstructionVars::Characteristic ? "characteristic" : "primitive";
}

const char* mode_name(CwenoMode m) { return m == CwenoMode::Nonlinear ? "nonlinear" : "linear"; }

}  // namespace

void set_option(RunConfig& c, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "hierarchy.m0") {
    c.m0 = static_cast<int>(to_int(key, v));
  } else if (key == "hierarchy.levels") {
    c.levels = static_cast<int>(to_int(key, v));
  } else if (key == "collocation.a") {
    c.xi.a = to_double(key, v);
  } else if (key == "collocation.b") {
    c.xi.b = to_double(key, v);
  } else if (key == "collocation.count") {
    c.xi.count = static_cast<int>(to_int(key, v));
  } else if (key == "physics.gamma") {
    c.gamma = to_double(key, v);
  } else if (key == "physics.tau") {
    c.taus = to_list(key, v);
  } else if (key == "physics.t_end") {
    c.t_end = to_double(key, v);
  } else if (key == "solver.cfl") {
    c.cfl = to_double(key, v);
  } else if (key == "solver.vars") {
    if (v == "characteristic") {
      c.vars = ReconstructionVars::Characteristic;
    } else if (v == "primitive") {
      c.vars = ReconstructionVars::Primitive;
    } else {
      throw Error(ErrorKind::Config, key + ": expected characteristic or primitive");
    }
  } else if (key == "solver.snapshot_times") {
    c.snapshot_times = to_list(key, v);
  } else if (key == "coefficients.file") {
    c.coeff_file = v;
  } else if (key == "coefficients.seed") {
    c.seed = to_u64(key, v);
  } else if (key == "output.dir") {
    c.output_dir = v;
  } else if (key == "output.cache_dir") {
    c.cache_dir = v;
  } else if (key == "output.use_cache") {
    c.use_cache = to_bool(key, v);
  } else if (key == "output.workers") {
    c.workers = static_cast<int>(to_int(key, v));
  } else if (key == "analysis.cweno_mode") {
    if (v == "nonlinear") {
      c.cweno_mode = CwenoMode::Nonlinear;
    } else if (v == "linear") {
      c.cweno_mode = CwenoMode::Linear;
    } else {
      throw Error(ErrorKind::Config, key + ": expected nonlinear or linear");
    }
  } else if (key == "analysis.pod_threshold") {
    c.pod_threshold = to_double(key, v);
  } else if (key == "analysis.ratio_threshold") {
    c.ratio_threshold = to_double(key, v);
  } else if (key.rfind("windows.", 0) == 0) {
    const std::string name = key.substr(8);
    const std::vector<double> r = to_list(key, v);
    if (name.empty() || r.size() != 4) throw Error(ErrorKind::Config, key + ": expected x0 x1 y0 y1");
    Window w{name, r[0], r[1], r[2], r[3]};
    bool replaced = false;
    for (Window& old : c.windows) {
      if (old.name == name) {
        old = w;
        replaced = true;
      }
    }
    if (!replaced) c.windows.push_back(w);
  } else {
    throw Error(ErrorKind::Config, "unknown option '" + key + "'");
  }
}

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::Config, std::string("config syntax: ") + e.what());
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw Error(ErrorKind::Config, "option '" + section + "' must sit inside a [section]");
    if (section == "windows") c.windows.clear();
    for (const auto& [key, value] : body) set_option(c, section + "." + key, value.data());
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[hierarchy]\nm0 = " << c.m0 << "\nlevels = " << c.levels << "\n\n";
  os << "[collocation]\na = " << fmt_double(c.xi.a) << "\nb = " << fmt_double(c.xi.b) << "\ncount = " << c.xi.count
     << "\n\n";
  os << "[physics]\ngamma = " << fmt_double(c.gamma) << "\ntau = " << list_text(c.taus)
     << "\nt_end = " << fmt_double(c.t_end) << "\n\n";
  os << "[solver]\ncfl = " << fmt_double(c.cfl) << "\nvars = " << vars_name(c.vars)
     << "\nsnapshot_times = " << list_text(c.snapshot_times) << "\n\n";
  os << "[coefficients]\nfile = " << c.coeff_file << "\nseed = " << c.seed << "\n\n";
  os << "[output]\ndir = " << c.output_dir << "\ncache_dir = " << c.cache_dir
     << "\nuse_cache = " << (c.use_cache ? "true" : "false") << "\nworkers = " << c.workers << "\n\n";
  os << "[analysis]\ncweno_mode = " << mode_name(c.cweno_mode) << "\npod_threshold = " << fmt_double(c.pod_threshold)
     << "\nratio_threshold = " << fmt_double(c.ratio_threshold) << "\n\n";
  os << "[windows]\n";
  for (const Window& w : c.windows) {
    os << w.name << " = " << fmt_double(w.x0) << " " << fmt_double(w.x1) << " " << fmt_double(w.y0) << " "
       << fmt_double(w.y1) << "\n";
  }
  return os.str();
}

void RunConfig::validate() const {
  (void)MeshHierarchy(m0, levels);
  xi.validate();
  (void)GasParams(gamma);
  solver().validate();
  cweno().validate();
  if (taus.empty()) throw Error(ErrorKind::Config, "at least one tau is required");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    KhConfig kh;
    kh.tau = taus[i];
    kh.validate(xi.xi_max());
    for (std::size_t j = 0; j < i; ++j)
      if (tau_label(taus[j]) == tau_label(taus[i])) throw Error(ErrorKind::Config, "duplicate tau value");
  }
  if (workers < 0) throw Error(ErrorKind::Config, "workers must be >= 0");
  if (coeff_file.empty()) throw Error(ErrorKind::Config, "coefficient file path is required");
  if (output_dir.empty()) throw Error(ErrorKind::Config, "output directory is required");
  if (!(pod_threshold > 0.0 && pod_threshold <= 1.0)) throw Error(ErrorKind::Config, "pod_threshold must lie in (0, 1]");
  if (!(ratio_threshold >= 0.0)) throw Error(ErrorKind::Config, "ratio_threshold must be >= 0");
  for (const Window& w : windows) {
    if (!(w.x0 <= w.x1 && w.y0 <= w.y1 && w.x0 >= 0.0 && w.y0 >= 0.0 && w.x1 <= 1.0 && w.y1 <= 1.0)) {
      throw Error(ErrorKind::Config, "window " + w.name + " must be a rectangle inside [0, 1]^2");
    }
  }
}

json RunConfig::canonical() const {
  json win = json::array();
  for (const Window& w : windows) win.push_back({{"name", w.name}, {"x0", w.x0}, {"x1", w.x1}, {"y0", w.y0}, {"y1", w.y1}});
  return {{"m0", m0},
          {"levels", levels},
          {"collocation", {{"a", xi.a}, {"b", xi.b}, {"count", xi.count}}},
          {"taus", taus},
          {"gamma", gamma},
          {"cfl", cfl},
          {"t_end", t_end},
          {"vars", vars_name(vars)},
          {"snapshot_times", snapshot_times},
          {"seed", seed},
          {"cweno_mode", mode_name(cweno_mode)},
          {"windows", win},
          {"pod_threshold", pod_threshold},
          {"ratio_threshold", ratio_threshold}};
}

std::string RunConfig::hash() const { return sha256_hex(canonical().dump()); }

int RunConfig::resolved_workers() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

fs::path RunConfig::resolved_cache_dir() const {
  if (!cache_dir.empty()) return cache_dir;
  if (const char* env = std::getenv("KHE_CACHE_DIR"); env && *env) return env;
  return fs::path(output_dir) / "cache";
}

fs::path RunConfig::campaign_dir(double tau) const { return fs::path(output_dir) / tau_label(tau); }

CwenoConfig RunConfig::cweno() const {
  CwenoConfig c;
  c.mode = cweno_mode;
  return c;
}

SolverConfig RunConfig::solver() const {
  SolverConfig s;
  s.cfl = cfl;
  s.t_end = t_end;
  s.vars = vars;
  s.snapshot_times = snapshot_times;
  return s;
}

std::string tau_label(double tau) { return "tau_" + fmt_double(tau); }

CampaignSpec campaign_spec(const RunConfig& cfg, double tau, const PerturbationCoeffs& coeffs,
                           const std::string& coeff_sha256) {
  CampaignSpec s;
  s.m0 = cfg.m0;
  s.levels = cfg.levels;
  s.grid = cfg.xi;
  s.kh.tau = tau;
  s.gamma = cfg.gamma;
  s.solver = cfg.solver();
  s.coeffs = coeffs;
  s.coeff_sha256 = coeff_sha256;
  s.dir = cfg.campaign_dir(tau);
  s.cache_dir = cfg.resolved_cache_dir();
  s.workers = cfg.resolved_workers();
  s.use_cache = cfg.use_cache;
  return s;
}

}  // namespace khe
