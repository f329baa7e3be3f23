#include "khe/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "khe/config.hpp"
#include "khe/cweno.hpp"
#include "khe/digest.hpp"
#include "khe/error.hpp"
#include "khe/pipeline.hpp"
#include "khe/text.hpp"

namespace khe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
const GasParams kAir(1.4);
const char* kComponents[] = {"rho", "m_x", "m_y", "E"};

std::string f6(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

ConservedField advected_sine(int n) {
  ConservedField f(0, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      const double x = static_cast<double>(j) / n, y = static_cast<double>(k) / n;
      f(j, k) = prim_to_cons({1.0 + 0.2 * std::sin(2.0 * kPi * (x + y)), 1.0, 1.0, 1.0}, kAir).to_array();
    }
  return f;
}

// Largest relative drift of the four conserved totals between two fields.
double conservation_drift(const GridField& a, const GridField& b) {
  double worst = 0.0;
  for (const char* name : kComponents) {
    const auto& u = a.get(name);
    const auto& v = b.get(name);
    double s0 = 0.0, a0 = 0.0, s1 = 0.0, a1 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      s0 += u[i];
      a0 += std::abs(u[i]);
      s1 += v[i];
      a1 += std::abs(v[i]);
    }
    const double scale = std::max({std::abs(s0), a0, a1});
    if (scale > 0.0) worst = std::max(worst, std::abs(s1 - s0) / scale);
  }
  return worst;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::map<std::string, std::string> csv_hashes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") {
      out[fs::relative(e.path(), dir).generic_string()] = sha256_file(e.path());
    }
  }
  return out;
}

// Largest relative difference between numeric cells of two CSV files; +inf
// when the files differ in shape or in a non-numeric cell.
double csv_distance(const fs::path& a, const fs::path& b) {
  std::ifstream ia(a), ib(b);
  std::string la, lb;
  double worst = 0.0;
  while (true) {
    const bool ga = static_cast<bool>(std::getline(ia, la));
    const bool gb = static_cast<bool>(std::getline(ib, lb));
    if (ga != gb) return INFINITY;
    if (!ga) break;
    std::stringstream sa(la), sb(lb);
    std::string ca, cb;
    while (true) {
      const bool ha = static_cast<bool>(std::getline(sa, ca, ','));
      const bool hb = static_cast<bool>(std::getline(sb, cb, ','));
      if (ha != hb) return INFINITY;
      if (!ha) break;
      if (ca == cb) continue;
      char* ea = nullptr;
      char* eb = nullptr;
      const double x = std::strtod(ca.c_str(), &ea), y = std::strtod(cb.c_str(), &eb);
      if (*ea || *eb || ca.empty() || cb.empty()) return INFINITY;
      worst = std::max(worst, std::abs(x - y) / std::max(std::abs(x), std::abs(y)));
    }
  }
  return worst;
}

}  // namespace

std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      diag += a[p][p] * a[p][p];
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off <= 1e-32 * diag || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

struct Verifier::Impl {
  VerifyOptions opts;
  PerturbationCoeffs coeffs;
  std::string coeff_sha;

  struct Advection {
    std::vector<int> n;
    std::vector<double> err;
    std::vector<double> drift;
  };
  std::optional<Advection> advection;

  struct Desk {
    RunConfig cfg;
    AnalysisReport report;
  };
  std::map<std::string, Desk> desks;

  void log(const std::string& s) const {
    if (opts.log) opts.log(s);
  }

  RunConfig desk_config(const std::string& name, int levels, int count, double tau) const {
    RunConfig c;
    c.m0 = 2;
    c.levels = levels;
    c.xi.count = count;
    c.taus = {tau};
    c.t_end = 1.0;
    c.seed = opts.seed;
    c.output_dir = (opts.work_dir / name).string();
    c.cache_dir = (opts.work_dir / "cache").string();
    c.workers = opts.workers;
    return c;
  }

  AnalysisReport run_pipeline(const RunConfig& c, const std::vector<Stage>& stages) const {
    for (double tau : c.taus) {
      CampaignSpec spec = campaign_spec(c, tau, coeffs, coeff_sha);
      spec.log = opts.log;
      run_campaign(spec);
    }
    return analyze(c, stages);
  }

  const Desk& desk(const std::string& name) {
    auto it = desks.find(name);
    if (it != desks.end()) return it->second;
    RunConfig c;
    // The two M = 3 campaigns stop at N = 28, where the windows hold fewer than
    // 16 nodes, so they skip the histogram stage.
    std::vector<Stage> stages = parse_stages("all");
    if (name == "desk") {
      c = desk_config(name, 4, 9, 1.1);
    } else if (name == "desk_m3") {
      c = desk_config(name, 3, 9, 1.1);
      stages = parse_stages("stats,defects,pod");
    } else if (name == "flat") {
      c = desk_config(name, 3, 7, 0.0);
      stages = parse_stages("stats,defects,pod");
    } else {
      throw Error(ErrorKind::Config, "unknown desk campaign " + name);
    }
    log("campaign " + name + ": m0=2 M=" + std::to_string(c.levels) + " L=" + std::to_string(c.xi.count) +
        " tau=" + fmt_double(c.taus[0]) + " T=1");
    Desk d{c, run_pipeline(c, stages)};
    return desks.emplace(name, std::move(d)).first->second;
  }

  const Advection& advection_runs() {
    if (advection) return *advection;
    Advection a;
    SolverConfig cfg;
    cfg.t_end = 1.0;
    cfg.accuracy_reference_cells = 32;
    for (int n : {32, 64, 128}) {
      const ConservedField init = advected_sine(n);
      const RunResult r = advance(init, 1.0, kAir, cfg);
      const GridField exact = init.to_grid_field(kAir);
      std::vector<double> diff(exact.size());
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = r.final_field.get("rho")[i] - exact.get("rho")[i];
      a.n.push_back(n);
      a.err.push_back(l1_norm(diff, n));
      a.drift.push_back(conservation_drift(exact, r.final_field));
      log("advection N=" + std::to_string(n) + " steps=" + std::to_string(r.steps) +
          " L1=" + f6(a.err.back()) + " wall=" + f6(r.wall_seconds) + "s");
    }
    advection = a;
    return *advection;
  }

  CheckResult a1() {
    const Advection& a = advection_runs();
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < a.n.size(); ++i) {
      lx.push_back(std::log(static_cast<double>(a.n[i])));
      ly.push_back(std::log(a.err[i]));
    }
    const double order = -fit_slope(lx, ly);
    std::string detail = "fitted L1 order " + f6(order) + " (errors";
    for (double e : a.err) detail += " " + f6(e);
    detail += "; pairwise";
    for (std::size_t i = 0; i + 1 < a.err.size(); ++i) detail += " " + f6(std::log2(a.err[i] / a.err[i + 1]));
    detail += ")";
    return {"A1", order >= 4.5 && order <= 5.5, detail};
  }

  CheckResult a2() {
    const Advection& a = advection_runs();
    double worst = 0.0;
    for (double d : a.drift) worst = std::max(worst, d);
    KhConfig kh;
    kh.tau = 0.0;
    SolverConfig cfg;
    cfg.t_end = 1.0;
    const ConservedField init = kh_initial_state(56, 4, 0.0, coeffs, kh, kAir);
    const RunResult r = advance(init, 1.0, kAir, cfg);
    const double kh_drift = conservation_drift(init.to_grid_field(kAir), r.final_field);
    worst = std::max(worst, kh_drift);
    return {"A2", worst <= 1e-11,
            "max relative drift " + f6(worst) + " (advection " + f6(*std::max_element(a.drift.begin(), a.drift.end())) +
                ", KH tau=0 N=56 " + f6(kh_drift) + ")"};
  }

  CheckResult a3() {
    const CwenoConfig linear{.mode = CwenoMode::Linear};
    auto sample = [](int L, auto&& f) {
      std::vector<double> v(static_cast<std::size_t>(L));
      for (int l = 0; l < L; ++l) v[static_cast<std::size_t>(l)] = f(-1.0 + 2.0 * l / (L - 1));
      return v;
    };
    auto q6 = [](double x) { return std::pow(x, 6) - 0.5 * std::pow(x, 3) + 0.25 * x - 1.0; };
    const PiecewisePoly pp = cweno7_build(sample(9, q6), -1.0, 1.0, linear);
    double exact_err = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double x = -1.0 + 2.0 * i / 4000;
      exact_err = std::max(exact_err, std::abs(poly_eval(pp, x) - q6(x)));
    }

    std::vector<double> err;
    for (int n : {16, 32, 64, 128}) {
      std::vector<double> coarse(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) coarse[static_cast<std::size_t>(j)] = std::sin(2 * kPi * j / n);
      const auto fine = refine_1d(coarse);
      double e = 0.0;
      for (int j = 0; j < 2 * n; ++j) e = std::max(e, std::abs(fine[static_cast<std::size_t>(j)] - std::sin(kPi * j / n)));
      err.push_back(e);
    }
    double min_order = INFINITY;
    std::string orders;
    for (std::size_t i = 0; i + 1 < err.size(); ++i) {
      const double o = std::log2(err[i] / err[i + 1]);
      min_order = std::min(min_order, o);
      orders += " " + f6(o);
    }

    double overshoot = 0.0;
    for (int L : {11, 21, 40}) {
      auto step = [](double x) { return x < 0.237 ? 0.0 : 1.0; };
      const PiecewisePoly sp = cweno7_build(sample(L, step), -1.0, 1.0);
      for (int i = 0; i <= 4000; ++i) {
        const double v = poly_eval(sp, -1.0 + 2.0 * i / 4000);
        overshoot = std::max({overshoot, -v, v - 1.0});
      }
    }
    const bool pass = exact_err <= 1e-10 && min_order >= 6.5 && overshoot <= 0.05;
    return {"A3", pass,
            "degree-6 error " + f6(exact_err) + "; refine orders" + orders + "; step overshoot " + f6(overshoot)};
  }

  CheckResult a4() {
    const CwenoConfig linear{.mode = CwenoMode::Linear};
    const CollocationGrid grid{-1.0, 1.0, 9};
    const auto xi = grid.nodes();
    std::vector<double> s1, s2;
    for (double x : xi) {
      s1.push_back(x);
      s2.push_back(x * x);
    }
    const Weight w{WeightKind::Uniform, -1.0, 1.0};
    const Moments m1 = quadrature_moments(cweno7_build(s1, -1.0, 1.0, linear), w);
    const Moments m2 = quadrature_moments(cweno7_build(s2, -1.0, 1.0, linear), w);
    const double e = std::max({std::abs(m1.mean), std::abs(m1.std - 1.0 / std::sqrt(3.0)),
                               std::abs(m2.mean - 1.0 / 3.0), std::abs(m2.std - std::sqrt(4.0 / 45.0))});
    return {"A4", e <= 1e-12,
            "xi: (" + f6(m1.mean) + ", " + f6(m1.std) + "), xi^2: (" + f6(m2.mean) + ", " + f6(m2.std) +
                "), max error " + f6(e)};
  }

  // Two constant levels; returns the single-node ratio and trR, Edef.
  static std::array<double, 3> two_state(const PrimitiveState& a, const PrimitiveState& b) {
    auto level = [](int m, int n, const PrimitiveState& w) {
      ConservedField f(m, n);
      for (State& s : f.states()) s = prim_to_cons(w, kAir).to_array();
      return f.to_grid_field(kAir);
    };
    const GridField d = defect_fields(cesaro_average({level(1, 7, a), level(2, 14, b)}, 2, kAir), kAir);
    return {d.get("ratio")[0], d.get("trR")[0], d.get("Edef")[0]};
  }

  CheckResult a5() {
    // Kinetic pair: rho = 1, S = 0 (p = 1), m = (+-1, 0).
    const auto kin = two_state({1.0, 1.0, 0.0, 1.0}, {1.0, -1.0, 0.0, 1.0});
    // Internal pair: m = 0, S = 0, rho in {1, 3}.
    const auto inn = two_state({1.0, 0.0, 0.0, 1.0}, {3.0, 0.0, 0.0, std::pow(3.0, 1.4)});
    const double synth = std::max(std::abs(kin[0] - 0.5), std::abs(inn[0] - 1.25));

    const Desk& d = desk("desk_m3");
    const TauSummary& s = d.report.taus.at(0);
    const RatioBandReport& b = s.band_mean.at(static_cast<std::size_t>(s.levels - 1));
    const RatioBandReport& p = s.band_pooled.at(static_cast<std::size_t>(s.levels - 1));
    const bool pass = synth <= 1e-12 && b.considered > 0 && b.fraction() >= 0.98;
    return {"A5", pass,
            "two-state ratios " + fmt_double(kin[0]) + ", " + fmt_double(inn[0]) + "; KH M=3 N=" +
                std::to_string(s.n_finest) + ": " + std::to_string(b.inside) + "/" + std::to_string(b.considered) +
                " = " + f6(b.fraction()) + " of xi-mean ratios in [0.475, 1.3125] (per-realization " +
                f6(p.fraction()) + ")"};
  }

  CheckResult a6() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    ConservedField f(1, 14);
    for (State& s : f.states()) s = prim_to_cons({1.0 + u(rng), u(rng), u(rng), 1.0 + u(rng)}, kAir).to_array();
    const GridField def = defect_fields(cesaro_average({f.to_grid_field(kAir)}, 1, kAir), kAir);
    double m1 = 0.0;
    for (const char* name : {"R_xx", "R_xy", "R_yy", "trR", "Edef"})
      for (double v : def.get(name)) m1 = std::max(m1, std::abs(v));

    const Desk& d = desk("flat");
    const TauSummary& s = d.report.taus.at(0);
    double sd = 0.0;
    for (const auto& [name, v] : s.max_std) sd = std::max(sd, v);
    int kmax = 0;
    for (const auto& k : s.pod_k) kmax = std::max(kmax, k.k);
    const bool pass = m1 <= 1e-12 && sd <= 1e-12 && kmax == 0 && !s.max_std.empty() && !s.pod_k.empty();
    return {"A6", pass,
            "M=1 max |defect| " + f6(m1) + "; tau=0 max std " + f6(sd) + "; max K " + std::to_string(kmax) + " over " +
                std::to_string(s.pod_k.size()) + " POD targets"};
  }

  CheckResult a7() {
    const Desk& d = desk("desk");
    const TauSummary& s = d.report.taus.at(0);
    auto row = [&](int M) {
      for (const ResidualRow& r : s.residuals)
        if (r.M == M) return r;
      throw Error(ErrorKind::MissingLevel, "no residual row for M=" + std::to_string(M));
    };
    const ResidualRow r2 = row(2), r3 = row(3);
    const bool pass = r2.eps_R > r3.eps_R && r2.eps_E > r3.eps_E && s.residual_slope >= 0.7 && s.residual_slope <= 1.3;
    return {"A7", pass,
            "eps_R(2)=" + f6(r2.eps_R) + " eps_R(3)=" + f6(r3.eps_R) + " eps_E(2)=" + f6(r2.eps_E) +
                " eps_E(3)=" + f6(r3.eps_E) + "; slope " + f6(s.residual_slope)};
  }

  CheckResult a8() {
    double worst = 0.0;
    int matrices = 0;
    for (const char* name : {"desk", "flat"}) {
      const Desk& d = desk(name);
      const fs::path mpath = d.cfg.campaign_dir(d.cfg.taus[0]) / "manifest.json";
      const EnsembleData e = collect_ensemble(load_manifest(mpath), d.cfg.cweno(), d.cfg.ratio_threshold, 1, false);
      for (const PodTarget& t : pod_targets(e)) {
        const PodResult r = pod_svd(t.matrix, SvdRoute::Auto, false);
        const Eigen::MatrixXd& a = t.matrix.data;
        std::vector<std::vector<double>> g(static_cast<std::size_t>(a.cols()),
                                           std::vector<double>(static_cast<std::size_t>(a.cols()), 0.0));
        for (Eigen::Index i = 0; i < a.cols(); ++i)
          for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index k = 0; k < a.rows(); ++k) g[i][j] += a(k, i) * a(k, j);
        const std::vector<double> ev = jacobi_eigenvalues(g);
        const double top = std::max(ev.front(), r.s.front() * r.s.front());
        for (std::size_t j = 0; j < ev.size(); ++j) {
          if (top > 0.0) worst = std::max(worst, std::abs(r.s[j] * r.s[j] - ev[j]) / top);
        }
        ++matrices;
      }
    }

    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd u(200, 4), v(4, 12);
    for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = nd(rng);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = nd(rng);
    const int k_rank = k_at(pod_svd(SnapshotMatrix{u * v, "rank4"}), 1.0 - 1e-12);

    const TauSummary& s = desk("desk").report.taus.at(0);
    const int k1 = s.k_of("raw_rho", 1), k2 = s.k_of("raw_rho", 2), k3 = s.k_of("raw_rho", 3);
    bool fewer = true;
    std::string ces;
    for (int M = 2; M <= s.levels; ++M) {
      const int kc = s.k_of("cesaro_rho", M), kr = s.k_of("raw_rho", M);
      fewer = fewer && kc <= kr;
      ces += " M=" + std::to_string(M) + ":" + std::to_string(kc) + "<=" + std::to_string(kr);
    }
    const bool pass = worst <= 1e-10 && k_rank == 4 && k1 <= k2 && k2 <= k3 && fewer;
    return {"A8", pass,
            "Gram oracle max deviation " + f6(worst) + " of s1^2 over " + std::to_string(matrices) +
                " matrices; rank-4 K=" + std::to_string(k_rank) + "; raw K m=1..3: " + std::to_string(k1) + "," +
                std::to_string(k2) + "," + std::to_string(k3) + "; Cesaro vs raw" + ces};
  }

  CheckResult a9() {
    const Desk& base = desk("desk");
    const fs::path ref = base.cfg.analysis_dir();
    const auto ref_hashes = csv_hashes(ref);
    std::string detail;
    bool pass = !ref_hashes.empty();
    for (int w : {1, 8}) {
      RunConfig c = base.cfg;
      const std::string name = "rerun_w" + std::to_string(w);
      fs::remove_all(opts.work_dir / name);
      c.output_dir = (opts.work_dir / name).string();
      c.cache_dir = (opts.work_dir / name / "cache").string();
      c.use_cache = false;
      c.workers = w;
      log("rerun of the desk campaign without cache, workers=" + std::to_string(w));
      run_pipeline(c, parse_stages("all"));
      const auto hashes = csv_hashes(c.analysis_dir());
      if (w == 1) {
        long differ = 0;
        for (const auto& [path, h] : ref_hashes) {
          auto it = hashes.find(path);
          if (it == hashes.end() || it->second != h) ++differ;
        }
        const bool ok = differ == 0 && hashes.size() == ref_hashes.size();
        pass = pass && ok;
        detail += "workers=1: " + std::to_string(ref_hashes.size() - static_cast<std::size_t>(differ)) + "/" +
                  std::to_string(ref_hashes.size()) + " CSV files hash-equal";
      } else {
        double dist = hashes.size() == ref_hashes.size() ? 0.0 : INFINITY;
        for (const auto& [path, h] : ref_hashes) {
          if (!hashes.count(path)) {
            dist = INFINITY;
            continue;
          }
          dist = std::max(dist, csv_distance(ref / path, c.analysis_dir() / path));
        }
        pass = pass && dist <= 1e-13;
        detail += "; workers=8: max relative difference " + f6(dist);
      }
    }
    return {"A9", pass, detail};
  }
};

Verifier::Verifier(VerifyOptions opts) : state_(std::make_unique<Impl>()) {
  state_->opts = std::move(opts);
  state_->coeffs = generate_coeffs(state_->opts.seed);
  state_->coeff_sha = sha256_hex(format_coeffs(state_->coeffs));
  fs::create_directories(state_->opts.work_dir);
}

Verifier::~Verifier() = default;

std::vector<std::string> acceptance_ids() { return {"A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9"}; }

CheckResult Verifier::run(const std::string& id) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r{id, false, ""};
  try {
    Impl& s = *state_;
    if (id == "A1") {
      r = s.a1();
    } else if (id == "A2") {
      r = s.a2();
    } else if (id == "A3") {
      r = s.a3();
    } else if (id == "A4") {
      r = s.a4();
    } else if (id == "A5") {
      r = s.a5();
    } else if (id == "A6") {
      r = s.a6();
    } else if (id == "A7") {
      r = s.a7();
    } else if (id == "A8") {
      r = s.a8();
    } else if (id == "A9") {
      r = s.a9();
    } else {
      r.detail = "unknown check id";
    }
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CheckResult> Verifier::run_all(const std::vector<std::string>& ids) {
  std::vector<CheckResult> out;
  for (const std::string& id : ids.empty() ? acceptance_ids() : ids) out.push_back(run(id));
  return out;
}

std::string format_result(const CheckResult& r) {
  std::ostringstream os;
  os << r.id << ' ' << (r.pass ? "PASS" : "FAIL") << "  " << r.detail << "  [";
  os.setf(std::ios::fixed);
  os.precision(1);
  os << r.seconds << " s]";
  return os.str();
}

json results_json(const std::vector<CheckResult>& results) {
  json checks = json::array();
  bool all = true;
  for (const CheckResult& r : results) {
    checks.push_back({{"id", r.id}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
    all = all && r.pass;
  }
  return {{"pass", all}, {"checks", checks}};
}

}  // namespace khe
