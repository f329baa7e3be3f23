#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace khe {

struct CheckResult {
  std::string id;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::filesystem::path work_dir = "khe_verify";
  std::uint64_t seed = 20240611;
  int workers = 1;
  /// Progress lines (campaign runs, stage timings).
  std::function<void(const std::string&)> log;
};

/// Acceptance checks A1..A9 in order.
std::vector<std::string> acceptance_ids();

/// Runs the checks one by one. Checks share the desk campaigns they need, so
/// running a subset only builds what that subset uses. Exceptions inside a
/// check turn into a failed result.
class Verifier {
 public:
  explicit Verifier(VerifyOptions opts);
  ~Verifier();

  CheckResult run(const std::string& id);
  std::vector<CheckResult> run_all(const std::vector<std::string>& ids = {});

 private:
  struct Impl;
  std::unique_ptr<Impl> state_;
};

std::string format_result(const CheckResult& r);
nlohmann::json results_json(const std::vector<CheckResult>& results);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a);

}  // namespace khe
