#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace khe {

/// Columns are mean-free snapshots (one per collocation node).
struct SnapshotMatrix {
  Eigen::MatrixXd data;
  std::string tag;  // e.g. "rho m=2" or "cesaro_rho M=3"
};

/// Subtracts the ensemble mean (1/L) sum_l psi_l from every snapshot.
SnapshotMatrix center_snapshots(const std::vector<std::span<const double>>& snapshots, std::string tag = {});

enum class SvdRoute {
  Auto,    // Gram when rows > 8 * cols, Direct otherwise
  Direct,  // divide-and-conquer bidiagonal SVD of the matrix
  Gram,    // eigen-decomposition of the cols x cols Gram matrix
};

struct PodResult {
  std::vector<double> s;  // nonincreasing, >= 0
  Eigen::MatrixXd modes;  // orthonormal columns, one per singular value
  SvdRoute route = SvdRoute::Direct;
};

/// Thin SVD. Throws ConvergenceFailure if the kernel does not converge.
PodResult pod_svd(const SnapshotMatrix& m, SvdRoute route = SvdRoute::Auto, bool with_modes = true);

/// sum_{j<=k} s_j^2 / sum_j s_j^2; 0 when the total energy is 0. Throws Index
/// unless 0 <= k <= number of singular values.
double cef(const PodResult& r, int k);

/// Minimal k with cef(k) >= threshold; 0 for zero-energy data.
int k_at(const PodResult& r, double threshold = 0.95);

/// Relative Frobenius error of projecting the snapshots onto the first k modes.
double truncation_error(const SnapshotMatrix& m, const PodResult& r, int k);

}  // namespace khe
