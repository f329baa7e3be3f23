#include "khe/pod.hpp"

#include <algorithm>
#include <cmath>

#include "khe/error.hpp"

namespace khe {

SnapshotMatrix center_snapshots(const std::vector<std::span<const double>>& snapshots, std::string tag) {
  const std::size_t L = snapshots.size();
  if (L < 2) throw Error(ErrorKind::Shape, "POD needs at least two snapshots");
  const std::size_t rows = snapshots[0].size();
  for (const auto& s : snapshots)
    if (s.size() != rows) throw Error(ErrorKind::Shape, "snapshots differ in size");
  SnapshotMatrix m;
  m.tag = std::move(tag);
  m.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(L));
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t i = 0; i < rows; ++i) m.data(i, l) = snapshots[l][i];
  // Mean taken relative to the first snapshot, so identical snapshots center
  // to exact zeros.
  const Eigen::VectorXd pivot = m.data.col(0);
  m.data.colwise() -= pivot;
  const Eigen::VectorXd shift = m.data.rowwise().mean();
  m.data.colwise() -= shift;
  return m;
}

namespace {

PodResult direct_svd(const Eigen::MatrixXd& a, bool with_modes) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd;
  svd.compute(a, with_modes ? Eigen::ComputeThinU : 0);
  if (svd.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "SVD did not converge");
  PodResult r;
  r.route = SvdRoute::Direct;
  const Eigen::VectorXd& sv = svd.singularValues();
  r.s.assign(sv.data(), sv.data() + sv.size());
  if (with_modes) r.modes = svd.matrixU();
  return r;
}

PodResult gram_svd(const Eigen::MatrixXd& a, bool with_modes) {
  const Eigen::MatrixXd g = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "Gram eigensolver did not converge");
  const Eigen::Index L = g.rows();
  PodResult r;
  r.route = SvdRoute::Gram;
  r.s.resize(static_cast<std::size_t>(L));
  Eigen::MatrixXd v(L, L);
  for (Eigen::Index j = 0; j < L; ++j) {
    const Eigen::Index src = L - 1 - j;  // eigenvalues come in ascending order
    r.s[j] = std::sqrt(std::max(eig.eigenvalues()(src), 0.0));
    v.col(j) = eig.eigenvectors().col(src);
  }
  if (with_modes) {
    const Eigen::Index k = std::min(L, a.rows());
    // Orthonormalize A V; columns keep the sign of A v_j.
    const Eigen::MatrixXd av = a * v.leftCols(k);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(av);
    r.modes = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) {
      if (r.modes.col(j).dot(av.col(j)) < 0.0) r.modes.col(j) *= -1.0;
    }
  }
  return r;
}

}  // namespace

PodResult pod_svd(const SnapshotMatrix& m, SvdRoute route, bool with_modes) {
  const Eigen::MatrixXd& a = m.data;
  if (a.size() == 0) throw Error(ErrorKind::Shape, "empty snapshot matrix");
  if (!a.allFinite()) throw Error(ErrorKind::Domain, "snapshot matrix has non-finite entries");
  if (route == SvdRoute::Auto) route = a.rows() > 8 * a.cols() ? SvdRoute::Gram : SvdRoute::Direct;
  PodResult r = route == SvdRoute::Gram ? gram_svd(a, with_modes) : direct_svd(a, with_modes);
  std::sort(r.s.begin(), r.s.end(), std::greater<>());
  return r;
}

double cef(const PodResult& r, int k) {
  if (k < 0 || k > static_cast<int>(r.s.size())) throw Error(ErrorKind::Index, "CEF index out of range");
  double total = 0.0, partial = 0.0;
  for (std::size_t j = 0; j < r.s.size(); ++j) {
    total += r.s[j] * r.s[j];
    if (static_cast<int>(j) < k) partial = total;
  }
  if (total == 0.0) return 0.0;
  return partial / total;
}

int k_at(const PodResult& r, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw Error(ErrorKind::Domain, "threshold must lie in (0, 1]");
  double total = 0.0;
  for (double v : r.s) total += v * v;
  if (total == 0.0) return 0;
  double partial = 0.0;
  for (std::size_t j = 0; j < r.s.size(); ++j) {
    partial += r.s[j] * r.s[j];
    if (partial / total >= threshold) return static_cast<int>(j) + 1;
  }
  return static_cast<int>(r.s.size());
}

double truncation_error(const SnapshotMatrix& m, const PodResult& r, int k) {
  if (k < 0 || k > r.modes.cols()) throw Error(ErrorKind::Index, "mode count out of range");
  const double norm = m.data.norm();
  if (norm == 0.0) return 0.0;
  const Eigen::MatrixXd w = r.modes.leftCols(k);
  return (m.data - w * (w.transpose() * m.data)).norm() / norm;
}

}  // namespace khe
