#pragma once

#include <array>
#include <span>
#include <vector>

#include "khe/mesh.hpp"

namespace khe {

enum class CwenoMode { Nonlinear, Linear };

/// Seventh-order CWENO interpolation settings. The nonlinear blend combines
/// one degree-6 central polynomial with the cubic interpolants on every
/// 4-point sub-stencil that contains the target node; `central_weight` is the
/// linear weight of the central part and the cubics share the remainder.
struct CwenoConfig {
  double eps = 1e-12;
  double power = 2.0;
  CwenoMode mode = CwenoMode::Nonlinear;
  double central_weight = 0.6;

  void validate() const;
};

/// Degree <= 6 polynomial in the local coordinate t = (xi - xi_l) / h.
using LocalPoly = std::array<double, 7>;

double eval_local(const LocalPoly& p, double t);

/// Piecewise polynomial over uniform nodes xi_l = origin + l h (l = 0..L-1,
/// zero-based). Piece l is valid on [xi_{l-1/2}, xi_{l+1/2}] clipped to
/// [xi_0, xi_{L-1}].
class PiecewisePoly {
 public:
  PiecewisePoly(double origin, double spacing, std::vector<LocalPoly> pieces)
      : origin_(origin), h_(spacing), pieces_(std::move(pieces)) {}

  std::size_t size() const noexcept { return pieces_.size(); }
  double origin() const noexcept { return origin_; }
  double spacing() const noexcept { return h_; }
  double node(std::size_t l) const { return origin_ + static_cast<double>(l) * h_; }
  double lower() const noexcept { return origin_; }
  double upper() const { return node(pieces_.size() - 1); }
  const LocalPoly& piece(std::size_t l) const { return pieces_.at(l); }

 private:
  double origin_;
  double h_;
  std::vector<LocalPoly> pieces_;
};

/// Builds the CWENO7 interpolant of samples at L >= 7 uniform nodes on
/// [lower, upper]. Pieces within three nodes of either end use the shifted
/// one-sided 7-point stencil.
PiecewisePoly cweno7_build(std::span<const double> samples, double lower, double upper,
                           const CwenoConfig& cfg = {});

/// Same, with explicit nodes that are checked for uniform spacing.
PiecewisePoly cweno7_build(std::span<const double> samples, std::span<const double> nodes,
                           const CwenoConfig& cfg = {});

/// Evaluates the piece whose cell contains xi; a point on a cell interface
/// belongs to the left cell.
double poly_eval(const PiecewisePoly& pp, double xi);

/// Periodic CWENO7 pieces for samples on a uniform periodic grid (one per node).
std::vector<LocalPoly> cweno7_periodic_pieces(std::span<const double> samples, const CwenoConfig& cfg);

/// Doubles the resolution of periodic samples: fine[2j] = coarse[j], and
/// fine[2j+1] is the average of the two CWENO7 pieces meeting at the midpoint.
std::vector<double> refine_1d(std::span<const double> coarse, const CwenoConfig& cfg = {});

/// Projects every component of a level-m field to `target_level` by repeated
/// dimension-by-dimension doubling (x rows first, then y columns).
GridField refine_2d(const GridField& field, int target_level, const CwenoConfig& cfg = {});

enum class WeightKind { Uniform, Gaussian };

/// Probability density of the random parameter. Only the uniform density
/// 1 / (b - a) on [a, b] is supported by the quadrature.
struct Weight {
  WeightKind kind = WeightKind::Uniform;
  double a = -1.0;
  double b = 1.0;
};

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and standard deviation of the piecewise polynomial against the
/// weight, integrated piece by piece with 7-point Gauss-Legendre rules.
Moments quadrature_moments(const PiecewisePoly& pp, const Weight& weight);

}  // namespace khe
