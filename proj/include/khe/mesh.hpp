#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "khe/gas.hpp"

namespace khe {

/// Nested uniform periodic grids on the unit torus. Level m (1-based) has
/// N_m = 2^(m-1) (2^(m0+1) - 1) nodes per side at x_j = j / N_m, j = 0..N_m-1.
class MeshHierarchy {
 public:
  MeshHierarchy(int m0, int levels);

  int m0() const noexcept { return m0_; }
  int levels() const noexcept { return levels_; }
  int finest() const noexcept { return levels_; }

  int cells(int level) const;
  double spacing(int level) const { return 1.0 / cells(level); }
  double node(int level, int j) const { return static_cast<double>(j) / cells(level); }

  std::vector<int> cell_counts() const;

 private:
  int m0_;
  int levels_;
};

MeshHierarchy build_hierarchy(int m0, int levels);

/// Index of the node at `target_level` that coincides with node j of `level`.
int coincident_index(int j, int level, int target_level);

/// Named scalar node arrays on one N x N periodic grid, row-major with the
/// x index fastest: value(j, k) = data[k * N + j].
class GridField {
 public:
  GridField() = default;
  GridField(int level, int n) : level_(level), n_(n) {}

  int level() const noexcept { return level_; }
  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }

  std::vector<double>& add(const std::string& name);
  std::vector<double>& add(const std::string& name, std::vector<double> values);

  bool has(const std::string& name) const;
  const std::vector<double>& get(const std::string& name) const;
  std::vector<double>& get(const std::string& name);

  std::vector<std::string> names() const;
  const std::vector<std::pair<std::string, std::vector<double>>>& components() const {
    return components_;
  }

  double at(const std::string& name, int j, int k) const;

  friend bool operator==(const GridField&, const GridField&) = default;

 private:
  int level_ = 0;
  int n_ = 0;
  std::vector<std::pair<std::string, std::vector<double>>> components_;
};

/// Conserved variables on one grid, stored node-wise for the solver.
class ConservedField {
 public:
  ConservedField() = default;
  ConservedField(int level, int n) : level_(level), n_(n), states_(static_cast<std::size_t>(n) * n) {}

  int level() const noexcept { return level_; }
  int n() const noexcept { return n_; }

  State& operator()(int j, int k) { return states_[index(j, k)]; }
  const State& operator()(int j, int k) const { return states_[index(j, k)]; }

  std::vector<State>& states() noexcept { return states_; }
  const std::vector<State>& states() const noexcept { return states_; }

  /// Components rho, m_x, m_y, E and the recomputed total entropy S.
  GridField to_grid_field(const GasParams& g) const;
  static ConservedField from_grid_field(const GridField& f);

 private:
  std::size_t index(int j, int k) const {
    const int jj = ((j % n_) + n_) % n_;
    const int kk = ((k % n_) + n_) % n_;
    return static_cast<std::size_t>(kk) * n_ + jj;
  }

  int level_ = 0;
  int n_ = 0;
  std::vector<State> states_;
};

/// Grid-weighted discrete L1 norm: sum |v| dx dy over an N x N periodic grid.
double l1_norm(std::span<const double> values, int n);
double l1_norm(const GridField& field, const std::string& name);

/// Sum over nodes times dx dy (discrete integral over the torus).
double integral(std::span<const double> values, int n);

/// Binary layout (all little-endian): "KHE1", uint32 level, uint32 N,
/// uint32 component count, then per component uint32 name length + ASCII
/// name; then each component as N*N float64 values in row-major order.
void write_grid_field(const GridField& field, const std::filesystem::path& path);
GridField read_grid_field(const std::filesystem::path& path);

/// CSV with header `x,y,value` for a single component, one row per node.
void write_grid_csv(const GridField& field, const std::string& name, const std::filesystem::path& path);

}  // namespace khe
