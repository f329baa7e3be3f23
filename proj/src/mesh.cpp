#include "khe/mesh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "khe/text.hpp"

namespace khe {

MeshHierarchy::MeshHierarchy(int m0, int levels) : m0_(m0), levels_(levels) {
  if (m0 < 0) throw Error(ErrorKind::Config, "m0 must be >= 0");
  if (levels < 1) throw Error(ErrorKind::Config, "number of levels M must be >= 1");
  if (m0 + levels > 24) throw Error(ErrorKind::Config, "hierarchy too large");
}

int MeshHierarchy::cells(int level) const {
  if (level < 1 || level > levels_) {
    throw Error(ErrorKind::HierarchyMismatch, "level " + std::to_string(level) + " outside 1.." +
                                                  std::to_string(levels_));
  }
  return (1 << (level - 1)) * ((1 << (m0_ + 1)) - 1);
}

std::vector<int> MeshHierarchy::cell_counts() const {
  std::vector<int> out;
  for (int m = 1; m <= levels_; ++m) out.push_back(cells(m));
  return out;
}

MeshHierarchy build_hierarchy(int m0, int levels) { return MeshHierarchy(m0, levels); }

int coincident_index(int j, int level, int target_level) {
  if (target_level < level) throw Error(ErrorKind::HierarchyMismatch, "target level is coarser");
  return j << (target_level - level);
}

std::vector<double>& GridField::add(const std::string& name) {
  return add(name, std::vector<double>(size(), 0.0));
}

std::vector<double>& GridField::add(const std::string& name, std::vector<double> values) {
  if (values.size() != size()) {
    throw Error(ErrorKind::Shape, "component '" + name + "' has " + std::to_string(values.size()) +
                                      " values, expected " + std::to_string(size()));
  }
  for (auto& [n, v] : components_) {
    if (n == name) {
      v = std::move(values);
      return v;
    }
  }
  components_.emplace_back(name, std::move(values));
  return components_.back().second;
}

bool GridField::has(const std::string& name) const {
  return std::any_of(components_.begin(), components_.end(),
                     [&](const auto& c) { return c.first == name; });
}

const std::vector<double>& GridField::get(const std::string& name) const {
  for (const auto& [n, v] : components_) {
    if (n == name) return v;
  }
  throw Error(ErrorKind::Shape, "missing component '" + name + "'");
}

std::vector<double>& GridField::get(const std::string& name) {
  return const_cast<std::vector<double>&>(std::as_const(*this).get(name));
}

std::vector<std::string> GridField::names() const {
  std::vector<std::string> out;
  for (const auto& c : components_) out.push_back(c.first);
  return out;
}

double GridField::at(const std::string& name, int j, int k) const {
  const int jj = ((j % n_) + n_) % n_;
  const int kk = ((k % n_) + n_) % n_;
  return get(name)[static_cast<std::size_t>(kk) * n_ + jj];
}

GridField ConservedField::to_grid_field(const GasParams& g) const {
  GridField f(level_, n_);
  auto& rho = f.add("rho");
  auto& mx = f.add("m_x");
  auto& my = f.add("m_y");
  auto& E = f.add("E");
  auto& S = f.add("S");
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const State& s = states_[i];
    rho[i] = s[0];
    mx[i] = s[1];
    my[i] = s[2];
    E[i] = s[3];
    S[i] = entropy(ConservedState::from_array(s), g);
  }
  return f;
}

ConservedField ConservedField::from_grid_field(const GridField& f) {
  ConservedField out(f.level(), f.n());
  const auto& rho = f.get("rho");
  const auto& mx = f.get("m_x");
  const auto& my = f.get("m_y");
  const auto& E = f.get("E");
  for (std::size_t i = 0; i < out.states_.size(); ++i) out.states_[i] = {rho[i], mx[i], my[i], E[i]};
  return out;
}

double l1_norm(std::span<const double> values, int n) {
  if (n <= 0 || values.size() != static_cast<std::size_t>(n) * n) {
    throw Error(ErrorKind::Shape, "l1_norm: component length does not match N*N");
  }
  double sum = 0.0;
  for (double v : values) sum += std::abs(v);
  const double h = 1.0 / n;
  return sum * h * h;
}

double l1_norm(const GridField& field, const std::string& name) {
  return l1_norm(field.get(name), field.n());
}

double integral(std::span<const double> values, int n) {
  if (n <= 0 || values.size() != static_cast<std::size_t>(n) * n) {
    throw Error(ErrorKind::Shape, "integral: component length does not match N*N");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  const double h = 1.0 / n;
  return sum * h * h;
}

namespace {

constexpr char kMagic[4] = {'K', 'H', 'E', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  os.write(b, 4);
}

void put_f64(std::ostream& os, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  os.write(b, 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw Error(ErrorKind::Io, "truncated field file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error(ErrorKind::Io, "truncated field file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_grid_field(const GridField& field, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(field.level()));
  put_u32(os, static_cast<std::uint32_t>(field.n()));
  put_u32(os, static_cast<std::uint32_t>(field.components().size()));
  for (const auto& [name, values] : field.components()) {
    put_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (const auto& [name, values] : field.components()) {
    for (double v : values) put_f64(os, v);
  }
  if (!os) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

GridField read_grid_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    throw Error(ErrorKind::Io, path.string() + " is not a KHE1 field file");
  }
  const auto level = static_cast<int>(get_u32(is));
  const auto n = static_cast<int>(get_u32(is));
  const auto count = get_u32(is);
  std::vector<std::string> names;
  for (std::uint32_t c = 0; c < count; ++c) {
    const auto len = get_u32(is);
    std::string name(len, '\0');
    if (!is.read(name.data(), len)) throw Error(ErrorKind::Io, "truncated field file");
    names.push_back(std::move(name));
  }
  GridField field(level, n);
  for (const auto& name : names) {
    std::vector<double> values(field.size());
    for (double& v : values) v = get_f64(is);
    field.add(name, std::move(values));
  }
  return field;
}

void write_grid_csv(const GridField& field, const std::string& name, const std::filesystem::path& path) {
  const auto& values = field.get(name);
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  os << "x,y,value\n";
  const int n = field.n();
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      os << fmt_double(static_cast<double>(j) / n) << ',' << fmt_double(static_cast<double>(k) / n)
         << ',' << fmt_double(values[static_cast<std::size_t>(k) * n + j]) << '\n';
    }
  }
}

}  // namespace khe
