#include "khe/gas.hpp"

#include <sstream>

namespace khe {

namespace {

[[noreturn]] void non_physical(double rho, double p) {
  std::ostringstream os;
  os << "rho=" << rho << " p=" << p;
  throw Error(ErrorKind::NonPhysicalState, os.str());
}

}  // namespace

GasParams::GasParams(double gamma) : gamma_(gamma) {
  if (!(gamma > 1.0 && gamma <= 5.0 / 3.0)) {
    throw Error(ErrorKind::Config, "gamma must lie in (1, 5/3]");
  }
}

double pressure(const ConservedState& U, const GasParams& g) {
  if (!(U.rho > 0.0)) non_physical(U.rho, 0.0);
  const double kinetic = 0.5 * (U.mx * U.mx + U.my * U.my) / U.rho;
  const double p = (g.gamma() - 1.0) * (U.E - kinetic);
  if (!(p > 0.0)) non_physical(U.rho, p);
  return p;
}

PrimitiveState cons_to_prim(const ConservedState& U, const GasParams& g) {
  const double p = pressure(U, g);
  return {U.rho, U.mx / U.rho, U.my / U.rho, p};
}

ConservedState prim_to_cons(const PrimitiveState& W, const GasParams& g) {
  if (!(W.rho > 0.0) || !(W.p > 0.0)) non_physical(W.rho, W.p);
  const double mx = W.rho * W.u;
  const double my = W.rho * W.v;
  const double E = W.p * g.c_v() + 0.5 * W.rho * (W.u * W.u + W.v * W.v);
  return {W.rho, mx, my, E};
}

double entropy_from_prim(double rho, double p, const GasParams& g) {
  if (!(rho > 0.0) || !(p > 0.0)) non_physical(rho, p);
  return g.c_v() * rho * (std::log(p) - g.gamma() * std::log(rho));
}

double entropy(const ConservedState& U, const GasParams& g) {
  return entropy_from_prim(U.rho, pressure(U, g), g);
}

double pressure_from_entropy(double rho, double S, const GasParams& g) {
  if (!(rho > 0.0)) throw Error(ErrorKind::Domain, "pressure_from_entropy requires rho > 0");
  return std::pow(rho, g.gamma()) * std::exp(S / (g.c_v() * rho));
}

double internal_energy_from_entropy(double rho, double S, const GasParams& g) {
  return g.c_v() * pressure_from_entropy(rho, S, g) / rho;
}

double sound_speed(double rho, double p, const GasParams& g) {
  return std::sqrt(g.gamma() * p / rho);
}

}  // namespace khe

#include "khe/mesh.hpp"

namespace khe {

WaveSpeeds max_wave_speeds(const ConservedField& field, const GasParams& g) {
  WaveSpeeds out;
  for (const State& s : field.states()) {
    const PrimitiveState w = cons_to_prim(ConservedState::from_array(s), g);
    const double c = sound_speed(w.rho, w.p, g);
    out.x = std::max(out.x, std::abs(w.u) + c);
    out.y = std::max(out.y, std::abs(w.v) + c);
  }
  return out;
}

}  // namespace khe
