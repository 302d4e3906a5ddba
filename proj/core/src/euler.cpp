#include "nnlci/euler.hpp"

#include "nnlci/error.hpp"

#include <cmath>
#include <sstream>

namespace nnlci {

bool is_physical(const PrimitiveState& s) {
  return s.rho > 0.0 && s.p > 0.0 && std::isfinite(s.rho) && std::isfinite(s.p) &&
         std::isfinite(s.u) && std::isfinite(s.v);
}

void validate(const PrimitiveState& s) {
  if (!is_physical(s)) {
    std::ostringstream os;
    os << "non-physical primitive state (rho=" << s.rho << ", u=" << s.u << ", v=" << s.v
       << ", p=" << s.p << ")";
    throw NonPhysicalState(os.str());
  }
}

ConservativeState prim_to_cons(const PrimitiveState& s, const GasModel& g) {
  const double kinetic = 0.5 * s.rho * (s.u * s.u + s.v * s.v);
  return {s.rho, s.rho * s.u, s.rho * s.v, s.p / (g.gamma - 1.0) + kinetic};
}

PrimitiveState cons_to_prim(const ConservativeState& c, const GasModel& g) {
  if (!(c.rho > 0.0) || !std::isfinite(c.rho)) {
    std::ostringstream os;
    os << "non-positive density " << c.rho;
    throw NonPhysicalState(os.str());
  }
  const double u = c.mx / c.rho;
  const double v = c.my / c.rho;
  const double p = (g.gamma - 1.0) * (c.E - 0.5 * (c.mx * u + c.my * v));
  if (!(p > 0.0) || !std::isfinite(p)) {
    std::ostringstream os;
    os << "non-positive pressure " << p << " (rho=" << c.rho << ", E=" << c.E << ")";
    throw NonPhysicalState(os.str());
  }
  return {c.rho, u, v, p};
}

FluxVector flux_x(const PrimitiveState& s, const GasModel& g) {
  const double E = s.p / (g.gamma - 1.0) + 0.5 * s.rho * (s.u * s.u + s.v * s.v);
  const double mx = s.rho * s.u;
  return {mx, mx * s.u + s.p, mx * s.v, s.u * (E + s.p)};
}

FluxVector flux_y(const PrimitiveState& s, const GasModel& g) {
  const double E = s.p / (g.gamma - 1.0) + 0.5 * s.rho * (s.u * s.u + s.v * s.v);
  const double my = s.rho * s.v;
  return {my, my * s.u, my * s.v + s.p, s.v * (E + s.p)};
}

double sound_speed(const PrimitiveState& s, const GasModel& g) {
  return std::sqrt(g.gamma * s.p / s.rho);
}

double max_wave_speed(const PrimitiveState& s, const GasModel& g) {
  return std::max(std::abs(s.u), std::abs(s.v)) + sound_speed(s, g);
}

}  // namespace nnlci
