#pragma once

#include <array>

namespace nnlci {

/// Pointwise gas state in primitive variables. `v` is zero in 1D.
struct PrimitiveState {
  double rho = 1.0;
  double u = 0.0;
  double v = 0.0;
  double p = 1.0;

  bool operator==(const PrimitiveState&) const = default;
};

/// Conserved variables (rho, rho*u, rho*v, E).
struct ConservativeState {
  double rho = 1.0;
  double mx = 0.0;
  double my = 0.0;
  double E = 2.5;

  bool operator==(const ConservativeState&) const = default;
};

struct GasModel {
  double gamma = 1.4;
};

using FluxVector = std::array<double, 4>;

/// Throws NonPhysicalState unless rho > 0 and p > 0.
void validate(const PrimitiveState& s);
bool is_physical(const PrimitiveState& s);

ConservativeState prim_to_cons(const PrimitiveState& s, const GasModel& g);

/// Throws NonPhysicalState when the recovered density or pressure is not
/// strictly positive.
PrimitiveState cons_to_prim(const ConservativeState& c, const GasModel& g);

FluxVector flux_x(const PrimitiveState& s, const GasModel& g);
FluxVector flux_y(const PrimitiveState& s, const GasModel& g);

double sound_speed(const PrimitiveState& s, const GasModel& g);

/// max(|u|, |v|) + c.
double max_wave_speed(const PrimitiveState& s, const GasModel& g);

}  // namespace nnlci
