#pragma once

#include "nnlci/euler.hpp"

namespace nnlci {

struct StarRegion {
  double p = 0.0;
  double u = 0.0;
  int iterations = 0;
  /// |f_L(p*) + f_R(p*) + u_R - u_L| at the returned pressure.
  double residual = 0.0;
};

/// Pressure and velocity between the two nonlinear waves of the 1D Riemann
/// problem, by Newton iteration on the pressure function (tolerance 1e-12).
/// Throws VacuumFormation when the data generate vacuum.
StarRegion solve_star_region(const PrimitiveState& left, const PrimitiveState& right,
                             const GasModel& g);

/// Self-similar exact solution sampled at x/t. The transverse velocity v is
/// carried passively across the contact.
PrimitiveState exact_riemann_1d(const PrimitiveState& left, const PrimitiveState& right,
                                const GasModel& g, double x_over_t);

}  // namespace nnlci
