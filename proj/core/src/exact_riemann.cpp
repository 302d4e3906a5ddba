#include "nnlci/exact_riemann.hpp"

#include "nnlci/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nnlci {

namespace {

// Toro's pressure function f_K(p) and its derivative for one side.
void pressure_function(double p, const PrimitiveState& s, double c, const GasModel& g,
                       double& f, double& df) {
  const double gm = g.gamma;
  if (p > s.p) {
    const double a = 2.0 / ((gm + 1.0) * s.rho);
    const double b = (gm - 1.0) / (gm + 1.0) * s.p;
    const double q = std::sqrt(a / (p + b));
    f = (p - s.p) * q;
    df = q * (1.0 - 0.5 * (p - s.p) / (b + p));
  } else {
    const double ratio = p / s.p;
    f = 2.0 * c / (gm - 1.0) * (std::pow(ratio, (gm - 1.0) / (2.0 * gm)) - 1.0);
    df = 1.0 / (s.rho * c) * std::pow(ratio, -(gm + 1.0) / (2.0 * gm));
  }
}

double initial_pressure_guess(const PrimitiveState& l, const PrimitiveState& r, double cl,
                              double cr, const GasModel& g) {
  // Two-rarefaction approximation, always positive when no vacuum forms.
  const double z = (g.gamma - 1.0) / (2.0 * g.gamma);
  const double num = cl + cr - 0.5 * (g.gamma - 1.0) * (r.u - l.u);
  const double den = cl / std::pow(l.p, z) + cr / std::pow(r.p, z);
  return std::max(std::pow(num / den, 1.0 / z), 1e-14);
}

}  // namespace

StarRegion solve_star_region(const PrimitiveState& left, const PrimitiveState& right,
                             const GasModel& g) {
  validate(left);
  validate(right);
  const double cl = sound_speed(left, g);
  const double cr = sound_speed(right, g);
  if (2.0 / (g.gamma - 1.0) * (cl + cr) <= right.u - left.u) {
    throw VacuumFormation("Riemann data violate the pressure positivity condition");
  }
  const double du = right.u - left.u;
  double p = initial_pressure_guess(left, right, cl, cr, g);
  StarRegion out;
  double fl = 0.0, dfl = 0.0, fr = 0.0, dfr = 0.0;
  for (int it = 1; it <= 100; ++it) {
    pressure_function(p, left, cl, g, fl, dfl);
    pressure_function(p, right, cr, g, fr, dfr);
    double next = p - (fl + fr + du) / (dfl + dfr);
    if (next <= 0.0) next = 0.5 * p;
    const double change = 2.0 * std::abs(next - p) / (next + p);
    p = next;
    out.iterations = it;
    if (change < 1e-12) break;
  }
  pressure_function(p, left, cl, g, fl, dfl);
  pressure_function(p, right, cr, g, fr, dfr);
  out.p = p;
  out.u = 0.5 * (left.u + right.u + fr - fl);
  out.residual = std::abs(fl + fr + du);
  return out;
}

PrimitiveState exact_riemann_1d(const PrimitiveState& left, const PrimitiveState& right,
                                const GasModel& g, double s) {
  const StarRegion star = solve_star_region(left, right, g);
  const double gm = g.gamma;
  const double g1 = (gm - 1.0) / (gm + 1.0);
  const double cl = sound_speed(left, g);
  const double cr = sound_speed(right, g);
  const double pm = star.p;
  const double um = star.u;

  if (s <= um) {
    const PrimitiveState& k = left;
    if (pm > k.p) {
      const double ratio = pm / k.p;
      const double shock = k.u - cl * std::sqrt((gm + 1.0) / (2.0 * gm) * ratio +
                                                (gm - 1.0) / (2.0 * gm));
      if (s <= shock) return k;
      return {k.rho * (ratio + g1) / (ratio * g1 + 1.0), um, k.v, pm};
    }
    const double head = k.u - cl;
    const double cml = cl * std::pow(pm / k.p, (gm - 1.0) / (2.0 * gm));
    const double tail = um - cml;
    if (s <= head) return k;
    if (s >= tail) return {k.rho * std::pow(pm / k.p, 1.0 / gm), um, k.v, pm};
    const double c = 2.0 / (gm + 1.0) * (cl + 0.5 * (gm - 1.0) * (k.u - s));
    const double u = 2.0 / (gm + 1.0) * (cl + 0.5 * (gm - 1.0) * k.u + s);
    const double rho = k.rho * std::pow(c / cl, 2.0 / (gm - 1.0));
    return {rho, u, k.v, k.p * std::pow(c / cl, 2.0 * gm / (gm - 1.0))};
  }

  const PrimitiveState& k = right;
  if (pm > k.p) {
    const double ratio = pm / k.p;
    const double shock = k.u + cr * std::sqrt((gm + 1.0) / (2.0 * gm) * ratio +
                                              (gm - 1.0) / (2.0 * gm));
    if (s >= shock) return k;
    return {k.rho * (ratio + g1) / (ratio * g1 + 1.0), um, k.v, pm};
  }
  const double head = k.u + cr;
  const double cmr = cr * std::pow(pm / k.p, (gm - 1.0) / (2.0 * gm));
  const double tail = um + cmr;
  if (s >= head) return k;
  if (s <= tail) return {k.rho * std::pow(pm / k.p, 1.0 / gm), um, k.v, pm};
  const double c = 2.0 / (gm + 1.0) * (cr - 0.5 * (gm - 1.0) * (k.u - s));
  const double u = 2.0 / (gm + 1.0) * (-cr + 0.5 * (gm - 1.0) * k.u + s);
  const double rho = k.rho * std::pow(c / cr, 2.0 / (gm - 1.0));
  return {rho, u, k.v, k.p * std::pow(c / cr, 2.0 * gm / (gm - 1.0))};
}

}  // namespace nnlci
