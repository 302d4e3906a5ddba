#include "nnlci/conservation_law.hpp"

#include "nnlci/error.hpp"

#include <algorithm>
#include <cmath>

namespace nnlci {

void ConservationLaw::to_primitive(const double* u, double* w) const {
  std::copy_n(u, num_vars(), w);
}

void ConservationLaw::from_primitive(const double* w, double* u) const {
  std::copy_n(w, num_vars(), u);
}

namespace {

PrimitiveState unpack(const double* u, const GasModel& gas) {
  return cons_to_prim({u[0], u[1], u[2], u[3]}, gas);
}

}  // namespace

void EulerLaw::flux(int axis, const double* u, double* f) const {
  const double rho = u[0];
  const double vx = u[1] / rho;
  const double vy = u[2] / rho;
  const double p = (gas_.gamma - 1.0) * (u[3] - 0.5 * (u[1] * vx + u[2] * vy));
  const double vn = axis == 0 ? vx : vy;
  f[0] = u[1 + axis];
  f[1] = u[1] * vn;
  f[2] = u[2] * vn;
  f[1 + axis] += p;
  f[3] = vn * (u[3] + p);
}

std::pair<double, double> EulerLaw::wave_speeds(int axis, const double* u) const {
  const PrimitiveState s = unpack(u, gas_);
  const double vn = axis == 0 ? s.u : s.v;
  const double c = sound_speed(s, gas_);
  return {vn - c, vn + c};
}

double EulerLaw::max_speed(const double* u) const {
  return max_wave_speed(unpack(u, gas_), gas_);
}

void EulerLaw::to_primitive(const double* u, double* w) const {
  const PrimitiveState s = unpack(u, gas_);
  w[0] = s.rho;
  w[1] = s.u;
  w[2] = s.v;
  w[3] = s.p;
}

void EulerLaw::from_primitive(const double* w, double* u) const {
  const ConservativeState c = prim_to_cons({w[0], w[1], w[2], w[3]}, gas_);
  u[0] = c.rho;
  u[1] = c.mx;
  u[2] = c.my;
  u[3] = c.E;
}

void EulerLaw::check(const double* u) const { (void)unpack(u, gas_); }

double LinearAdvection::max_speed(const double*) const {
  return std::max(std::abs(a_[0]), std::abs(a_[1]));
}

double Burgers::max_speed(const double* u) const { return std::abs(u[0]); }

}  // namespace nnlci
