#pragma once

#include "nnlci/euler.hpp"

#include <string>
#include <utility>

namespace nnlci {

/// A system of conservation laws U_t + f(U)_x + g(U)_y = 0 as seen by the
/// numerical schemes. States are passed as raw arrays of num_vars() doubles.
class ConservationLaw {
 public:
  virtual ~ConservationLaw() = default;

  virtual int num_vars() const = 0;
  virtual std::string name() const = 0;

  /// axis 0 evaluates f, axis 1 evaluates g.
  virtual void flux(int axis, const double* u, double* f) const = 0;

  /// Smallest and largest characteristic speed along `axis`.
  virtual std::pair<double, double> wave_speeds(int axis, const double* u) const = 0;

  /// Bound on |characteristic speed| over both axes.
  virtual double max_speed(const double* u) const = 0;

  /// Variables used for limited reconstruction. Identity unless overridden.
  virtual void to_primitive(const double* u, double* w) const;
  virtual void from_primitive(const double* w, double* u) const;

  /// Apply the wall reflection for a boundary normal to `axis`.
  virtual void reflect(int /*axis*/, double* /*u*/) const {}

  /// Throws NonPhysicalState for states the law cannot represent.
  virtual void check(const double* /*u*/) const {}
};

/// Euler equations carried with four conserved variables (rho, rho u, rho v, E)
/// in both 1D and 2D; in 1D the y-momentum stays identically zero.
class EulerLaw final : public ConservationLaw {
 public:
  explicit EulerLaw(GasModel gas = {}) : gas_(gas) {}

  int num_vars() const override { return 4; }
  std::string name() const override { return "euler"; }
  void flux(int axis, const double* u, double* f) const override;
  std::pair<double, double> wave_speeds(int axis, const double* u) const override;
  double max_speed(const double* u) const override;
  void to_primitive(const double* u, double* w) const override;
  void from_primitive(const double* w, double* u) const override;
  void reflect(int axis, double* u) const override { u[1 + axis] = -u[1 + axis]; }
  void check(const double* u) const override;

  const GasModel& gas() const { return gas_; }

 private:
  GasModel gas_;
};

/// U_t + a U_x + b U_y = 0.
class LinearAdvection final : public ConservationLaw {
 public:
  explicit LinearAdvection(double ax = 1.0, double ay = 0.0) : a_{ax, ay} {}

  int num_vars() const override { return 1; }
  std::string name() const override { return "linear_advection"; }
  void flux(int axis, const double* u, double* f) const override { f[0] = a_[axis] * u[0]; }
  std::pair<double, double> wave_speeds(int axis, const double*) const override {
    return {a_[axis], a_[axis]};
  }
  double max_speed(const double*) const override;

 private:
  double a_[2];
};

/// Inviscid Burgers, f(U) = g(U) = U^2/2.
class Burgers final : public ConservationLaw {
 public:
  int num_vars() const override { return 1; }
  std::string name() const override { return "burgers"; }
  void flux(int, const double* u, double* f) const override { f[0] = 0.5 * u[0] * u[0]; }
  std::pair<double, double> wave_speeds(int, const double* u) const override {
    return {u[0], u[0]};
  }
  double max_speed(const double* u) const override;
};

}  // namespace nnlci
