#pragma once

#include "nnlci/conservation_law.hpp"
#include "nnlci/grid.hpp"

#include <functional>
#include <string>

namespace nnlci {

enum class SchemeKind { leapfrog_diffusion, rusanov };

std::string to_string(SchemeKind k);
SchemeKind parse_scheme_kind(const std::string& text);

struct SchemeConfig {
  SchemeKind kind = SchemeKind::leapfrog_diffusion;
  /// Diffusion coefficient alpha = alpha_factor * dx.
  double alpha_factor = 1.0;
  /// Number of equal sub-steps the diffusion stage is split into (1 or 2).
  int substeps = 1;

  void validate() const;
};

/// Explicit stability bound on alpha*dt/dx^2 for the diffusion stage
/// (1/2 in 1D, 1/4 for the 2D five-point Laplacian).
double diffusion_limit(int dim);

/// alpha*dt/dx^2 for one full diffusion stage.
double diffusion_number(const GridSpec& g, const SchemeConfig& cfg);

/// Values above this magnitude are treated as a blown-up run.
inline constexpr double kStabilityGuard = 1e8;

// Conserved-array kernels. Inputs must carry filled ghosts; outputs are
// returned with ghosts filled for g.boundary.

StateArray leapfrog_diffusion_step(const ConservationLaw& law, const GridSpec& g,
                                   const StateArray& prev, const StateArray& curr,
                                   const SchemeConfig& cfg);

/// Leapfrog transport stage only: U~ = U^{n-1} - dt/dx (f_{i+1} - f_{i-1}) - ...
StateArray leapfrog_stage(const ConservationLaw& law, const GridSpec& g, const StateArray& prev,
                          const StateArray& curr);

/// Explicit diffusion U <- U + (alpha dt / dx^2) Lap U, repeated `substeps`
/// times with dt/substeps each.
void diffusion_stage(const ConservationLaw& law, const GridSpec& g, StateArray& u,
                     const SchemeConfig& cfg);

/// One global Lax-Friedrichs step; bootstraps the three-level leapfrog.
StateArray lax_friedrichs_step(const ConservationLaw& law, const GridSpec& g,
                               const StateArray& curr);

/// First-order Rusanov (local Lax-Friedrichs) step.
StateArray rusanov_step(const ConservationLaw& law, const GridSpec& g, const StateArray& curr);

/// Throws NonPhysicalState (with the point and step index) if a state is
/// rejected by the law or exceeds kStabilityGuard.
void check_states(const ConservationLaw& law, const StateArray& a, int step);

// Euler snapshot wrappers.

FieldSnapshot leapfrog_diffusion_step_1d(const FieldSnapshot& prev, const FieldSnapshot& curr,
                                         const SchemeConfig& cfg, const GasModel& gas = {});
FieldSnapshot leapfrog_diffusion_step_2d(const FieldSnapshot& prev, const FieldSnapshot& curr,
                                         const SchemeConfig& cfg, const GasModel& gas = {});
FieldSnapshot rusanov_step_1d(const FieldSnapshot& curr, const GasModel& gas = {});
FieldSnapshot rusanov_step_2d(const FieldSnapshot& curr, const GasModel& gas = {});

struct EvolveOptions {
  /// The returned `prev` level is `lag` steps before the final one.
  int lag = 1;
  GasModel gas{};
  /// When positive, `dump` receives every dump_every-th level (and level 0).
  int dump_every = 0;
  std::function<void(const FieldSnapshot&)> dump;
};

struct EvolveResult {
  FieldSnapshot prev;
  FieldSnapshot curr;
};

/// Runs the low-cost scheme from `ic` to t_final. The step size is ic.grid.dt,
/// lowered if needed so that t_final is an integer number of steps; the
/// snapshots carry the grid actually used.
EvolveResult evolve(const FieldSnapshot& ic, const SchemeConfig& cfg, double t_final,
                    const EvolveOptions& opts = {});

struct ConservedLevels {
  GridSpec grid;
  StateArray prev;
  StateArray curr;
  int prev_index = 0;
  int curr_index = 0;
};

ConservedLevels evolve_conserved(const ConservationLaw& law, const GridSpec& g,
                                 const StateArray& ic, const SchemeConfig& cfg, double t_final,
                                 int lag = 1);

struct DualDiffusionResult {
  EvolveResult base;     // alpha = alpha_factor * dx
  EvolveResult boosted;  // alpha = c * alpha_factor * dx
  SchemeConfig boosted_cfg;
};

/// Two leapfrog-diffusion runs on the same grid and step size whose
/// diffusion coefficients differ by the ratio c >= 1. The boosted run splits
/// its diffusion stage into two half steps when one full step would exceed
/// diffusion_limit.
DualDiffusionResult dual_diffusion_evolve(const FieldSnapshot& ic, double c, double t_final,
                                          const SchemeConfig& base = {},
                                          const EvolveOptions& opts = {});

}  // namespace nnlci
