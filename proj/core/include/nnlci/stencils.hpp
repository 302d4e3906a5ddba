#pragma once

#include "nnlci/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nnlci {

/// Which input construction produced a sample.
///   cg1d, cg1d_dt, cg2d : two grids (coarse + refined), same low-cost scheme
///   dc2d                : one grid, two diffusion coefficients
///   mixed               : any other pairing of two input sources
enum class Variant { cg1d, cg1d_dt, cg2d, dc2d, mixed };

std::string to_string(Variant v);
Variant parse_variant(const std::string& text);

struct StencilLocation {
  int i = 0;
  int j = 0;
  int n = 0;
  bool operator==(const StencilLocation&) const = default;
};

struct StencilSample {
  std::vector<double> input;
  std::vector<double> target;
  StencilLocation location;
  Variant variant = Variant::cg1d;

  bool operator==(const StencilSample&) const = default;
};

/// Primitive variables fed to the network: (rho, u, p) in 1D and
/// (rho, u, v, p) in 2D.
int euler_var_count(int dim);
double primitive_component(const PrimitiveState& s, int var, int dim);
void set_primitive_component(PrimitiveState& s, int var, int dim, double value);

/// One low-cost (or high-order) run seen from the prediction grid: the
/// sampled levels are `curr` and `prev`, which sits `stride` steps earlier,
/// and prediction node i maps to node stride*i of the run's grid.
struct InputHalf {
  const FieldSnapshot* prev = nullptr;
  const FieldSnapshot* curr = nullptr;
  int stride = 1;
};

/// Points per variable contributed by one half: 4 in 1D, 10 in 2D.
int half_points(int dim);

struct SpaceTimePoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  bool operator==(const SpaceTimePoint&) const = default;
};

using PerVariable = std::vector<std::vector<double>>;

/// Core assembly shared by every variant. For each primitive variable: the
/// 3 (1D) or 3x3 (2D, x-index outer) block around node (i, j) at the earlier
/// level followed by the centre value at the later level, first for half
/// `a`, then for half `b`. Throws OutOfRange at boundary nodes and
/// GridMismatch when the halves do not describe the same space-time points.
PerVariable assemble_halves(const InputHalf& a, const InputHalf& b, int i, int j = 0);

/// Physical coordinates of the entries of one variable block, in the same
/// order as assemble_halves.
std::vector<SpaceTimePoint> stencil_coordinates(const InputHalf& a, const InputHalf& b, int i,
                                                int j = 0);

PerVariable assemble_2cgnn_1d(const FieldSnapshot& coarse_prev, const FieldSnapshot& coarse_curr,
                              const FieldSnapshot& fine_prev, const FieldSnapshot& fine_curr,
                              int i);

/// The 1D two-grid input with dt appended once after all variables.
std::vector<double> assemble_2cgnn_1d_dt(const FieldSnapshot& coarse_prev,
                                         const FieldSnapshot& coarse_curr,
                                         const FieldSnapshot& fine_prev,
                                         const FieldSnapshot& fine_curr, int i, double dt);

PerVariable assemble_2cgnn_2d(const FieldSnapshot& coarse_prev, const FieldSnapshot& coarse_curr,
                              const FieldSnapshot& fine_prev, const FieldSnapshot& fine_curr,
                              int i, int j);

/// Single-grid input from two runs (alpha = dx and alpha = c dx).
PerVariable assemble_2dcnn_2d(const FieldSnapshot& u_prev, const FieldSnapshot& u_curr,
                              const FieldSnapshot& v_prev, const FieldSnapshot& v_curr, int i,
                              int j);

/// Flattens per-variable vectors in variable order; `dt` is appended once.
/// Throws LengthMismatch if the variable vectors differ in length.
std::vector<double> concat_euler_input(const PerVariable& vars, std::optional<double> dt = {});

/// Prediction-grid extent implied by a half (cells along each axis).
GridSpec prediction_grid(const InputHalf& h);

/// Every interior node of the prediction grid, x fastest. Targets are read
/// from `reference` (a nodal field on the prediction grid) when given.
std::vector<StencilSample> assemble_all(const InputHalf& a, const InputHalf& b, Variant variant,
                                        const FieldSnapshot* reference = nullptr,
                                        std::optional<double> dt = {});

}  // namespace nnlci
