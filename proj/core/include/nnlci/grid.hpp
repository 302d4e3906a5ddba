#pragma once

#include "nnlci/conservation_law.hpp"
#include "nnlci/euler.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nnlci {

enum class Boundary { outflow, reflective, periodic };

std::string to_string(Boundary b);
Boundary parse_boundary(std::string_view text);

/// Uniform 1D/2D grid. `nx`/`ny` count cells; the nodal schemes store point
/// values at x_i = x_lo + i*dx for i = 0..nx (nodes on both walls).
struct GridSpec {
  int dim = 1;
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_lo = 0.0;
  double y_hi = 1.0;
  int nx = 0;
  int ny = 0;
  double dt = 0.0;
  Boundary boundary = Boundary::outflow;

  double dx() const { return (x_hi - x_lo) / nx; }
  double dy() const { return dim == 2 ? (y_hi - y_lo) / ny : dx(); }
  int nodes_x() const { return nx + 1; }
  int nodes_y() const { return dim == 2 ? ny + 1 : 1; }
  double x(int i) const { return x_lo + i * dx(); }
  double y(int j) const { return dim == 2 ? y_lo + j * dy() : 0.0; }

  /// Throws GridMismatch on a malformed spec (dx <= 0, dx != dy, dt < 0).
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

/// Halves dx (and dy) and dt; bounds and boundary kind are kept.
GridSpec refine(const GridSpec& g);

/// Index of coarse node `i_coarse` on the once-refined grid. Throws
/// OutOfRange when i_coarse is outside [0, coarse_cells].
int coarse_to_fine_index(int i_coarse, int coarse_cells);

struct SpaceTimeIndex {
  int i = 0;
  int j = 0;
  int n = 0;
  bool operator==(const SpaceTimeIndex&) const = default;
};

SpaceTimeIndex coarse_to_fine_index(const SpaceTimeIndex& coarse, const GridSpec& g);

/// Chooses dt' <= dt such that t_final is an integer number of steps.
GridSpec align_timestep(GridSpec g, double t_final);

/// Number of steps of size g.dt that reach t_final (after alignment).
int step_count(const GridSpec& g, double t_final);

enum class Layout { node, cell };

/// Dense array of `nvars` doubles per point with a ghost frame of width
/// `ghost` on every side (x only in 1D). Point (i, j) for i in
/// [-ghost, nx + ghost) is stored interleaved by variable.
class StateArray {
 public:
  StateArray() = default;
  StateArray(int nvars, int dim, int nx, int ny, int ghost, Layout layout);

  static StateArray nodes(const GridSpec& g, int nvars, int ghost = 1);
  static StateArray cells(const GridSpec& g, int nvars, int ghost = 2);

  int nvars() const { return nvars_; }
  int dim() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int ghost() const { return ghost_; }
  Layout layout() const { return layout_; }

  double* at(int i, int j = 0) { return data_.data() + offset(i, j); }
  const double* at(int i, int j = 0) const { return data_.data() + offset(i, j); }

  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }

  /// Sum of variable k over the points that represent distinct physical
  /// locations (the duplicated periodic node is skipped when `periodic`).
  double interior_sum(int k, bool periodic = false) const;

  /// Largest |value| over interior points.
  double max_abs() const;

  bool same_shape(const StateArray& o) const {
    return nvars_ == o.nvars_ && dim_ == o.dim_ && nx_ == o.nx_ && ny_ == o.ny_ &&
           ghost_ == o.ghost_ && layout_ == o.layout_;
  }

 private:
  std::size_t offset(int i, int j) const {
    const int gy = dim_ == 2 ? ghost_ : 0;
    return (static_cast<std::size_t>(j + gy) * static_cast<std::size_t>(px_) +
            static_cast<std::size_t>(i + ghost_)) *
           static_cast<std::size_t>(nvars_);
  }

  int nvars_ = 0;
  int dim_ = 1;
  int nx_ = 0;
  int ny_ = 1;
  int ghost_ = 0;
  int px_ = 0;
  Layout layout_ = Layout::node;
  std::vector<double> data_;
};

/// Ghost filling: outflow copies the nearest interior point, reflective
/// mirrors across the wall and negates the normal momentum, periodic wraps.
void fill_ghosts(StateArray& a, Boundary b, const ConservationLaw& law);

/// All primitive values of one time level on one grid (one ghost layer).
struct FieldSnapshot {
  GridSpec grid;
  int time_index = 0;
  std::vector<PrimitiveState> values;

  FieldSnapshot() = default;
  FieldSnapshot(const GridSpec& g, int time_index, PrimitiveState fill = {});

  PrimitiveState& at(int i, int j = 0) { return values[index(i, j)]; }
  const PrimitiveState& at(int i, int j = 0) const { return values[index(i, j)]; }
  double time() const { return time_index * grid.dt; }

 private:
  std::size_t index(int i, int j) const {
    const int px = grid.nodes_x() + 2;
    const int gy = grid.dim == 2 ? 1 : 0;
    return static_cast<std::size_t>(j + gy) * static_cast<std::size_t>(px) +
           static_cast<std::size_t>(i + 1);
  }
};

void fill_ghosts(FieldSnapshot& f);

FieldSnapshot to_snapshot(const StateArray& cons, const GridSpec& g, int time_index,
                          const EulerLaw& law);
StateArray to_conserved(const FieldSnapshot& f, const EulerLaw& law);

/// dt = cfl * dx / S with S the largest max_wave_speed over the field's
/// nodes. Throws DegenerateField when S == 0.
double cfl_timestep(const FieldSnapshot& ic, double cfl, const GasModel& gas = {});

}  // namespace nnlci
