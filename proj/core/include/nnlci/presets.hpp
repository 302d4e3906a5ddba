#pragma once

#include "nnlci/euler.hpp"
#include "nnlci/grid.hpp"

#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace nnlci {

/// Axis-aligned box [x_min, x_max) x [y_min, y_max) carrying one constant
/// state. Unset bounds are infinite.
struct Region {
  double x_min = -std::numeric_limits<double>::infinity();
  double x_max = std::numeric_limits<double>::infinity();
  double y_min = -std::numeric_limits<double>::infinity();
  double y_max = std::numeric_limits<double>::infinity();
  PrimitiveState state;

  bool contains(double x, double y) const {
    return x >= x_min && x < x_max && y >= y_min && y < y_max;
  }
  bool operator==(const Region&) const = default;
};

/// Piecewise-constant initial value problem.
struct ICPreset {
  std::string name;
  int dim = 1;
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_lo = 0.0;
  double y_hi = 1.0;
  double t_final = 0.0;
  Boundary boundary = Boundary::outflow;
  std::vector<Region> regions;

  /// State of the region containing (x, y). Points on the upper domain edge
  /// belong to the region touching it from below.
  const PrimitiveState& state_at(double x, double y = 0.0) const;

  /// Throws ConfigError unless the regions tile the domain exactly once and
  /// every state is physical.
  void validate() const;

  /// Grid with `cells` cells per axis over the preset's domain (dt unset).
  GridSpec grid(int cells) const;

  bool operator==(const ICPreset&) const = default;
};

/// Preset text: top-level keys name, dim, x_lo, x_hi, y_lo, y_hi, t_final,
/// boundary, then one [region] block per state with optional x_min, x_max,
/// y_min, y_max and rho, u, v, p.
ICPreset parse_preset(std::string_view text, const std::string& origin = "<string>");
ICPreset load_preset(const std::filesystem::path& path);
std::string format_preset(const ICPreset& p);

/// Presets compiled into the library.
std::vector<std::string> builtin_preset_names();
ICPreset builtin_preset(const std::string& name);

/// A builtin name, or otherwise a path to a preset file.
ICPreset resolve_preset(const std::string& name_or_path);

/// Multiplies every nonzero primitive constant of every region by
/// (1 + delta). Throws OutOfRange unless |delta| < 0.5.
ICPreset perturb_ic(const ICPreset& p, double delta);

/// Point values of the preset at the nodes of `g` (ghosts filled).
FieldSnapshot initial_nodes(const ICPreset& p, const GridSpec& g);

/// Conserved cell averages on the cells of `g`, integrated with a
/// sub x sub midpoint rule per cell (ghost width 2, ghosts filled).
StateArray initial_cells(const ICPreset& p, const GridSpec& g, const GasModel& gas,
                         int sub = 8);

}  // namespace nnlci
