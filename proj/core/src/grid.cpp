#include "nnlci/grid.hpp"

#include "nnlci/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nnlci {

std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::outflow:
      return "outflow";
    case Boundary::reflective:
      return "reflective";
    case Boundary::periodic:
      return "periodic";
  }
  return "outflow";
}

Boundary parse_boundary(std::string_view text) {
  if (text == "outflow") return Boundary::outflow;
  if (text == "reflective") return Boundary::reflective;
  if (text == "periodic") return Boundary::periodic;
  throw ConfigError("unknown boundary kind '" + std::string(text) + "'");
}

void GridSpec::validate() const {
  std::ostringstream os;
  if (dim != 1 && dim != 2) {
    os << "grid dimension must be 1 or 2, got " << dim;
  } else if (nx <= 0 || (dim == 2 && ny <= 0)) {
    os << "grid needs at least one cell per axis";
  } else if (!(dx() > 0.0) || (dim == 2 && !(dy() > 0.0))) {
    os << "grid spacing must be positive";
  } else if (dim == 2 && std::abs(dx() - dy()) > 1e-12 * dx()) {
    os << "2D grids require dx == dy (dx=" << dx() << ", dy=" << dy() << ")";
  } else if (dt < 0.0 || !std::isfinite(dt)) {
    os << "time step must be non-negative, got " << dt;
  } else {
    return;
  }
  throw GridMismatch(os.str());
}

GridSpec refine(const GridSpec& g) {
  GridSpec f = g;
  f.nx = 2 * g.nx;
  f.ny = g.dim == 2 ? 2 * g.ny : g.ny;
  f.dt = 0.5 * g.dt;
  return f;
}

int coarse_to_fine_index(int i_coarse, int coarse_cells) {
  if (i_coarse < 0 || i_coarse > coarse_cells) {
    std::ostringstream os;
    os << "coarse index " << i_coarse << " outside [0, " << coarse_cells << "]";
    throw OutOfRange(os.str());
  }
  return 2 * i_coarse;
}

SpaceTimeIndex coarse_to_fine_index(const SpaceTimeIndex& c, const GridSpec& g) {
  if (c.n < 0) throw OutOfRange("negative time level");
  SpaceTimeIndex f;
  f.i = coarse_to_fine_index(c.i, g.nx);
  f.j = g.dim == 2 ? coarse_to_fine_index(c.j, g.ny) : 0;
  f.n = 2 * c.n;
  return f;
}

int step_count(const GridSpec& g, double t_final) {
  if (!(g.dt > 0.0)) throw GridMismatch("time step must be positive");
  const double ratio = t_final / g.dt;
  const double k = std::round(ratio);
  if (std::abs(ratio - k) <= 1e-9 * std::max(1.0, k)) return static_cast<int>(k);
  return static_cast<int>(std::ceil(ratio));
}

GridSpec align_timestep(GridSpec g, double t_final) {
  const int k = std::max(1, step_count(g, t_final));
  g.dt = t_final / k;
  return g;
}

StateArray::StateArray(int nvars, int dim, int nx, int ny, int ghost, Layout layout)
    : nvars_(nvars),
      dim_(dim),
      nx_(nx),
      ny_(dim == 2 ? ny : 1),
      ghost_(ghost),
      px_(nx + 2 * ghost),
      layout_(layout) {
  const std::size_t py = dim == 2 ? static_cast<std::size_t>(ny_ + 2 * ghost) : 1;
  data_.assign(static_cast<std::size_t>(px_) * py * static_cast<std::size_t>(nvars), 0.0);
}

StateArray StateArray::nodes(const GridSpec& g, int nvars, int ghost) {
  return StateArray(nvars, g.dim, g.nodes_x(), g.nodes_y(), ghost, Layout::node);
}

StateArray StateArray::cells(const GridSpec& g, int nvars, int ghost) {
  return StateArray(nvars, g.dim, g.nx, g.dim == 2 ? g.ny : 1, ghost, Layout::cell);
}

double StateArray::interior_sum(int k, bool periodic) const {
  const bool skip = periodic && layout_ == Layout::node;
  const int ie = skip ? nx_ - 1 : nx_;
  const int je = (skip && dim_ == 2) ? ny_ - 1 : ny_;
  double s = 0.0;
  for (int j = 0; j < je; ++j)
    for (int i = 0; i < ie; ++i) s += at(i, j)[k];
  return s;
}

double StateArray::max_abs() const {
  double m = 0.0;
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i)
      for (int k = 0; k < nvars_; ++k) m = std::max(m, std::abs(at(i, j)[k]));
  return m;
}

namespace {

// Source index for ghost point `g` (1-based distance from the wall) on the
// low side (`low`) or high side of an axis with `n` points.
int ghost_source(Boundary b, Layout layout, int n, int g, bool low) {
  switch (b) {
    case Boundary::outflow:
      return low ? 0 : n - 1;
    case Boundary::reflective:
      if (layout == Layout::node) return low ? g : n - 1 - g;
      return low ? g - 1 : n - g;
    case Boundary::periodic:
      if (layout == Layout::node) return low ? n - 1 - g : g;
      return low ? n - g : g - 1;
  }
  return 0;
}

template <typename Copy>
void fill_axis_ghosts(int axis, int n, int ghost, int other_lo, int other_hi, Boundary b,
                      Layout layout, Copy&& copy) {
  for (int o = other_lo; o < other_hi; ++o) {
    for (int g = 1; g <= ghost; ++g) {
      const int lo_src = ghost_source(b, layout, n, g, true);
      const int hi_src = ghost_source(b, layout, n, g, false);
      if (axis == 0) {
        copy(-g, o, lo_src, o);
        copy(n - 1 + g, o, hi_src, o);
      } else {
        copy(o, -g, o, lo_src);
        copy(o, n - 1 + g, o, hi_src);
      }
    }
  }
}

}  // namespace

void fill_ghosts(StateArray& a, Boundary b, const ConservationLaw& law) {
  const int nv = a.nvars();
  const bool reflect = b == Boundary::reflective;
  auto copier = [&](int axis) {
    return [&a, &law, nv, reflect, axis](int di, int dj, int si, int sj) {
      double* dst = a.at(di, dj);
      const double* src = a.at(si, sj);
      std::copy_n(src, nv, dst);
      if (reflect) law.reflect(axis, dst);
    };
  };
  fill_axis_ghosts(0, a.nx(), a.ghost(), 0, a.ny(), b, a.layout(), copier(0));
  if (a.dim() == 2) {
    fill_axis_ghosts(1, a.ny(), a.ghost(), -a.ghost(), a.nx() + a.ghost(), b, a.layout(),
                     copier(1));
  }
}

FieldSnapshot::FieldSnapshot(const GridSpec& g, int time_index, PrimitiveState fill)
    : grid(g), time_index(time_index) {
  const std::size_t px = static_cast<std::size_t>(g.nodes_x() + 2);
  const std::size_t py = g.dim == 2 ? static_cast<std::size_t>(g.nodes_y() + 2) : 1;
  values.assign(px * py, fill);
}

void fill_ghosts(FieldSnapshot& f) {
  const GridSpec& g = f.grid;
  const bool reflect = g.boundary == Boundary::reflective;
  auto copier = [&f, reflect](int axis) {
    return [&f, reflect, axis](int di, int dj, int si, int sj) {
      PrimitiveState s = f.at(si, sj);
      if (reflect) {
        if (axis == 0)
          s.u = -s.u;
        else
          s.v = -s.v;
      }
      f.at(di, dj) = s;
    };
  };
  fill_axis_ghosts(0, g.nodes_x(), 1, 0, g.nodes_y(), g.boundary, Layout::node, copier(0));
  if (g.dim == 2) {
    fill_axis_ghosts(1, g.nodes_y(), 1, -1, g.nodes_x() + 1, g.boundary, Layout::node,
                     copier(1));
  }
}

FieldSnapshot to_snapshot(const StateArray& cons, const GridSpec& g, int time_index,
                          const EulerLaw& law) {
  if (cons.nx() != g.nodes_x() || cons.ny() != g.nodes_y() || cons.nvars() != 4) {
    throw GridMismatch("conserved array does not match grid nodes");
  }
  FieldSnapshot f(g, time_index);
  for (int j = 0; j < g.nodes_y(); ++j) {
    for (int i = 0; i < g.nodes_x(); ++i) {
      double w[4];
      try {
        law.to_primitive(cons.at(i, j), w);
      } catch (const NonPhysicalState& e) {
        std::ostringstream os;
        os << e.what() << " at node (" << i << ", " << j << "), level " << time_index;
        throw NonPhysicalState(os.str());
      }
      f.at(i, j) = {w[0], w[1], w[2], w[3]};
    }
  }
  fill_ghosts(f);
  return f;
}

StateArray to_conserved(const FieldSnapshot& f, const EulerLaw& law) {
  StateArray a = StateArray::nodes(f.grid, 4);
  for (int j = 0; j < f.grid.nodes_y(); ++j) {
    for (int i = 0; i < f.grid.nodes_x(); ++i) {
      const PrimitiveState& s = f.at(i, j);
      const double w[4] = {s.rho, s.u, s.v, s.p};
      law.from_primitive(w, a.at(i, j));
    }
  }
  fill_ghosts(a, f.grid.boundary, law);
  return a;
}

double cfl_timestep(const FieldSnapshot& ic, double cfl, const GasModel& gas) {
  if (!(cfl > 0.0 && cfl < 1.0)) {
    std::ostringstream os;
    os << "cfl must lie in (0, 1), got " << cfl;
    throw ConfigError(os.str());
  }
  double s = 0.0;
  for (int j = 0; j < ic.grid.nodes_y(); ++j)
    for (int i = 0; i < ic.grid.nodes_x(); ++i) s = std::max(s, max_wave_speed(ic.at(i, j), gas));
  if (!(s > 0.0)) throw DegenerateField("maximum wave speed is zero; CFL step undefined");
  return cfl * ic.grid.dx() / s;
}

}  // namespace nnlci
