#include "nnlci/schemes.hpp"

#include "nnlci/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <utility>
#include <vector>

namespace nnlci {

std::string to_string(SchemeKind k) {
  return k == SchemeKind::rusanov ? "rusanov" : "leapfrog_diffusion";
}

SchemeKind parse_scheme_kind(const std::string& text) {
  if (text == "leapfrog_diffusion") return SchemeKind::leapfrog_diffusion;
  if (text == "rusanov") return SchemeKind::rusanov;
  throw ConfigError("unknown low-cost scheme '" + text + "'");
}

void SchemeConfig::validate() const {
  if (!(alpha_factor >= 0.0) || !std::isfinite(alpha_factor)) {
    throw ConfigError("alpha_factor must be a finite non-negative number");
  }
  if (substeps != 1 && substeps != 2) throw ConfigError("diffusion substeps must be 1 or 2");
}

double diffusion_limit(int dim) { return 1.0 / (2.0 * dim); }

double diffusion_number(const GridSpec& g, const SchemeConfig& cfg) {
  // alpha * dt / dx^2 with alpha = alpha_factor * dx.
  return cfg.alpha_factor * g.dt / g.dx();
}

namespace {

// Pointwise fluxes over every stored point (ghosts included).
StateArray point_fluxes(const ConservationLaw& law, const StateArray& u, int axis) {
  StateArray f = u;
  const int gy = u.dim() == 2 ? u.ghost() : 0;
  for (int j = -gy; j < u.ny() + gy; ++j)
    for (int i = -u.ghost(); i < u.nx() + u.ghost(); ++i) law.flux(axis, u.at(i, j), f.at(i, j));
  return f;
}

void require_same_shape(const StateArray& a, const StateArray& b) {
  if (!a.same_shape(b)) throw GridMismatch("time levels live on different grids");
}

}  // namespace

StateArray leapfrog_stage(const ConservationLaw& law, const GridSpec& g, const StateArray& prev,
                          const StateArray& curr) {
  require_same_shape(prev, curr);
  const int nv = law.num_vars();
  const double rx = g.dt / g.dx();
  const StateArray fx = point_fluxes(law, curr, 0);
  StateArray out = prev;
  for (int j = 0; j < curr.ny(); ++j) {
    for (int i = 0; i < curr.nx(); ++i) {
      double* o = out.at(i, j);
      const double* fp = fx.at(i + 1, j);
      const double* fm = fx.at(i - 1, j);
      for (int k = 0; k < nv; ++k) o[k] -= rx * (fp[k] - fm[k]);
    }
  }
  if (g.dim == 2) {
    const double ry = g.dt / g.dy();
    const StateArray fy = point_fluxes(law, curr, 1);
    for (int j = 0; j < curr.ny(); ++j) {
      for (int i = 0; i < curr.nx(); ++i) {
        double* o = out.at(i, j);
        const double* gp = fy.at(i, j + 1);
        const double* gm = fy.at(i, j - 1);
        for (int k = 0; k < nv; ++k) o[k] -= ry * (gp[k] - gm[k]);
      }
    }
  }
  fill_ghosts(out, g.boundary, law);
  return out;
}

void diffusion_stage(const ConservationLaw& law, const GridSpec& g, StateArray& u,
                     const SchemeConfig& cfg) {
  cfg.validate();
  if (cfg.alpha_factor == 0.0) return;
  const int nv = law.num_vars();
  const double lambda = diffusion_number(g, cfg) / cfg.substeps;
  for (int s = 0; s < cfg.substeps; ++s) {
    StateArray next = u;
    for (int j = 0; j < u.ny(); ++j) {
      for (int i = 0; i < u.nx(); ++i) {
        double* o = next.at(i, j);
        const double* c = u.at(i, j);
        const double* e = u.at(i + 1, j);
        const double* w = u.at(i - 1, j);
        for (int k = 0; k < nv; ++k) o[k] += lambda * (e[k] - 2.0 * c[k] + w[k]);
        if (g.dim == 2) {
          const double* n = u.at(i, j + 1);
          const double* sd = u.at(i, j - 1);
          for (int k = 0; k < nv; ++k) o[k] += lambda * (n[k] - 2.0 * c[k] + sd[k]);
        }
      }
    }
    fill_ghosts(next, g.boundary, law);
    u = std::move(next);
  }
}

StateArray leapfrog_diffusion_step(const ConservationLaw& law, const GridSpec& g,
                                   const StateArray& prev, const StateArray& curr,
                                   const SchemeConfig& cfg) {
  StateArray u = leapfrog_stage(law, g, prev, curr);
  diffusion_stage(law, g, u, cfg);
  return u;
}

StateArray lax_friedrichs_step(const ConservationLaw& law, const GridSpec& g,
                               const StateArray& curr) {
  const int nv = law.num_vars();
  const double rx = 0.5 * g.dt / g.dx();
  const double ry = 0.5 * g.dt / g.dy();
  const StateArray fx = point_fluxes(law, curr, 0);
  StateArray fy;
  if (g.dim == 2) fy = point_fluxes(law, curr, 1);
  StateArray out = curr;
  for (int j = 0; j < curr.ny(); ++j) {
    for (int i = 0; i < curr.nx(); ++i) {
      double* o = out.at(i, j);
      const double* e = curr.at(i + 1, j);
      const double* w = curr.at(i - 1, j);
      const double* fp = fx.at(i + 1, j);
      const double* fm = fx.at(i - 1, j);
      if (g.dim == 1) {
        for (int k = 0; k < nv; ++k) o[k] = 0.5 * (e[k] + w[k]) - rx * (fp[k] - fm[k]);
      } else {
        const double* n = curr.at(i, j + 1);
        const double* s = curr.at(i, j - 1);
        const double* gp = fy.at(i, j + 1);
        const double* gm = fy.at(i, j - 1);
        for (int k = 0; k < nv; ++k) {
          o[k] = 0.25 * (e[k] + w[k] + n[k] + s[k]) - rx * (fp[k] - fm[k]) -
                 ry * (gp[k] - gm[k]);
        }
      }
    }
  }
  fill_ghosts(out, g.boundary, law);
  return out;
}

StateArray rusanov_step(const ConservationLaw& law, const GridSpec& g, const StateArray& curr) {
  const int nv = law.num_vars();
  StateArray out = curr;
  std::vector<double> flux(static_cast<std::size_t>(nv));
  for (int axis = 0; axis < g.dim; ++axis) {
    const StateArray f = point_fluxes(law, curr, axis);
    const double r = g.dt / (axis == 0 ? g.dx() : g.dy());
    const int di = axis == 0 ? 1 : 0;
    const int dj = axis == 0 ? 0 : 1;
    // Face between point (i, j) and its +axis neighbour, for faces touching
    // interior points: start one point into the low ghost layer.
    const int ie = curr.nx();
    const int je = curr.ny();
    for (int j = (axis == 1 ? -1 : 0); j < je; ++j) {
      for (int i = (axis == 0 ? -1 : 0); i < ie; ++i) {
        const double* ul = curr.at(i, j);
        const double* ur = curr.at(i + di, j + dj);
        const double* fl = f.at(i, j);
        const double* fr = f.at(i + di, j + dj);
        const double s = std::max(law.max_speed(ul), law.max_speed(ur));
        for (int k = 0; k < nv; ++k) flux[k] = 0.5 * (fl[k] + fr[k]) - 0.5 * s * (ur[k] - ul[k]);
        if (i >= 0 && j >= 0) {
          double* o = out.at(i, j);
          for (int k = 0; k < nv; ++k) o[k] -= r * flux[k];
        }
        if (i + di < ie && j + dj < je) {
          double* o = out.at(i + di, j + dj);
          for (int k = 0; k < nv; ++k) o[k] += r * flux[k];
        }
      }
    }
  }
  fill_ghosts(out, g.boundary, law);
  return out;
}

void check_states(const ConservationLaw& law, const StateArray& a, int step) {
  for (int j = 0; j < a.ny(); ++j) {
    for (int i = 0; i < a.nx(); ++i) {
      const double* u = a.at(i, j);
      for (int k = 0; k < a.nvars(); ++k) {
        if (!std::isfinite(u[k]) || std::abs(u[k]) > kStabilityGuard) {
          std::ostringstream os;
          os << "stability guard tripped at point (" << i << ", " << j << ") on step " << step
             << " (value " << u[k] << "); the time step likely violates the CFL condition";
          throw NonPhysicalState(os.str());
        }
      }
      try {
        law.check(u);
      } catch (const NonPhysicalState& e) {
        std::ostringstream os;
        os << e.what() << " at point (" << i << ", " << j << ") on step " << step;
        throw NonPhysicalState(os.str());
      }
    }
  }
}

namespace {

void require_dim(const FieldSnapshot& s, int dim) {
  if (s.grid.dim != dim) {
    std::ostringstream os;
    os << "expected a " << dim << "D snapshot, got " << s.grid.dim << "D";
    throw GridMismatch(os.str());
  }
}

FieldSnapshot leapfrog_snapshot_step(const FieldSnapshot& prev, const FieldSnapshot& curr,
                                     const SchemeConfig& cfg, const GasModel& gas) {
  if (!(prev.grid == curr.grid)) throw GridMismatch("leapfrog levels on different grids");
  if (curr.time_index != prev.time_index + 1) {
    throw GridMismatch("leapfrog step needs two consecutive time levels");
  }
  const EulerLaw law(gas);
  const StateArray next = leapfrog_diffusion_step(law, curr.grid, to_conserved(prev, law),
                                                  to_conserved(curr, law), cfg);
  check_states(law, next, curr.time_index + 1);
  return to_snapshot(next, curr.grid, curr.time_index + 1, law);
}

FieldSnapshot rusanov_snapshot_step(const FieldSnapshot& curr, const GasModel& gas) {
  const EulerLaw law(gas);
  const StateArray next = rusanov_step(law, curr.grid, to_conserved(curr, law));
  check_states(law, next, curr.time_index + 1);
  return to_snapshot(next, curr.grid, curr.time_index + 1, law);
}

}  // namespace

FieldSnapshot leapfrog_diffusion_step_1d(const FieldSnapshot& prev, const FieldSnapshot& curr,
                                         const SchemeConfig& cfg, const GasModel& gas) {
  require_dim(curr, 1);
  return leapfrog_snapshot_step(prev, curr, cfg, gas);
}

FieldSnapshot leapfrog_diffusion_step_2d(const FieldSnapshot& prev, const FieldSnapshot& curr,
                                         const SchemeConfig& cfg, const GasModel& gas) {
  require_dim(curr, 2);
  return leapfrog_snapshot_step(prev, curr, cfg, gas);
}

FieldSnapshot rusanov_step_1d(const FieldSnapshot& curr, const GasModel& gas) {
  require_dim(curr, 1);
  return rusanov_snapshot_step(curr, gas);
}

FieldSnapshot rusanov_step_2d(const FieldSnapshot& curr, const GasModel& gas) {
  require_dim(curr, 2);
  return rusanov_snapshot_step(curr, gas);
}

namespace {

struct Level {
  int index;
  StateArray u;
};

// Shared driver for both the scalar and the Euler entry points. `on_level`
// sees every completed level.
template <typename OnLevel>
std::deque<Level> run_scheme(const ConservationLaw& law, const GridSpec& g, const StateArray& ic,
                             const SchemeConfig& cfg, int steps, int keep, OnLevel&& on_level) {
  cfg.validate();
  std::deque<Level> hist;
  hist.push_back({0, ic});
  fill_ghosts(hist.back().u, g.boundary, law);
  on_level(hist.back());
  for (int n = 1; n <= steps; ++n) {
    StateArray next;
    if (cfg.kind == SchemeKind::rusanov) {
      next = rusanov_step(law, g, hist.back().u);
    } else if (n == 1) {
      next = lax_friedrichs_step(law, g, hist.back().u);
    } else {
      const StateArray& prev = hist[hist.size() - 2].u;
      next = leapfrog_diffusion_step(law, g, prev, hist.back().u, cfg);
    }
    check_states(law, next, n);
    hist.push_back({n, std::move(next)});
    on_level(hist.back());
    while (static_cast<int>(hist.size()) > std::max(keep, 2)) hist.pop_front();
  }
  return hist;
}

}  // namespace

ConservedLevels evolve_conserved(const ConservationLaw& law, const GridSpec& grid,
                                 const StateArray& ic, const SchemeConfig& cfg, double t_final,
                                 int lag) {
  const GridSpec g = align_timestep(grid, t_final);
  g.validate();
  const int steps = step_count(g, t_final);
  if (lag < 1 || lag > steps) {
    std::ostringstream os;
    os << "lag " << lag << " not available with " << steps << " steps";
    throw OutOfRange(os.str());
  }
  auto hist = run_scheme(law, g, ic, cfg, steps, lag + 1, [](const Level&) {});
  ConservedLevels out;
  out.grid = g;
  const Level& last = hist.back();
  const Level& lagged = hist[hist.size() - 1 - static_cast<std::size_t>(lag)];
  out.prev = lagged.u;
  out.prev_index = lagged.index;
  out.curr = last.u;
  out.curr_index = last.index;
  return out;
}

EvolveResult evolve(const FieldSnapshot& ic, const SchemeConfig& cfg, double t_final,
                    const EvolveOptions& opts) {
  const GridSpec g = align_timestep(ic.grid, t_final);
  g.validate();
  const int steps = step_count(g, t_final);
  if (opts.lag < 1 || opts.lag > steps) {
    std::ostringstream os;
    os << "lag " << opts.lag << " not available with " << steps << " steps";
    throw OutOfRange(os.str());
  }
  const EulerLaw law(opts.gas);
  FieldSnapshot start = ic;
  start.grid = g;
  start.time_index = 0;
  for (int j = 0; j < g.nodes_y(); ++j)
    for (int i = 0; i < g.nodes_x(); ++i) validate(start.at(i, j));

  auto dump = [&](const Level& lv) {
    if (opts.dump_every > 0 && opts.dump && lv.index % opts.dump_every == 0) {
      opts.dump(to_snapshot(lv.u, g, lv.index, law));
    }
  };
  auto hist = run_scheme(law, g, to_conserved(start, law), cfg, steps, opts.lag + 1, dump);
  const Level& last = hist.back();
  const Level& lagged = hist[hist.size() - 1 - static_cast<std::size_t>(opts.lag)];
  return {to_snapshot(lagged.u, g, lagged.index, law), to_snapshot(last.u, g, last.index, law)};
}

DualDiffusionResult dual_diffusion_evolve(const FieldSnapshot& ic, double c, double t_final,
                                          const SchemeConfig& base, const EvolveOptions& opts) {
  if (!(c >= 1.0)) throw ConfigError("diffusion coefficient ratio c must be >= 1");
  if (base.kind != SchemeKind::leapfrog_diffusion) {
    throw ConfigError("dual-diffusion inputs require the leapfrog-diffusion scheme");
  }
  FieldSnapshot start = ic;
  start.grid = align_timestep(ic.grid, t_final);

  SchemeConfig boosted = base;
  boosted.alpha_factor = c * base.alpha_factor;
  boosted.substeps = 1;
  const double limit = diffusion_limit(start.grid.dim);
  const double lambda = diffusion_number(start.grid, boosted);
  if (lambda > limit) boosted.substeps = 2;
  if (lambda / boosted.substeps > limit) {
    std::ostringstream os;
    os << "diffusion number " << lambda << " for ratio c=" << c
       << " exceeds twice the explicit limit " << limit << "; reduce the time step";
    throw ConfigError(os.str());
  }
  DualDiffusionResult out;
  out.base = evolve(start, base, t_final, opts);
  out.boosted = evolve(start, boosted, t_final, opts);
  out.boosted_cfg = boosted;
  return out;
}

}  // namespace nnlci
