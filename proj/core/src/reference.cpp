#include "nnlci/reference.hpp"

#include "nnlci/error.hpp"
#include "nnlci/schemes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace nnlci {

std::string to_string(RiemannFlux f) { return f == RiemannFlux::hllc ? "hllc" : "hll"; }

RiemannFlux parse_riemann_flux(const std::string& text) {
  if (text == "hll") return RiemannFlux::hll;
  if (text == "hllc") return RiemannFlux::hllc;
  throw ConfigError("unknown reference flux '" + text + "'");
}

std::string to_string(Limiter l) {
  switch (l) {
    case Limiter::minmod:
      return "minmod";
    case Limiter::mc:
      return "mc";
    case Limiter::superbee:
      return "superbee";
  }
  return "?";
}

Limiter parse_limiter(const std::string& text) {
  if (text == "minmod") return Limiter::minmod;
  if (text == "mc") return Limiter::mc;
  if (text == "superbee") return Limiter::superbee;
  throw ConfigError("unknown limiter '" + text + "'");
}

std::string reference_scheme_id(const ReferenceOptions& opts) {
  return "muscl2-" + to_string(opts.limiter) + "-" + to_string(opts.flux) + "-sspRK2";
}

namespace {

constexpr int kMaxVars = 8;
using Vec = std::array<double, kMaxVars>;

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Limited slope from the backward difference a and forward difference b.
double limited_slope(Limiter l, double a, double b) {
  if (a * b <= 0.0) return 0.0;
  switch (l) {
    case Limiter::minmod:
      return minmod(a, b);
    case Limiter::mc: {
      const double m = std::min({std::abs(0.5 * (a + b)), 2.0 * std::abs(a), 2.0 * std::abs(b)});
      return std::copysign(m, a);
    }
    case Limiter::superbee: {
      const double m = std::max(std::min(2.0 * std::abs(a), std::abs(b)),
                                std::min(std::abs(a), 2.0 * std::abs(b)));
      return std::copysign(m, a);
    }
  }
  return 0.0;
}

void hll_flux(const ConservationLaw& law, int axis, const double* ul, const double* ur,
              double* out) {
  const int nv = law.num_vars();
  Vec fl{}, fr{};
  law.flux(axis, ul, fl.data());
  law.flux(axis, ur, fr.data());
  const auto [l_min, l_max] = law.wave_speeds(axis, ul);
  const auto [r_min, r_max] = law.wave_speeds(axis, ur);
  const double sl = std::min(l_min, r_min);
  const double sr = std::max(l_max, r_max);
  if (sl >= 0.0) {
    std::copy_n(fl.data(), nv, out);
  } else if (sr <= 0.0) {
    std::copy_n(fr.data(), nv, out);
  } else {
    const double inv = 1.0 / (sr - sl);
    for (int k = 0; k < nv; ++k) {
      out[k] = (sr * fl[k] - sl * fr[k] + sl * sr * (ur[k] - ul[k])) * inv;
    }
  }
}

// Toro's HLLC with Davis wave-speed estimates.
void hllc_flux(const EulerLaw& law, int axis, const double* ul, const double* ur, double* out) {
  const GasModel& gas = law.gas();
  const PrimitiveState wl = cons_to_prim({ul[0], ul[1], ul[2], ul[3]}, gas);
  const PrimitiveState wr = cons_to_prim({ur[0], ur[1], ur[2], ur[3]}, gas);
  const double vl = axis == 0 ? wl.u : wl.v;
  const double vr = axis == 0 ? wr.u : wr.v;
  const double cl = sound_speed(wl, gas);
  const double cr = sound_speed(wr, gas);
  const double sl = std::min(vl - cl, vr - cr);
  const double sr = std::max(vl + cl, vr + cr);
  Vec fl{}, fr{};
  law.flux(axis, ul, fl.data());
  law.flux(axis, ur, fr.data());
  if (sl >= 0.0) {
    std::copy_n(fl.data(), 4, out);
    return;
  }
  if (sr <= 0.0) {
    std::copy_n(fr.data(), 4, out);
    return;
  }
  const double sm = (wr.p - wl.p + wl.rho * vl * (sl - vl) - wr.rho * vr * (sr - vr)) /
                    (wl.rho * (sl - vl) - wr.rho * (sr - vr));
  const bool left = sm >= 0.0;
  const double* u = left ? ul : ur;
  const PrimitiveState& w = left ? wl : wr;
  const double s = left ? sl : sr;
  const double vn = left ? vl : vr;
  const double* f = left ? fl.data() : fr.data();
  const double factor = w.rho * (s - vn) / (s - sm);
  double star[4];
  star[0] = factor;
  star[1] = factor * (axis == 0 ? sm : w.u);
  star[2] = factor * (axis == 1 ? sm : w.v);
  star[3] = factor * (u[3] / w.rho + (sm - vn) * (sm + w.p / (w.rho * (s - vn))));
  for (int k = 0; k < 4; ++k) out[k] = f[k] + s * (star[k] - u[k]);
}

void check_cells(const ConservationLaw& law, const StateArray& a, int step) {
  try {
    check_states(law, a, step);
  } catch (const NonPhysicalState& e) {
    throw NonPhysicalState(std::string("reference solver: ") + e.what());
  }
}

double stable_dt(const ConservationLaw& law, const GridSpec& g, const StateArray& u,
                 double cfl) {
  double rate = 0.0;
  for (int j = 0; j < u.ny(); ++j) {
    for (int i = 0; i < u.nx(); ++i) {
      double r = 0.0;
      for (int axis = 0; axis < g.dim; ++axis) {
        const auto [lo, hi] = law.wave_speeds(axis, u.at(i, j));
        r += std::max(std::abs(lo), std::abs(hi)) / (axis == 0 ? g.dx() : g.dy());
      }
      rate = std::max(rate, r);
    }
  }
  if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
  return cfl / rate;
}

}  // namespace

StateArray reference_rhs(const ConservationLaw& law, const GridSpec& g, StateArray& u,
                         const ReferenceOptions& opts) {
  const int nv = law.num_vars();
  if (nv > kMaxVars) throw LengthMismatch("too many variables for the reference solver");
  if (u.ghost() < 2) throw GridMismatch("reference solver needs two ghost cells");
  fill_ghosts(u, g.boundary, law);

  const EulerLaw* euler = dynamic_cast<const EulerLaw*>(&law);
  const bool use_hllc = opts.flux == RiemannFlux::hllc && euler != nullptr;

  StateArray w = u;
  const int gy = u.dim() == 2 ? u.ghost() : 0;
  for (int j = -gy; j < u.ny() + gy; ++j)
    for (int i = -u.ghost(); i < u.nx() + u.ghost(); ++i) law.to_primitive(u.at(i, j), w.at(i, j));

  StateArray rhs = u;
  std::fill(rhs.raw().begin(), rhs.raw().end(), 0.0);

  Vec wl{}, wr{}, ul{}, ur{}, f{};
  for (int axis = 0; axis < g.dim; ++axis) {
    const int di = axis == 0 ? 1 : 0;
    const int dj = axis == 0 ? 0 : 1;
    const double inv_h = 1.0 / (axis == 0 ? g.dx() : g.dy());
    for (int j = (axis == 1 ? -1 : 0); j < u.ny(); ++j) {
      for (int i = (axis == 0 ? -1 : 0); i < u.nx(); ++i) {
        // Face between cell (i, j) and (i + di, j + dj).
        const double* wm = w.at(i - di, j - dj);
        const double* w0 = w.at(i, j);
        const double* w1 = w.at(i + di, j + dj);
        const double* w2 = w.at(i + 2 * di, j + 2 * dj);
        for (int k = 0; k < nv; ++k) {
          wl[k] = w0[k] + 0.5 * limited_slope(opts.limiter, w0[k] - wm[k], w1[k] - w0[k]);
          wr[k] = w1[k] - 0.5 * limited_slope(opts.limiter, w1[k] - w0[k], w2[k] - w1[k]);
        }
        law.from_primitive(wl.data(), ul.data());
        law.from_primitive(wr.data(), ur.data());
        if (use_hllc) {
          hllc_flux(*euler, axis, ul.data(), ur.data(), f.data());
        } else {
          hll_flux(law, axis, ul.data(), ur.data(), f.data());
        }
        if (i >= 0 && j >= 0) {
          double* r = rhs.at(i, j);
          for (int k = 0; k < nv; ++k) r[k] -= inv_h * f[k];
        }
        if (i + di < u.nx() && j + dj < u.ny()) {
          double* r = rhs.at(i + di, j + dj);
          for (int k = 0; k < nv; ++k) r[k] += inv_h * f[k];
        }
      }
    }
  }
  return rhs;
}

std::vector<CellField> reference_solve(const ConservationLaw& law, const GridSpec& g,
                                       const StateArray& ic_cells, std::span<const double> times,
                                       const ReferenceOptions& opts) {
  g.validate();
  if (ic_cells.layout() != Layout::cell || ic_cells.nx() != g.nx ||
      (g.dim == 2 && ic_cells.ny() != g.ny) || ic_cells.nvars() != law.num_vars()) {
    throw GridMismatch("initial cell averages do not match the reference grid");
  }
  if (!(opts.cfl > 0.0 && opts.cfl < 1.0)) throw ConfigError("reference cfl must lie in (0, 1)");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0) || (k > 0 && times[k] < times[k - 1])) {
      throw ConfigError("reference output times must be non-negative and ascending");
    }
  }

  StateArray u = ic_cells;
  check_cells(law, u, 0);
  std::vector<CellField> out;
  double t = 0.0;
  int step = 0;
  for (double target : times) {
    while (t < target * (1.0 - 1e-14)) {
      double dt = stable_dt(law, g, u, opts.cfl);
      bool last = false;
      if (t + dt >= target) {
        dt = target - t;
        last = true;
      }
      GridSpec gs = g;
      gs.dt = dt;
      // Stage 1.
      StateArray l0 = reference_rhs(law, gs, u, opts);
      StateArray u1 = u;
      {
        auto a = u1.raw();
        auto r = l0.raw();
        for (std::size_t k = 0; k < a.size(); ++k) a[k] += dt * r[k];
      }
      ++step;
      check_cells(law, u1, step);
      // Stage 2.
      StateArray l1 = reference_rhs(law, gs, u1, opts);
      {
        auto a = u.raw();
        auto b = u1.raw();
        auto r = l1.raw();
        for (std::size_t k = 0; k < a.size(); ++k) a[k] = 0.5 * a[k] + 0.5 * (b[k] + dt * r[k]);
      }
      check_cells(law, u, step);
      t = last ? target : t + dt;
    }
    fill_ghosts(u, g.boundary, law);
    GridSpec gs = g;
    out.push_back({gs, target, u});
  }
  return out;
}

CellField reference_solve(const ConservationLaw& law, const GridSpec& g,
                          const StateArray& ic_cells, double t_final,
                          const ReferenceOptions& opts) {
  const double times[1] = {t_final};
  return reference_solve(law, g, ic_cells, times, opts).front();
}

namespace {

// Fractional reference-node coordinate of a target coordinate.
double node_coordinate(double x, double lo, double h, int cells) {
  const double s = (x - lo) / h;
  const double r = std::round(s);
  const double snapped = std::abs(s - r) <= 1e-9 ? r : s;
  if (snapped < 0.0 || snapped > cells) {
    std::ostringstream os;
    os << "target coordinate " << x << " lies outside the reference domain";
    throw OutOfRange(os.str());
  }
  return snapped;
}

}  // namespace

StateArray cell_avg_to_nodes(const CellField& field, const GridSpec& target,
                             const ConservationLaw& law) {
  const GridSpec& rg = field.grid;
  if (rg.dim != target.dim) throw GridMismatch("reference and target dimensions differ");
  const int nv = law.num_vars();
  StateArray out = StateArray::nodes(target, nv);
  const StateArray& c = field.cons;

  // Mean of the cells sharing reference node (k, l).
  auto node_value = [&](int k, int l, double* v) {
    std::fill_n(v, nv, 0.0);
    if (rg.dim == 1) {
      for (int q = 0; q < nv; ++q) v[q] = 0.5 * (c.at(k - 1)[q] + c.at(k)[q]);
    } else {
      for (int q = 0; q < nv; ++q) {
        v[q] = 0.25 * (c.at(k - 1, l - 1)[q] + c.at(k, l - 1)[q] + c.at(k - 1, l)[q] +
                       c.at(k, l)[q]);
      }
    }
  };

  std::array<double, kMaxVars> a{}, b{}, cc{}, d{};
  for (int j = 0; j < target.nodes_y(); ++j) {
    const double sy = rg.dim == 2 ? node_coordinate(target.y(j), rg.y_lo, rg.dy(), rg.ny) : 0.0;
    const int l0 = static_cast<int>(std::floor(sy));
    const int l1 = std::min(l0 + 1, rg.dim == 2 ? rg.ny : 0);
    const double ty = sy - l0;
    for (int i = 0; i < target.nodes_x(); ++i) {
      const double sx = node_coordinate(target.x(i), rg.x_lo, rg.dx(), rg.nx);
      const int k0 = static_cast<int>(std::floor(sx));
      const int k1 = std::min(k0 + 1, rg.nx);
      const double tx = sx - k0;
      double* o = out.at(i, j);
      node_value(k0, l0, a.data());
      if (tx == 0.0 && ty == 0.0) {
        std::copy_n(a.data(), nv, o);
        continue;
      }
      node_value(k1, l0, b.data());
      node_value(k0, l1, cc.data());
      node_value(k1, l1, d.data());
      for (int q = 0; q < nv; ++q) {
        o[q] = (1.0 - ty) * ((1.0 - tx) * a[q] + tx * b[q]) + ty * ((1.0 - tx) * cc[q] + tx * d[q]);
      }
    }
  }
  fill_ghosts(out, target.boundary, law);
  return out;
}

FieldSnapshot cell_avg_to_point(const CellField& field, const GridSpec& target,
                                const EulerLaw& law, int time_index) {
  return to_snapshot(cell_avg_to_nodes(field, target, law), target, time_index, law);
}

}  // namespace nnlci
