#include "nnlci/stencils.hpp"

#include "nnlci/error.hpp"

#include <cmath>
#include <sstream>

namespace nnlci {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::cg1d:
      return "cg1d";
    case Variant::cg1d_dt:
      return "cg1d_dt";
    case Variant::cg2d:
      return "cg2d";
    case Variant::dc2d:
      return "dc2d";
    case Variant::mixed:
      return "mixed";
  }
  return "mixed";
}

Variant parse_variant(const std::string& text) {
  if (text == "cg1d") return Variant::cg1d;
  if (text == "cg1d_dt") return Variant::cg1d_dt;
  if (text == "cg2d") return Variant::cg2d;
  if (text == "dc2d") return Variant::dc2d;
  if (text == "mixed") return Variant::mixed;
  throw ConfigError("unknown input variant '" + text + "'");
}

int euler_var_count(int dim) { return dim == 2 ? 4 : 3; }

double primitive_component(const PrimitiveState& s, int var, int dim) {
  if (dim == 1) {
    switch (var) {
      case 0:
        return s.rho;
      case 1:
        return s.u;
      default:
        return s.p;
    }
  }
  switch (var) {
    case 0:
      return s.rho;
    case 1:
      return s.u;
    case 2:
      return s.v;
    default:
      return s.p;
  }
}

void set_primitive_component(PrimitiveState& s, int var, int dim, double value) {
  if (var == 0) {
    s.rho = value;
  } else if (var == 1) {
    s.u = value;
  } else if (dim == 2 && var == 2) {
    s.v = value;
  } else {
    s.p = value;
  }
}

int half_points(int dim) { return dim == 2 ? 10 : 4; }

namespace {

struct Offset {
  int di;
  int dj;
  bool earlier;
};

std::vector<Offset> half_layout(int dim) {
  std::vector<Offset> out;
  if (dim == 1) {
    for (int di = -1; di <= 1; ++di) out.push_back({di, 0, true});
  } else {
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) out.push_back({di, dj, true});
  }
  out.push_back({0, 0, false});
  return out;
}

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

void check_half(const InputHalf& h) {
  if (h.prev == nullptr || h.curr == nullptr) throw GridMismatch("input half has no snapshots");
  if (h.stride < 1) throw GridMismatch("input stride must be positive");
  if (!(h.prev->grid.dim == h.curr->grid.dim && h.prev->grid.nx == h.curr->grid.nx &&
        h.prev->grid.ny == h.curr->grid.ny)) {
    throw GridMismatch("input levels live on different grids");
  }
  if (!nearly_equal(h.curr->time() - h.prev->time(), h.stride * h.curr->grid.dt)) {
    std::ostringstream os;
    os << "input levels " << h.prev->time_index << " and " << h.curr->time_index
       << " are not " << h.stride << " step(s) apart";
    throw GridMismatch(os.str());
  }
  const GridSpec& g = h.curr->grid;
  if (g.nx % h.stride != 0 || (g.dim == 2 && g.ny % h.stride != 0)) {
    throw GridMismatch("input grid is not a refinement of the prediction grid");
  }
}

void check_pair(const InputHalf& a, const InputHalf& b, int i, int j) {
  check_half(a);
  check_half(b);
  const GridSpec pa = prediction_grid(a);
  const GridSpec pb = prediction_grid(b);
  if (pa.dim != pb.dim || pa.nx != pb.nx || pa.ny != pb.ny || pa.x_lo != pb.x_lo ||
      pa.x_hi != pb.x_hi || (pa.dim == 2 && (pa.y_lo != pb.y_lo || pa.y_hi != pb.y_hi))) {
    throw GridMismatch("input halves map to different prediction grids");
  }
  if (!nearly_equal(a.curr->time(), b.curr->time()) ||
      !nearly_equal(a.prev->time(), b.prev->time())) {
    throw GridMismatch("input halves are sampled at different times");
  }
  const bool in_x = i >= 1 && i <= pa.nx - 1;
  const bool in_y = pa.dim == 1 ? j == 0 : (j >= 1 && j <= pa.ny - 1);
  if (!in_x || !in_y) {
    std::ostringstream os;
    os << "node (" << i << ", " << j << ") is not an interior node of the prediction grid";
    throw OutOfRange(os.str());
  }
}

}  // namespace

GridSpec prediction_grid(const InputHalf& h) {
  GridSpec g = h.curr->grid;
  g.nx /= h.stride;
  if (g.dim == 2) g.ny /= h.stride;
  g.dt *= h.stride;
  return g;
}

PerVariable assemble_halves(const InputHalf& a, const InputHalf& b, int i, int j) {
  check_pair(a, b, i, j);
  const int dim = a.curr->grid.dim;
  const int nvar = euler_var_count(dim);
  const auto layout = half_layout(dim);
  PerVariable out(static_cast<std::size_t>(nvar));
  for (auto& v : out) v.reserve(2 * layout.size());
  for (const InputHalf* h : {&a, &b}) {
    const int s = h->stride;
    for (const Offset& o : layout) {
      const FieldSnapshot& f = o.earlier ? *h->prev : *h->curr;
      const PrimitiveState& st = f.at(s * (i + o.di), dim == 2 ? s * (j + o.dj) : 0);
      for (int k = 0; k < nvar; ++k) out[k].push_back(primitive_component(st, k, dim));
    }
  }
  return out;
}

std::vector<SpaceTimePoint> stencil_coordinates(const InputHalf& a, const InputHalf& b, int i,
                                                int j) {
  check_pair(a, b, i, j);
  const int dim = a.curr->grid.dim;
  std::vector<SpaceTimePoint> out;
  for (const InputHalf* h : {&a, &b}) {
    const int s = h->stride;
    for (const Offset& o : half_layout(dim)) {
      const FieldSnapshot& f = o.earlier ? *h->prev : *h->curr;
      out.push_back({f.grid.x(s * (i + o.di)), dim == 2 ? f.grid.y(s * (j + o.dj)) : 0.0,
                     f.time()});
    }
  }
  return out;
}

PerVariable assemble_2cgnn_1d(const FieldSnapshot& coarse_prev, const FieldSnapshot& coarse_curr,
                              const FieldSnapshot& fine_prev, const FieldSnapshot& fine_curr,
                              int i) {
  if (coarse_curr.grid.dim != 1) throw GridMismatch("assemble_2cgnn_1d needs 1D snapshots");
  return assemble_halves({&coarse_prev, &coarse_curr, 1}, {&fine_prev, &fine_curr, 2}, i, 0);
}

std::vector<double> assemble_2cgnn_1d_dt(const FieldSnapshot& coarse_prev,
                                         const FieldSnapshot& coarse_curr,
                                         const FieldSnapshot& fine_prev,
                                         const FieldSnapshot& fine_curr, int i, double dt) {
  return concat_euler_input(assemble_2cgnn_1d(coarse_prev, coarse_curr, fine_prev, fine_curr, i),
                            dt);
}

PerVariable assemble_2cgnn_2d(const FieldSnapshot& coarse_prev, const FieldSnapshot& coarse_curr,
                              const FieldSnapshot& fine_prev, const FieldSnapshot& fine_curr,
                              int i, int j) {
  if (coarse_curr.grid.dim != 2) throw GridMismatch("assemble_2cgnn_2d needs 2D snapshots");
  return assemble_halves({&coarse_prev, &coarse_curr, 1}, {&fine_prev, &fine_curr, 2}, i, j);
}

PerVariable assemble_2dcnn_2d(const FieldSnapshot& u_prev, const FieldSnapshot& u_curr,
                              const FieldSnapshot& v_prev, const FieldSnapshot& v_curr, int i,
                              int j) {
  if (u_curr.grid.dim != 2) throw GridMismatch("assemble_2dcnn_2d needs 2D snapshots");
  if (!(u_curr.grid == v_curr.grid)) {
    throw GridMismatch("both diffusion runs must share one grid and time step");
  }
  return assemble_halves({&u_prev, &u_curr, 1}, {&v_prev, &v_curr, 1}, i, j);
}

std::vector<double> concat_euler_input(const PerVariable& vars, std::optional<double> dt) {
  std::vector<double> out;
  if (!vars.empty()) out.reserve(vars.size() * vars.front().size() + 1);
  for (const auto& v : vars) {
    if (v.size() != vars.front().size()) {
      throw LengthMismatch("per-variable input vectors differ in length");
    }
    out.insert(out.end(), v.begin(), v.end());
  }
  if (dt) out.push_back(*dt);
  return out;
}

std::vector<StencilSample> assemble_all(const InputHalf& a, const InputHalf& b, Variant variant,
                                        const FieldSnapshot* reference,
                                        std::optional<double> dt) {
  check_half(a);
  const GridSpec pg = prediction_grid(a);
  const int dim = pg.dim;
  const int nvar = euler_var_count(dim);
  if (reference != nullptr && (reference->grid.nx != pg.nx || reference->grid.ny != pg.ny ||
                               reference->grid.dim != dim)) {
    throw GridMismatch("reference field is not on the prediction grid");
  }
  // Coarse time level of the sampled point.
  const int level = static_cast<int>(std::llround(a.curr->time() / pg.dt));
  std::vector<StencilSample> out;
  const int j_lo = dim == 2 ? 1 : 0;
  const int j_hi = dim == 2 ? pg.ny - 1 : 0;
  out.reserve(static_cast<std::size_t>(pg.nx - 1) *
              static_cast<std::size_t>(std::max(1, j_hi - j_lo + 1)));
  for (int j = j_lo; j <= j_hi; ++j) {
    for (int i = 1; i <= pg.nx - 1; ++i) {
      StencilSample s;
      s.input = concat_euler_input(assemble_halves(a, b, i, j), dt);
      if (reference != nullptr) {
        const PrimitiveState& r = reference->at(i, j);
        for (int k = 0; k < nvar; ++k) s.target.push_back(primitive_component(r, k, dim));
      }
      s.location = {i, j, level};
      s.variant = variant;
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace nnlci
