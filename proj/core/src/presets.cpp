#include "nnlci/presets.hpp"

#include "nnlci/config.hpp"
#include "nnlci/error.hpp"
#include "nnlci/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nnlci {

namespace {

struct Builtin {
  const char* name;
  const char* text;
};

const Builtin kBuiltins[] = {
#include "builtin_presets.inc"
};

bool in_axis(double v, double lo, double hi, double dom_hi) {
  // The top edge of the domain is closed.
  return v >= lo && (v < hi || (v == dom_hi && hi >= dom_hi));
}

}  // namespace

const PrimitiveState& ICPreset::state_at(double x, double y) const {
  for (const auto& r : regions) {
    if (in_axis(x, r.x_min, r.x_max, x_hi) && (dim == 1 || in_axis(y, r.y_min, r.y_max, y_hi))) {
      return r.state;
    }
  }
  std::ostringstream os;
  os << "preset " << name << " has no region containing (" << x << ", " << y << ")";
  throw OutOfRange(os.str());
}

void ICPreset::validate() const {
  auto fail = [&](const std::string& what) { throw ConfigError("preset " + name + ": " + what); };
  if (dim != 1 && dim != 2) fail("dim must be 1 or 2");
  if (!(x_hi > x_lo) || (dim == 2 && !(y_hi > y_lo))) fail("empty domain");
  if (!(t_final > 0.0)) fail("t_final must be positive");
  if (regions.empty()) fail("no regions");
  for (const auto& r : regions) {
    if (!is_physical(r.state)) fail("region state is not physical");
    if (!(r.x_max > r.x_min) || !(r.y_max > r.y_min)) fail("region with empty extent");
  }
  // Axis-aligned boxes tile the domain iff every cell of the arrangement of
  // all region edges (and every edge itself) is covered exactly once.
  auto breaks = [&](double lo, double hi, bool xaxis) {
    std::vector<double> b = {lo, hi};
    for (const auto& r : regions) {
      for (double v : xaxis ? std::array{r.x_min, r.x_max} : std::array{r.y_min, r.y_max}) {
        if (v > lo && v < hi) b.push_back(v);
      }
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    std::vector<double> probes = b;
    for (std::size_t k = 0; k + 1 < b.size(); ++k) probes.push_back(0.5 * (b[k] + b[k + 1]));
    return probes;
  };
  const auto px = breaks(x_lo, x_hi, true);
  const auto py = dim == 2 ? breaks(y_lo, y_hi, false) : std::vector<double>{0.0};
  for (double x : px) {
    for (double y : py) {
      int hits = 0;
      for (const auto& r : regions) {
        if (in_axis(x, r.x_min, r.x_max, x_hi) && (dim == 1 || in_axis(y, r.y_min, r.y_max, y_hi))) {
          ++hits;
        }
      }
      if (hits != 1) {
        std::ostringstream os;
        os << "regions cover (" << x << ", " << y << ") " << hits << " times";
        fail(os.str());
      }
    }
  }
}

GridSpec ICPreset::grid(int cells) const {
  GridSpec g;
  g.dim = dim;
  g.x_lo = x_lo;
  g.x_hi = x_hi;
  g.y_lo = dim == 2 ? y_lo : 0.0;
  g.y_hi = dim == 2 ? y_hi : 1.0;
  g.nx = cells;
  g.ny = dim == 2 ? cells : 0;
  g.boundary = boundary;
  return g;
}

ICPreset parse_preset(std::string_view text, const std::string& origin) {
  const KvDocument doc = KvDocument::parse(text, origin);
  ICPreset p;
  KvReader top(&doc.sections.front(), origin);
  p.name = top.str("name");
  p.dim = top.integer("dim");
  p.x_lo = top.num("x_lo");
  p.x_hi = top.num("x_hi");
  if (p.dim == 2) {
    p.y_lo = top.num("y_lo");
    p.y_hi = top.num("y_hi");
  }
  p.t_final = top.num("t_final");
  p.boundary = parse_boundary(top.str("boundary", "outflow"));
  top.finish();
  for (std::size_t k = 1; k < doc.sections.size(); ++k) {
    const KvSection& s = doc.sections[k];
    if (s.name != "region") {
      throw ConfigError(origin + ":" + std::to_string(s.line) + ": unknown section [" + s.name + "]");
    }
    KvReader r(&s, origin);
    Region reg;
    reg.x_min = r.num("x_min", reg.x_min);
    reg.x_max = r.num("x_max", reg.x_max);
    if (p.dim == 2) {
      reg.y_min = r.num("y_min", reg.y_min);
      reg.y_max = r.num("y_max", reg.y_max);
    }
    reg.state.rho = r.num("rho");
    reg.state.u = r.num("u");
    reg.state.v = p.dim == 2 ? r.num("v") : 0.0;
    reg.state.p = r.num("p");
    r.finish();
    p.regions.push_back(reg);
  }
  p.validate();
  return p;
}

ICPreset load_preset(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_preset(ss.str(), path.string());
}

std::string format_preset(const ICPreset& p) {
  std::ostringstream os;
  os << "name = " << p.name << "\ndim = " << p.dim << "\nx_lo = " << format_double(p.x_lo)
     << "\nx_hi = " << format_double(p.x_hi) << "\n";
  if (p.dim == 2) {
    os << "y_lo = " << format_double(p.y_lo) << "\ny_hi = " << format_double(p.y_hi) << "\n";
  }
  os << "t_final = " << format_double(p.t_final) << "\nboundary = " << to_string(p.boundary)
     << "\n";
  for (const auto& r : p.regions) {
    os << "\n[region]\n";
    auto bound = [&](const char* key, double v) {
      if (std::isfinite(v)) os << key << " = " << format_double(v) << "\n";
    };
    bound("x_min", r.x_min);
    bound("x_max", r.x_max);
    if (p.dim == 2) {
      bound("y_min", r.y_min);
      bound("y_max", r.y_max);
    }
    os << "rho = " << format_double(r.state.rho) << "\nu = " << format_double(r.state.u) << "\n";
    if (p.dim == 2) os << "v = " << format_double(r.state.v) << "\n";
    os << "p = " << format_double(r.state.p) << "\n";
  }
  return os.str();
}

std::vector<std::string> builtin_preset_names() {
  std::vector<std::string> out;
  for (const auto& b : kBuiltins) out.emplace_back(b.name);
  return out;
}

ICPreset builtin_preset(const std::string& name) {
  for (const auto& b : kBuiltins) {
    if (name == b.name) return parse_preset(b.text, "builtin:" + name);
  }
  throw ConfigError("no builtin preset named '" + name + "'");
}

ICPreset resolve_preset(const std::string& name_or_path) {
  for (const auto& b : kBuiltins) {
    if (name_or_path == b.name) return builtin_preset(name_or_path);
  }
  if (std::filesystem::exists(name_or_path)) return load_preset(name_or_path);
  throw ConfigError("'" + name_or_path + "' is neither a builtin preset nor a preset file");
}

ICPreset perturb_ic(const ICPreset& p, double delta) {
  if (!(std::abs(delta) < 0.5)) throw OutOfRange("perturbation must satisfy |delta| < 0.5");
  ICPreset out = p;
  const double s = 1.0 + delta;
  for (auto& r : out.regions) {
    for (double* v : {&r.state.rho, &r.state.u, &r.state.v, &r.state.p}) {
      if (*v != 0.0) *v *= s;
    }
  }
  return out;
}

FieldSnapshot initial_nodes(const ICPreset& p, const GridSpec& g) {
  FieldSnapshot f(g, 0);
  for (int j = 0; j < g.nodes_y(); ++j) {
    for (int i = 0; i < g.nodes_x(); ++i) f.at(i, j) = p.state_at(g.x(i), g.y(j));
  }
  fill_ghosts(f);
  return f;
}

StateArray initial_cells(const ICPreset& p, const GridSpec& g, const GasModel& gas, int sub) {
  if (sub < 1) throw OutOfRange("sub-sampling factor must be positive");
  const EulerLaw law(gas);
  StateArray a = StateArray::cells(g, law.num_vars());
  const int sy = g.dim == 2 ? sub : 1;
  const double w = 1.0 / (sub * sy);
  for (int j = 0; j < (g.dim == 2 ? g.ny : 1); ++j) {
    for (int i = 0; i < g.nx; ++i) {
      double acc[4] = {0, 0, 0, 0};
      for (int b = 0; b < sy; ++b) {
        const double y = g.dim == 2 ? g.y_lo + (j + (b + 0.5) / sy) * g.dy() : 0.0;
        for (int c = 0; c < sub; ++c) {
          const double x = g.x_lo + (i + (c + 0.5) / sub) * g.dx();
          const ConservativeState u = prim_to_cons(p.state_at(x, y), gas);
          acc[0] += u.rho;
          acc[1] += u.mx;
          acc[2] += u.my;
          acc[3] += u.E;
        }
      }
      double* cell = a.at(i, j);
      for (int k = 0; k < 4; ++k) cell[k] = acc[k] * w;
    }
  }
  fill_ghosts(a, g.boundary, law);
  return a;
}

}  // namespace nnlci
