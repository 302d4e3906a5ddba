#include "nnlci/dataset.hpp"

#include "nnlci/error.hpp"
#include "nnlci/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace nnlci {

namespace {

constexpr char kDatasetMagic[4] = {'N', 'L', 'D', 'S'};
constexpr std::uint32_t kDatasetVersion = 1;

[[noreturn]] void corrupt(const std::string& what) { throw CorruptDatasetFile(what); }

// Sub-steps the diffusion stage of a half needs, or 0 if two are not enough.
int needed_substeps(int dim, double alpha_factor, double dt_over_dx) {
  const double number = alpha_factor * dt_over_dx;
  const double limit = diffusion_limit(dim);
  if (number <= limit) return 1;
  if (number <= 2.0 * limit) return 2;
  return 0;
}

std::string describe_half(const HalfSpec& h) {
  std::ostringstream os;
  os << to_string(h.scheme) << "(refinement=" << h.refinement;
  if (h.scheme == HalfScheme::leapfrog_diffusion) os << ", alpha_factor=" << format_double(h.alpha_factor);
  os << ")";
  return os.str();
}

// Runs one half on the grid refined `h.refinement` times and returns the
// levels at t_final - dt_coarse and t_final.
EvolveResult run_half(const ICPreset& ic, const HalfSpec& h, const GridSpec& prediction,
                      const GenerationOptions& opts) {
  GridSpec g = prediction;
  for (int r = 0; r < h.refinement; ++r) g = refine(g);
  const int stride = h.stride();
  const double t = ic.t_final;
  if (h.scheme == HalfScheme::high_order) {
    const EulerLaw law(opts.gas);
    const StateArray cells = initial_cells(ic, g, opts.gas);
    const int k = step_count(g, t);
    const double times[2] = {(k - stride) * g.dt, k * g.dt};
    const auto fields = reference_solve(law, g, cells, times, opts.reference);
    return {cell_avg_to_point(fields[0], g, law, k - stride),
            cell_avg_to_point(fields[1], g, law, k)};
  }
  SchemeConfig cfg;
  cfg.kind = h.scheme == HalfScheme::rusanov ? SchemeKind::rusanov : SchemeKind::leapfrog_diffusion;
  cfg.alpha_factor = h.alpha_factor;
  if (cfg.kind == SchemeKind::leapfrog_diffusion) {
    cfg.substeps = needed_substeps(g.dim, h.alpha_factor, g.dt / g.dx());
    if (cfg.substeps == 0) throw ConfigError("time step too large for the diffusion stage");
  }
  EvolveOptions eo;
  eo.lag = stride;
  eo.gas = opts.gas;
  return evolve(initial_nodes(ic, g), cfg, t, eo);
}

}  // namespace

int Dataset::input_dim() const {
  return samples.empty() ? 0 : static_cast<int>(samples.front().input.size());
}

int Dataset::output_dim() const {
  return samples.empty() ? 0 : static_cast<int>(samples.front().target.size());
}

void Dataset::validate() const {
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    if (static_cast<int>(s.input.size()) != input_dim() ||
        static_cast<int>(s.target.size()) != output_dim()) {
      throw LengthMismatch("sample " + std::to_string(k) + " has different dimensions");
    }
    for (double v : s.input) {
      if (!std::isfinite(v)) throw LengthMismatch("sample " + std::to_string(k) + " has a non-finite input");
    }
    for (double v : s.target) {
      if (!std::isfinite(v)) throw LengthMismatch("sample " + std::to_string(k) + " has a non-finite target");
    }
  }
}

void append_dataset(Dataset& a, const Dataset& b) {
  if (b.samples.empty()) {
    a.provenance += b.provenance;
    return;
  }
  if (!a.samples.empty() &&
      (a.variant != b.variant || a.input_dim() != b.input_dim() || a.output_dim() != b.output_dim())) {
    throw LengthMismatch("cannot merge datasets of different shape or variant");
  }
  if (a.samples.empty()) a.variant = b.variant;
  a.provenance += b.provenance;
  a.samples.insert(a.samples.end(), b.samples.begin(), b.samples.end());
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  d.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  BinaryWriter w(os);
  w.bytes(kDatasetMagic, 4);
  w.u32(kDatasetVersion);
  w.u32(static_cast<std::uint32_t>(d.variant));
  w.text(d.provenance);
  w.u64(d.samples.size());
  w.u32(static_cast<std::uint32_t>(d.input_dim()));
  w.u32(static_cast<std::uint32_t>(d.output_dim()));
  for (const auto& s : d.samples) {
    w.i32(s.location.i);
    w.i32(s.location.j);
    w.i32(s.location.n);
    for (double v : s.input) w.f64(v);
    for (double v : s.target) w.f64(v);
  }
  if (!os) throw Error("failed writing " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) corrupt("cannot open dataset file " + path.string());
  BinaryReader r(is, [](const std::string& what) { corrupt("dataset file: " + what); });
  char magic[4];
  r.bytes(magic, 4);
  if (!std::equal(magic, magic + 4, kDatasetMagic)) corrupt("bad dataset magic");
  if (r.u32() != kDatasetVersion) corrupt("unsupported dataset version");
  const std::uint32_t variant = r.u32();
  if (variant > static_cast<std::uint32_t>(Variant::mixed)) corrupt("unknown variant tag");
  Dataset d;
  d.variant = static_cast<Variant>(variant);
  d.provenance = r.text();
  const std::uint64_t count = r.u64();
  const std::uint32_t din = r.u32();
  const std::uint32_t dout = r.u32();
  if (count > 0 && (din == 0 || dout == 0 || din > 4096 || dout > 64)) corrupt("implausible dims");
  // The payload size must match the header before anything is allocated.
  const auto here = is.tellg();
  is.seekg(0, std::ios::end);
  const auto remaining = static_cast<std::uint64_t>(is.tellg() - here);
  is.seekg(here);
  const std::uint64_t record = 12 + 8 * (static_cast<std::uint64_t>(din) + dout);
  if (count > remaining / record || count * record != remaining) {
    corrupt("payload size does not match the header dimensions");
  }
  d.samples.resize(count);
  for (auto& s : d.samples) {
    s.variant = d.variant;
    s.location.i = r.i32();
    s.location.j = r.i32();
    s.location.n = r.i32();
    s.input.resize(din);
    s.target.resize(dout);
    for (double& v : s.input) v = r.f64();
    for (double& v : s.target) v = r.f64();
  }
  if (!r.at_end()) corrupt("trailing bytes after dataset payload");
  return d;
}

double select_timestep(std::span<const ICPreset> ics, const InputSpec& in, int cells, double cfl,
                       double margin, const GasModel& gas) {
  if (ics.empty()) throw ConfigError("no presets to choose a time step for");
  double dt = std::numeric_limits<double>::infinity();
  for (const auto& ic : ics) {
    GridSpec g = ic.grid(cells);
    g.dt = 1.0;
    dt = std::min(dt, margin * cfl_timestep(initial_nodes(ic, g), cfl, gas));
    const double dx = g.dx();
    for (const HalfSpec* h : {&in.a, &in.b}) {
      if (h->scheme != HalfScheme::leapfrog_diffusion || h->alpha_factor <= 0.0) continue;
      const bool may_split = in.variant == Variant::dc2d && h == &in.b;
      const double cap = (may_split ? 2.0 : 1.0) * diffusion_limit(ic.dim) * dx / h->alpha_factor;
      dt = std::min(dt, cap);
    }
  }
  return dt;
}

GridSpec prediction_grid_for(const ICPreset& p, int cells, double dt) {
  GridSpec g = p.grid(cells);
  g.dt = dt;
  g = align_timestep(g, p.t_final);
  if (step_count(g, p.t_final) < 2) throw ConfigError("time step leaves fewer than two steps");
  g.validate();
  return g;
}

FieldSnapshot InputFields::coarse_solution() const {
  FieldSnapshot f(prediction, a_curr.time_index / a_stride);
  for (int j = 0; j < prediction.nodes_y(); ++j) {
    for (int i = 0; i < prediction.nodes_x(); ++i) {
      f.at(i, j) = a_curr.at(i * a_stride, prediction.dim == 2 ? j * a_stride : 0);
    }
  }
  fill_ghosts(f);
  return f;
}

InputFields run_inputs(const ICPreset& ic, const InputSpec& in, const GridSpec& prediction,
                       const GenerationOptions& opts) {
  in.validate(ic.dim);
  InputFields f;
  f.prediction = prediction;
  f.a_stride = in.a.stride();
  f.b_stride = in.b.stride();
  if (in.variant == Variant::dc2d) {
    SchemeConfig base;
    base.alpha_factor = in.a.alpha_factor;
    EvolveOptions eo;
    eo.gas = opts.gas;
    auto r = dual_diffusion_evolve(initial_nodes(ic, prediction), in.b.alpha_factor / in.a.alpha_factor,
                                   ic.t_final, base, eo);
    f.a_prev = std::move(r.base.prev);
    f.a_curr = std::move(r.base.curr);
    f.b_prev = std::move(r.boosted.prev);
    f.b_curr = std::move(r.boosted.curr);
  } else {
    auto a = run_half(ic, in.a, prediction, opts);
    auto b = run_half(ic, in.b, prediction, opts);
    f.a_prev = std::move(a.prev);
    f.a_curr = std::move(a.curr);
    f.b_prev = std::move(b.prev);
    f.b_curr = std::move(b.curr);
  }
  f.description = "a=" + describe_half(in.a) + " b=" + describe_half(in.b);
  return f;
}

FieldSnapshot reference_on(const ICPreset& ic, const GridSpec& prediction,
                           const GenerationOptions& opts) {
  const EulerLaw law(opts.gas);
  const GridSpec rg = ic.grid(opts.reference_cells);
  const CellField field = reference_solve(law, rg, initial_cells(ic, rg, opts.gas), ic.t_final,
                                          opts.reference);
  return cell_avg_to_point(field, prediction, law, step_count(prediction, ic.t_final));
}

Dataset generate_training_set(const ICPreset& preset, std::span<const double> deltas,
                              const InputSpec& in, const GridSpec& prediction,
                              const GenerationOptions& opts) {
  if (deltas.empty()) throw ConfigError("no perturbations requested");
  Dataset out;
  out.variant = in.variant;
  for (double delta : deltas) {
    const ICPreset ic = perturb_ic(preset, delta);
    Dataset part;
    part.variant = in.variant;
    try {
      const InputFields inputs = run_inputs(ic, in, prediction, opts);
      const FieldSnapshot ref = reference_on(ic, prediction, opts);
      std::optional<double> dt;
      if (in.append_dt) dt = prediction.dt;
      part.samples = assemble_all(inputs.half_a(), inputs.half_b(), in.variant, &ref, dt);
      std::ostringstream os;
      os << "preset=" << preset.name << " delta=" << format_double(delta)
         << " cells=" << prediction.nx << " dt=" << format_double(prediction.dt) << " "
         << inputs.description << " reference=" << reference_scheme_id(opts.reference)
         << "@" << opts.reference_cells << "\n";
      part.provenance = os.str();
    } catch (const Error&) {
      rethrow_with_context("preset " + preset.name + ", delta " + format_double(delta));
    }
    append_dataset(out, part);
  }
  return out;
}

}  // namespace nnlci
