#include "nnlci/config.hpp"

#include "nnlci/error.hpp"
#include "nnlci/io.hpp"
#include "nnlci/presets.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace nnlci {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string_view item =
        trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k > 0) s += ", ";
    s += format_double(v[k]);
  }
  return s;
}

}  // namespace

const KvEntry* KvSection::find(std::string_view key) const {
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (it->key == key) return &*it;
  }
  return nullptr;
}

KvDocument KvDocument::parse(std::string_view text, std::string origin) {
  KvDocument doc;
  doc.origin = std::move(origin);
  doc.sections.push_back({"", 0, {}});
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw ConfigError(doc.origin + ":" + std::to_string(line_no) + ": " + what);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) fail("empty section name");
      doc.sections.push_back({std::string(name), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) fail("missing key");
    if (doc.sections.back().find(key) != nullptr) fail("duplicate key '" + std::string(key) + "'");
    doc.sections.back().entries.push_back(
        {std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
  }
  return doc;
}

KvDocument KvDocument::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse(ss.str(), path.string());
}

const KvSection* KvDocument::section(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<const KvSection*> KvDocument::all(std::string_view name) const {
  std::vector<const KvSection*> out;
  for (const auto& s : sections) {
    if (s.name == name) out.push_back(&s);
  }
  return out;
}

void KvDocument::set(std::string_view section_name, std::string_view key, std::string value) {
  auto it = std::find_if(sections.begin(), sections.end(),
                         [&](const KvSection& s) { return s.name == section_name; });
  if (it == sections.end()) {
    sections.push_back({std::string(section_name), 0, {}});
    it = sections.end() - 1;
  }
  it->entries.push_back({std::string(key), std::move(value), 0});
}

double parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

KvReader::KvReader(const KvSection* s, std::string origin) : s_(s), origin_(std::move(origin)) {}

const KvEntry* KvReader::lookup(std::string_view key) {
  if (s_ == nullptr) return nullptr;
  const KvEntry* e = s_->find(key);
  if (e != nullptr) used_.emplace_back(key);
  return e;
}

bool KvReader::has(std::string_view key) const { return s_ != nullptr && s_->find(key) != nullptr; }

void KvReader::fail(std::string_view key, const std::string& what) const {
  std::ostringstream os;
  os << origin_;
  const KvEntry* e = s_ != nullptr ? s_->find(key) : nullptr;
  if (e != nullptr && e->line > 0) os << ":" << e->line;
  os << ": ";
  if (s_ != nullptr && !s_->name.empty()) os << "[" << s_->name << "] ";
  os << key << ": " << what;
  throw ConfigError(os.str());
}

std::string KvReader::str(std::string_view key, std::optional<std::string> fallback) {
  if (const KvEntry* e = lookup(key)) return e->value;
  if (!fallback) fail(key, "missing required key");
  return *fallback;
}

double KvReader::num(std::string_view key, std::optional<double> fallback) {
  const KvEntry* e = lookup(key);
  if (e == nullptr) {
    if (!fallback) fail(key, "missing required key");
    return *fallback;
  }
  try {
    return parse_number(e->value);
  } catch (const ConfigError& err) {
    fail(key, err.what());
  }
}

int KvReader::integer(std::string_view key, std::optional<int> fallback) {
  const KvEntry* e = lookup(key);
  if (e == nullptr) {
    if (!fallback) fail(key, "missing required key");
    return *fallback;
  }
  int v = 0;
  const std::string& t = e->value;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) fail(key, "not an integer");
  return v;
}

std::uint64_t KvReader::u64(std::string_view key, std::optional<std::uint64_t> fallback) {
  const KvEntry* e = lookup(key);
  if (e == nullptr) {
    if (!fallback) fail(key, "missing required key");
    return *fallback;
  }
  std::uint64_t v = 0;
  const std::string& t = e->value;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
    fail(key, "not a non-negative integer");
  }
  return v;
}

bool KvReader::flag(std::string_view key, std::optional<bool> fallback) {
  const KvEntry* e = lookup(key);
  if (e == nullptr) {
    if (!fallback) fail(key, "missing required key");
    return *fallback;
  }
  if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
  if (e->value == "false" || e->value == "no" || e->value == "0") return false;
  fail(key, "expected true or false");
}

std::vector<double> KvReader::nums(std::string_view key,
                                   std::optional<std::vector<double>> fallback) {
  const KvEntry* e = lookup(key);
  if (e == nullptr) {
    if (!fallback) fail(key, "missing required key");
    return *fallback;
  }
  std::vector<double> out;
  try {
    for (const auto& item : split_list(e->value)) out.push_back(parse_number(item));
  } catch (const ConfigError& err) {
    fail(key, err.what());
  }
  return out;
}

std::vector<std::string> KvReader::strs(std::string_view key,
                                        std::optional<std::vector<std::string>> fallback) {
  const KvEntry* e = lookup(key);
  if (e == nullptr) {
    if (!fallback) fail(key, "missing required key");
    return *fallback;
  }
  return split_list(e->value);
}

void KvReader::finish() const {
  if (s_ == nullptr) return;
  for (const auto& e : s_->entries) {
    if (std::find(used_.begin(), used_.end(), e.key) == used_.end()) {
      fail(e.key, "unknown key");
    }
  }
}

// ---------------------------------------------------------------------------

std::string to_string(HalfScheme s) {
  switch (s) {
    case HalfScheme::leapfrog_diffusion:
      return "leapfrog_diffusion";
    case HalfScheme::rusanov:
      return "rusanov";
    case HalfScheme::high_order:
      return "high_order";
  }
  return "?";
}

HalfScheme parse_half_scheme(const std::string& text) {
  if (text == "leapfrog_diffusion") return HalfScheme::leapfrog_diffusion;
  if (text == "rusanov") return HalfScheme::rusanov;
  if (text == "high_order") return HalfScheme::high_order;
  throw ConfigError("unknown input scheme '" + text + "'");
}

InputSpec default_input(Variant v, double c) {
  InputSpec in;
  in.variant = v;
  switch (v) {
    case Variant::cg1d:
    case Variant::cg2d:
      break;
    case Variant::cg1d_dt:
      in.append_dt = true;
      break;
    case Variant::dc2d:
      in.b = {HalfScheme::leapfrog_diffusion, 0, c};
      break;
    case Variant::mixed:
      in.a = {HalfScheme::rusanov, 0, 0.0};
      in.b = {HalfScheme::high_order, 0, 0.0};
      break;
  }
  return in;
}

void InputSpec::validate(int dim) const {
  for (const HalfSpec* h : {&a, &b}) {
    if (h->refinement < 0 || h->refinement > 1) throw ConfigError("refinement must be 0 or 1");
    if (!(h->alpha_factor >= 0.0)) throw ConfigError("alpha_factor must be non-negative");
  }
  if (a.refinement > b.refinement) {
    throw ConfigError("half a must run on the prediction grid when half b does not");
  }
  const bool same_scheme_two_grids = a.scheme == HalfScheme::leapfrog_diffusion && a == HalfSpec{
      HalfScheme::leapfrog_diffusion, 0, a.alpha_factor} && b == HalfSpec{
      HalfScheme::leapfrog_diffusion, 1, a.alpha_factor};
  switch (variant) {
    case Variant::cg1d:
    case Variant::cg1d_dt:
      if (dim != 1) throw ConfigError(to_string(variant) + " is a one-dimensional variant");
      if (!same_scheme_two_grids) {
        throw ConfigError("two-grid inputs need leapfrog_diffusion on refinements 0 and 1");
      }
      if (append_dt != (variant == Variant::cg1d_dt)) {
        throw ConfigError("append_dt must be set exactly for cg1d_dt");
      }
      break;
    case Variant::cg2d:
      if (dim != 2) throw ConfigError("cg2d is a two-dimensional variant");
      if (!same_scheme_two_grids) {
        throw ConfigError("two-grid inputs need leapfrog_diffusion on refinements 0 and 1");
      }
      if (append_dt) throw ConfigError("append_dt is only used by cg1d_dt");
      break;
    case Variant::dc2d:
      if (dim != 2) throw ConfigError("dc2d is a two-dimensional variant");
      if (a.scheme != HalfScheme::leapfrog_diffusion || b.scheme != HalfScheme::leapfrog_diffusion ||
          a.refinement != 0 || b.refinement != 0) {
        throw ConfigError("dc2d needs two leapfrog_diffusion runs on the prediction grid");
      }
      if (!(b.alpha_factor >= a.alpha_factor) || a.alpha_factor <= 0.0) {
        throw ConfigError("dc2d needs 0 < a.alpha_factor <= b.alpha_factor");
      }
      if (append_dt) throw ConfigError("append_dt is only used by cg1d_dt");
      break;
    case Variant::mixed:
      break;
  }
}

std::vector<int> default_hidden(const std::string& preset, int dim, bool cross_training,
                                bool append_dt) {
  if (dim == 1) {
    if (cross_training) return append_dt ? std::vector<int>(6, 255) : std::vector<int>(5, 66);
    return std::vector<int>(6, 180);
  }
  if (preset == "config4") return std::vector<int>(9, 360);
  if (preset == "config6" || preset == "config8") return std::vector<int>(8, 360);
  return std::vector<int>(8, 320);
}

namespace {

void apply_override(KvDocument& doc, const std::string& text) {
  const auto eq = text.find('=');
  const auto dot = text.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("override '" + text + "' is not of the form section.key=value");
  }
  doc.set(trim(std::string_view(text).substr(0, dot)),
          trim(std::string_view(text).substr(dot + 1, eq - dot - 1)),
          std::string(trim(std::string_view(text).substr(eq + 1))));
}

std::vector<int> parse_hidden(KvReader& r) {
  if (!r.has("hidden")) return {};
  const std::string text = r.str("hidden");
  // Either "6x128" or a list "128, 128, 64".
  std::vector<int> out;
  if (const auto x = text.find('x'); x != std::string::npos) {
    const double count = parse_number(text.substr(0, x));
    const double width = parse_number(text.substr(x + 1));
    if (count < 1 || width < 1 || count != static_cast<int>(count) ||
        width != static_cast<int>(width)) {
      r.fail("hidden", "expected LAYERSxWIDTH");
    }
    out.assign(static_cast<std::size_t>(count), static_cast<int>(width));
    return out;
  }
  for (double v : r.nums("hidden")) {
    if (v < 1 || v != static_cast<int>(v)) r.fail("hidden", "layer widths must be positive integers");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) r.fail("hidden", "no hidden layers given");
  return out;
}

HalfSpec parse_half(KvReader& r, const std::string& prefix, HalfSpec def) {
  HalfSpec h = def;
  h.scheme = parse_half_scheme(r.str(prefix + ".scheme", to_string(def.scheme)));
  h.refinement = r.integer(prefix + ".refinement", def.refinement);
  h.alpha_factor = r.num(prefix + ".alpha_factor", def.alpha_factor);
  return h;
}

}  // namespace

RunConfig parse_run_config(KvDocument doc, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) apply_override(doc, o);
  for (const auto& s : doc.sections) {
    static const std::vector<std::string> known = {"",         "problem",    "grid",  "input",
                                                   "training", "evaluation", "output"};
    if (std::find(known.begin(), known.end(), s.name) == known.end()) {
      throw ConfigError(doc.origin + ":" + std::to_string(s.line) + ": unknown section [" + s.name +
                        "]");
    }
    if (s.name.empty() && !s.entries.empty()) {
      throw ConfigError(doc.origin + ":" + std::to_string(s.entries.front().line) +
                        ": key outside of any section");
    }
    if (!s.name.empty() && doc.all(s.name).size() > 1) {
      throw ConfigError(doc.origin + ": section [" + s.name + "] appears more than once");
    }
  }

  RunConfig c;
  KvReader problem(doc.section("problem"), doc.origin);
  c.preset = problem.str("preset");
  c.train_presets = problem.strs("train_presets", std::vector<std::string>{c.preset});
  c.gamma = problem.num("gamma", 1.4);
  problem.finish();
  const ICPreset base = resolve_preset(c.preset);
  const int dim = base.dim;

  KvReader grid(doc.section("grid"), doc.origin);
  c.cells = grid.integer("cells", dim == 1 ? 50 : 200);
  c.reference_cells = grid.integer("reference_cells", 400);
  c.cfl = grid.num("cfl", 0.4);
  c.cfl_margin = grid.num("cfl_margin", 0.5);
  c.dt = grid.num("dt", 0.0);
  const std::string mode = grid.str("dt_mode", "shared");
  if (mode == "shared") {
    c.dt_mode = DtMode::shared;
  } else if (mode == "per_preset") {
    c.dt_mode = DtMode::per_preset;
  } else {
    grid.fail("dt_mode", "expected shared or per_preset");
  }
  c.intermediate_dts = grid.integer("intermediate_dts", 0);
  grid.finish();

  KvReader input(doc.section("input"), doc.origin);
  const Variant variant = parse_variant(input.str("variant", dim == 1 ? "cg1d" : "cg2d"));
  const InputSpec def = default_input(variant, input.num("c", 4.0));
  c.input.variant = variant;
  c.input.a = parse_half(input, "a", def.a);
  c.input.b = parse_half(input, "b", def.b);
  c.input.append_dt = input.flag("append_dt", def.append_dt);
  c.reference.flux = parse_riemann_flux(input.str("reference_flux", "hll"));
  c.reference.limiter = parse_limiter(input.str("reference_limiter", "minmod"));
  c.reference.cfl = input.num("reference_cfl", 0.4);
  input.finish();

  KvReader training(doc.section("training"), doc.origin);
  c.train_deltas = training.nums("deltas", std::vector<double>{-0.10, -0.08, -0.06, -0.04, -0.02,
                                                               0.02, 0.04, 0.06, 0.08, 0.10});
  c.hidden = parse_hidden(training);
  if (c.hidden.empty()) {
    c.hidden = default_hidden(base.name, dim, c.train_presets.size() > 1, c.input.append_dt);
  }
  c.activation = parse_activation(training.str("activation", "tanh"));
  c.train.adam_iters = training.integer("adam_iters", c.train.adam_iters);
  c.train.lbfgs_iters = training.integer("lbfgs_iters", c.train.lbfgs_iters);
  c.train.adam_lr = training.num("adam_lr", c.train.adam_lr);
  c.train.lr_decay_every = training.integer("lr_decay_every", c.train.lr_decay_every);
  c.train.lr_decay = training.num("lr_decay", c.train.lr_decay);
  c.train.lbfgs_memory = training.integer("lbfgs_memory", c.train.lbfgs_memory);
  c.train.tolerance = training.num("tolerance", c.train.tolerance);
  c.seed_given = training.has("seed");
  c.train.seed = training.u64("seed", 0);
  training.finish();

  KvReader eval(doc.section("evaluation"), doc.origin);
  std::vector<double> def_eval = {0.0, 0.03, -0.03, 0.05, -0.05};
  if (dim == 1) {
    def_eval.push_back(0.07);
    def_eval.push_back(-0.07);
  }
  c.eval_deltas = eval.nums("deltas", def_eval);
  c.cross_sections = eval.nums("cross_sections", std::vector<double>{});
  eval.finish();

  KvReader output(doc.section("output"), doc.origin);
  c.out_dir = output.str("dir", "nnlci-out");
  output.finish();

  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides) {
  return parse_run_config(KvDocument::load(path), overrides);
}

void RunConfig::validate() const {
  const ICPreset base = resolve_preset(preset);
  if (train_presets.empty()) throw ConfigError("train_presets is empty");
  for (const auto& name : train_presets) {
    const ICPreset p = resolve_preset(name);
    if (p.dim != base.dim) throw ConfigError("training preset " + name + " has another dimension");
  }
  if (!(gamma > 1.0)) throw ConfigError("gamma must exceed 1");
  if (cells < 4) throw ConfigError("grid.cells must be at least 4");
  if (reference_cells < cells * input.b.stride()) {
    throw ConfigError("reference_cells must be at least the finest input grid");
  }
  if (!(cfl > 0.0 && cfl < 1.0)) throw ConfigError("cfl must lie in (0, 1)");
  if (!(cfl_margin > 0.0 && cfl_margin <= 1.0)) throw ConfigError("cfl_margin must lie in (0, 1]");
  if (!(dt >= 0.0)) throw ConfigError("dt must be non-negative");
  if (intermediate_dts < 0) throw ConfigError("intermediate_dts must be non-negative");
  if (intermediate_dts > 0 && !input.append_dt) {
    throw ConfigError("intermediate time steps need the time step in the input");
  }
  if (!(reference.cfl > 0.0 && reference.cfl < 1.0)) {
    throw ConfigError("reference_cfl must lie in (0, 1)");
  }
  input.validate(base.dim);
  if (train_deltas.empty()) throw ConfigError("training.deltas is empty");
  if (eval_deltas.empty()) throw ConfigError("evaluation.deltas is empty");
  for (double d : train_deltas) {
    if (!(std::abs(d) < 0.5)) throw ConfigError("perturbations must satisfy |delta| < 0.5");
    for (double e : eval_deltas) {
      if (d == e) {
        throw ConfigError("training and evaluation perturbations overlap at " + format_double(d));
      }
    }
  }
  for (double e : eval_deltas) {
    if (!(std::abs(e) < 0.5)) throw ConfigError("perturbations must satisfy |delta| < 0.5");
  }
  for (int h : hidden) {
    if (h < 1) throw ConfigError("hidden widths must be positive");
  }
  train.validate();
  for (double y : cross_sections) {
    if (base.dim != 2) throw ConfigError("cross sections are only defined in 2D");
    if (!(y >= base.y_lo && y <= base.y_hi)) throw ConfigError("cross section outside the domain");
  }
}

std::string format_run_config(const RunConfig& c) {
  std::ostringstream os;
  auto half = [&](const char* p, const HalfSpec& h) {
    os << p << ".scheme = " << to_string(h.scheme) << "\n"
       << p << ".refinement = " << h.refinement << "\n"
       << p << ".alpha_factor = " << format_double(h.alpha_factor) << "\n";
  };
  os << "[problem]\npreset = " << c.preset << "\ntrain_presets = ";
  for (std::size_t k = 0; k < c.train_presets.size(); ++k) {
    os << (k > 0 ? ", " : "") << c.train_presets[k];
  }
  os << "\ngamma = " << format_double(c.gamma) << "\n\n[grid]\ncells = " << c.cells
     << "\nreference_cells = " << c.reference_cells << "\ncfl = " << format_double(c.cfl)
     << "\ncfl_margin = " << format_double(c.cfl_margin) << "\ndt = " << format_double(c.dt)
     << "\ndt_mode = " << (c.dt_mode == DtMode::shared ? "shared" : "per_preset")
     << "\nintermediate_dts = " << c.intermediate_dts << "\n\n[input]\nvariant = "
     << to_string(c.input.variant) << "\n";
  half("a", c.input.a);
  half("b", c.input.b);
  os << "append_dt = " << (c.input.append_dt ? "true" : "false")
     << "\nreference_flux = " << to_string(c.reference.flux)
     << "\nreference_limiter = " << to_string(c.reference.limiter)
     << "\nreference_cfl = " << format_double(c.reference.cfl) << "\n\n[training]\ndeltas = "
     << join_numbers(c.train_deltas) << "\nhidden = ";
  for (std::size_t k = 0; k < c.hidden.size(); ++k) os << (k > 0 ? ", " : "") << c.hidden[k];
  os << "\nactivation = " << to_string(c.activation) << "\nadam_iters = " << c.train.adam_iters
     << "\nlbfgs_iters = " << c.train.lbfgs_iters << "\nadam_lr = " << format_double(c.train.adam_lr)
     << "\nlr_decay_every = " << c.train.lr_decay_every
     << "\nlr_decay = " << format_double(c.train.lr_decay)
     << "\nlbfgs_memory = " << c.train.lbfgs_memory
     << "\ntolerance = " << format_double(c.train.tolerance) << "\nseed = " << c.train.seed
     << "\n\n[evaluation]\ndeltas = " << join_numbers(c.eval_deltas)
     << "\ncross_sections = " << join_numbers(c.cross_sections) << "\n\n[output]\ndir = "
     << c.out_dir.string() << "\n";
  return os.str();
}

}  // namespace nnlci
