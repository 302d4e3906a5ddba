#include "nnlci/harness.hpp"

#include "nnlci/error.hpp"
#include "nnlci/io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace nnlci {

namespace {

std::map<std::string, std::string> parse_metadata(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

std::string half_text(const HalfSpec& h) {
  return to_string(h.scheme) + "," + std::to_string(h.refinement) + "," +
         format_double(h.alpha_factor);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw Error("failed writing " + path.string());
}

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error&) {
    rethrow_with_context(name);
  }
}

std::vector<ICPreset> perturbed(const ICPreset& p, const std::vector<double>& deltas) {
  std::vector<ICPreset> out;
  for (double d : deltas) out.push_back(perturb_ic(p, d));
  return out;
}

}  // namespace

std::string model_metadata(const InputSpec& in) {
  return "variant=" + to_string(in.variant) + "\ninput_a=" + half_text(in.a) +
         "\ninput_b=" + half_text(in.b) + "\nappend_dt=" + (in.append_dt ? "true" : "false") +
         "\n";
}

FieldSnapshot predict_field(const MlpModel& m, const InputFields& inputs, const InputSpec& in) {
  const auto meta = parse_metadata(m.metadata);
  const auto want = parse_metadata(model_metadata(in));
  for (const auto& [k, v] : want) {
    const auto it = meta.find(k);
    if (it == meta.end() || it->second != v) {
      throw VariantMismatch("model was trained with " + k + "=" +
                            (it == meta.end() ? std::string("<unset>") : it->second) +
                            " but the inputs have " + k + "=" + v);
    }
  }
  std::optional<double> dt;
  if (in.append_dt) dt = inputs.prediction.dt;
  const auto samples = assemble_all(inputs.half_a(), inputs.half_b(), in.variant, nullptr, dt);
  const GridSpec& g = inputs.prediction;
  const int dim = g.dim;
  const int nvar = euler_var_count(dim);
  if (samples.empty()) return inputs.coarse_solution();
  if (static_cast<int>(samples.front().input.size()) != m.input_dim() || m.output_dim() != nvar) {
    throw VariantMismatch("model dimensions do not match the assembled inputs");
  }
  Eigen::MatrixXd x(m.input_dim(), static_cast<Eigen::Index>(samples.size()));
  for (std::size_t c = 0; c < samples.size(); ++c) {
    for (int k = 0; k < m.input_dim(); ++k) {
      x(k, static_cast<Eigen::Index>(c)) = samples[c].input[static_cast<std::size_t>(k)];
    }
  }
  const Eigen::MatrixXd y = forward_batch(m, x);
  FieldSnapshot out = inputs.coarse_solution();
  for (std::size_t c = 0; c < samples.size(); ++c) {
    const auto& loc = samples[c].location;
    PrimitiveState& s = out.at(loc.i, loc.j);
    for (int k = 0; k < nvar; ++k) {
      const double v = y(k, static_cast<Eigen::Index>(c));
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "network produced a non-finite value at node (" << loc.i << ", " << loc.j << ")";
        throw NonPhysicalState(os.str());
      }
      set_primitive_component(s, k, dim, v);
    }
  }
  fill_ghosts(out);
  return out;
}

RelativeL2 relative_l2(const FieldSnapshot& pred, const FieldSnapshot& ref) {
  const GridSpec& a = pred.grid;
  const GridSpec& b = ref.grid;
  if (a.dim != b.dim || a.nx != b.nx || a.ny != b.ny || a.x_lo != b.x_lo || a.x_hi != b.x_hi ||
      a.y_lo != b.y_lo || a.y_hi != b.y_hi) {
    throw GridMismatch("relative error needs both fields on the same grid");
  }
  const int dim = a.dim;
  const int nvar = euler_var_count(dim);
  const int j_lo = dim == 2 ? 1 : 0;
  const int j_hi = dim == 2 ? a.ny - 1 : 0;
  std::vector<double> diff2(static_cast<std::size_t>(nvar), 0.0);
  std::vector<double> ref2(static_cast<std::size_t>(nvar), 0.0);
  std::size_t count = 0;
  for (int j = j_lo; j <= j_hi; ++j) {
    for (int i = 1; i <= a.nx - 1; ++i) {
      ++count;
      for (int k = 0; k < nvar; ++k) {
        const double r = primitive_component(ref.at(i, j), k, dim);
        const double p = primitive_component(pred.at(i, j), k, dim);
        diff2[static_cast<std::size_t>(k)] += (p - r) * (p - r);
        ref2[static_cast<std::size_t>(k)] += r * r;
      }
    }
  }
  RelativeL2 out;
  double num = 0.0;
  double den = 0.0;
  for (int k = 0; k < nvar; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double rms = count > 0 ? std::sqrt(ref2[kk] / static_cast<double>(count)) : 0.0;
    const double scale2 = rms > 0.0 ? rms * rms : 1.0;
    num += diff2[kk] / scale2;
    den += ref2[kk] / scale2;
    out.per_variable.push_back(ref2[kk] > 0.0 ? std::sqrt(diff2[kk] / ref2[kk])
                                              : std::sqrt(diff2[kk]));
  }
  out.aggregate = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return out;
}

double export_cross_section(const FieldSnapshot& f, double y, std::ostream& os) {
  const GridSpec& g = f.grid;
  if (g.dim != 2) throw OutOfRange("cross sections need a two-dimensional field");
  if (!(y >= g.y_lo && y <= g.y_hi)) {
    throw OutOfRange("y = " + format_double(y) + " is outside the domain");
  }
  const double r = (y - g.y_lo) / g.dy();
  int j = static_cast<int>(std::floor(r));
  if (r - j > 0.5) ++j;
  j = std::min(j, g.ny);
  const double row = g.y(j);
  os << "# y=" << format_double(row) << "\n";
  os << "x,rho,u,v,p\n";
  for (int i = 0; i < g.nodes_x(); ++i) {
    const PrimitiveState& s = f.at(i, j);
    os << format_double(g.x(i)) << "," << format_double(s.rho) << "," << format_double(s.u) << ","
       << format_double(s.v) << "," << format_double(s.p) << "\n";
  }
  return row;
}

void export_contour(const FieldSnapshot& f, std::ostream& os) {
  os << "x,y,rho,u,v,p\n";
  if (f.values.empty()) return;
  const GridSpec& g = f.grid;
  for (int j = 0; j < g.nodes_y(); ++j) {
    for (int i = 0; i < g.nodes_x(); ++i) {
      const PrimitiveState& s = f.at(i, j);
      os << format_double(g.x(i)) << "," << format_double(g.y(j)) << "," << format_double(s.rho)
         << "," << format_double(s.u) << "," << format_double(s.v) << "," << format_double(s.p)
         << "\n";
    }
  }
}

TimestepPlan plan_timesteps(const RunConfig& c) {
  const ICPreset eval_preset = resolve_preset(c.preset);
  std::vector<ICPreset> bases;
  for (const auto& name : c.train_presets) bases.push_back(resolve_preset(name));

  // Every initial condition a preset's step must handle.
  auto family = [&](const ICPreset& p) {
    std::vector<ICPreset> ics = perturbed(p, c.train_deltas);
    if (p.name == eval_preset.name) {
      for (auto& e : perturbed(p, c.eval_deltas)) ics.push_back(std::move(e));
    }
    return ics;
  };
  const GasModel gas = c.gas();
  TimestepPlan plan;
  std::vector<double> own;
  if (c.dt > 0.0) {
    own.assign(bases.size(), c.dt);
    plan.eval_dt = c.dt;
  } else if (c.dt_mode == DtMode::shared) {
    std::vector<ICPreset> all = family(eval_preset);
    for (const auto& p : bases) {
      for (auto& ic : family(p)) all.push_back(std::move(ic));
    }
    const double dt = select_timestep(all, c.input, c.cells, c.cfl, c.cfl_margin, gas);
    own.assign(bases.size(), dt);
    plan.eval_dt = dt;
  } else {
    for (const auto& p : bases) {
      own.push_back(select_timestep(family(p), c.input, c.cells, c.cfl, c.cfl_margin, gas));
    }
    plan.eval_dt =
        select_timestep(family(eval_preset), c.input, c.cells, c.cfl, c.cfl_margin, gas);
  }
  std::vector<double> extra;
  if (c.intermediate_dts > 0) {
    const auto [lo, hi] = std::minmax_element(own.begin(), own.end());
    for (int k = 1; k <= c.intermediate_dts; ++k) {
      extra.push_back(*lo + (*hi - *lo) * k / (c.intermediate_dts + 1));
    }
  }
  for (std::size_t b = 0; b < bases.size(); ++b) {
    plan.training.emplace_back(bases[b].name, own[b]);
    for (double dt : extra) plan.training.emplace_back(bases[b].name, dt);
  }
  return plan;
}

GenerationOptions generation_options(const RunConfig& c) {
  GenerationOptions o;
  o.reference_cells = c.reference_cells;
  o.reference = c.reference;
  o.gas = c.gas();
  return o;
}

Dataset build_training_set(const RunConfig& c, const LogFn& log) {
  const TimestepPlan plan = plan_timesteps(c);
  const GenerationOptions opts = generation_options(c);
  Dataset all;
  all.variant = c.input.variant;
  for (const auto& [name, dt] : plan.training) {
    const ICPreset p = resolve_preset(name);
    const GridSpec g = prediction_grid_for(p, c.cells, dt);
    if (log) log("generating " + name + " with dt=" + format_double(g.dt));
    append_dataset(all, generate_training_set(p, c.train_deltas, c.input, g, opts));
  }
  return all;
}

TrainResult train_model(const RunConfig& c, const Dataset& d, const LogFn& log) {
  d.validate();
  std::vector<int> sizes = {d.input_dim()};
  sizes.insert(sizes.end(), c.hidden.begin(), c.hidden.end());
  sizes.push_back(d.output_dim());
  ProgressFn progress;
  if (log) {
    progress = [&](const std::string& s, int it, double f) {
      if (it % 500 == 0) {
        std::ostringstream os;
        os << s << " " << it << " loss " << f;
        log(os.str());
      }
    };
  }
  TrainResult r = train(sizes, c.activation, d.samples, c.train, progress);
  r.model.metadata = model_metadata(c.input);
  return r;
}

std::string delta_file_tag(double delta) {
  if (delta == 0.0) return "original";
  const double pct = std::round(delta * 1000.0) / 10.0;
  return (delta > 0 ? "plus" : "minus") + format_double(std::abs(pct));
}

std::string delta_label(double delta) {
  if (delta == 0.0) return "Original";
  const double pct = std::round(delta * 1000.0) / 10.0;
  return (delta > 0 ? "+" : "-") + format_double(std::abs(pct)) + "%";
}

EvalCase evaluate_delta(const RunConfig& c, const MlpModel& m, double delta) {
  const ICPreset base = resolve_preset(c.preset);
  const TimestepPlan plan = plan_timesteps(c);
  const ICPreset ic = perturb_ic(base, delta);
  const GridSpec g = prediction_grid_for(ic, c.cells, plan.eval_dt);
  const GenerationOptions opts = generation_options(c);
  EvalCase e;
  e.delta = delta;
  e.label = delta_label(delta);
  const InputFields inputs = run_inputs(ic, c.input, g, opts);
  e.reference = reference_on(ic, g, opts);
  e.prediction = predict_field(m, inputs, c.input);
  e.coarse = inputs.coarse_solution();
  e.prediction_error = relative_l2(e.prediction, e.reference);
  e.coarse_error = relative_l2(e.coarse, e.reference);
  return e;
}

std::string error_table_csv(const std::vector<EvalCase>& cases, int dim) {
  const std::vector<std::string> vars =
      dim == 2 ? std::vector<std::string>{"rho", "u", "v", "p"}
               : std::vector<std::string>{"rho", "u", "p"};
  std::ostringstream os;
  os << "case,delta,prediction_rel_l2,input_rel_l2";
  for (const auto& v : vars) os << ",prediction_" << v;
  for (const auto& v : vars) os << ",input_" << v;
  os << "\n";
  for (const auto& e : cases) {
    os << csv_escape(e.label) << "," << format_double(e.delta) << ","
       << format_double(e.prediction_error.aggregate) << ","
       << format_double(e.coarse_error.aggregate);
    for (double v : e.prediction_error.per_variable) os << "," << format_double(v);
    for (double v : e.coarse_error.per_variable) os << "," << format_double(v);
    os << "\n";
  }
  return os.str();
}

void write_loss_trace(const std::vector<LossPoint>& trace, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "stage,iter,loss\n";
  for (const auto& p : trace) os << p.stage << "," << p.iter << "," << format_double(p.loss) << "\n";
  write_text(path, os.str());
}

ExperimentReport run_experiment(const RunConfig& c, const RunOptions& opts) {
  using clock = std::chrono::steady_clock;
  auto log = [&](const std::string& s) {
    if (opts.log) opts.log(s);
  };
  stage("config", [&] {
    c.validate();
    if (!c.seed_given) throw ConfigError("training.seed must be set");
  });
  const ICPreset base = stage("config", [&] { return resolve_preset(c.preset); });
  const TimestepPlan plan = stage("config", [&] { return plan_timesteps(c); });
  ExperimentReport report;
  if (opts.dry_run) {
    log("configuration is valid; eval dt " + format_double(plan.eval_dt));
    return report;
  }
  std::filesystem::create_directories(c.out_dir);
  write_text(c.out_dir / "config.txt", format_run_config(c));

  std::ostringstream prov;
  prov << "reference_scheme=" << reference_scheme_id(c.reference) << "\n"
       << "seed=" << c.train.seed << "\n";
  auto t0 = clock::now();
  const Dataset data = stage("generate", [&] { return build_training_set(c, opts.log); });
  stage("generate", [&] { save_dataset(data, c.out_dir / "dataset.nlds"); });
  prov << "generate_seconds=" << std::chrono::duration<double>(clock::now() - t0).count() << "\n";
  report.training_samples = data.samples.size();
  log("training samples: " + std::to_string(data.samples.size()));

  t0 = clock::now();
  const TrainResult trained = stage("train", [&] { return train_model(c, data, opts.log); });
  prov << "train_seconds=" << std::chrono::duration<double>(clock::now() - t0).count() << "\n"
       << "final_loss=" << format_double(trained.final_loss) << "\n"
       << "line_search_failed=" << (trained.line_search_failed ? "true" : "false") << "\n";
  report.final_loss = trained.final_loss;
  stage("train", [&] {
    save_model(trained.model, c.out_dir / "model.nnlc");
    write_loss_trace(trained.trace, c.out_dir / "loss_trace.csv");
  });

  t0 = clock::now();
  for (double delta : c.eval_deltas) {
    EvalCase e = stage("evaluate", [&] { return evaluate_delta(c, trained.model, delta); });
    log(e.label + ": prediction " + format_double(e.prediction_error.aggregate) + ", input " +
        format_double(e.coarse_error.aggregate));
    stage("export", [&] {
      const std::string tag = delta_file_tag(delta);
      const std::map<std::string, std::string> meta = {{"delta", format_double(delta)}};
      write_snapshot(e.prediction, c.out_dir / ("prediction_" + tag + ".field"), meta);
      auto ref_meta = meta;
      ref_meta["scheme"] = reference_scheme_id(c.reference);
      write_snapshot(e.reference, c.out_dir / ("reference_" + tag + ".field"), ref_meta);
      write_snapshot(e.coarse, c.out_dir / ("input_" + tag + ".field"), meta);
      for (double y : c.cross_sections) {
        std::ostringstream os;
        export_cross_section(e.prediction, y, os);
        write_text(c.out_dir / ("cross_section_" + tag + "_y" + format_double(y) + ".csv"),
                   os.str());
      }
    });
    report.cases.push_back(std::move(e));
  }
  prov << "evaluate_seconds=" << std::chrono::duration<double>(clock::now() - t0).count() << "\n"
       << "[dataset]\n"
       << data.provenance;
  report.error_table = error_table_csv(report.cases, base.dim);
  write_text(c.out_dir / "errors.csv", report.error_table);
  write_text(c.out_dir / "provenance.txt", prov.str());
  return report;
}

}  // namespace nnlci
