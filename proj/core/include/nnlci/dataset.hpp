#pragma once

#include "nnlci/config.hpp"
#include "nnlci/presets.hpp"
#include "nnlci/reference.hpp"
#include "nnlci/stencils.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace nnlci {

struct Dataset {
  Variant variant = Variant::cg1d;
  /// One line per generation run: preset, perturbation, grids, schemes.
  std::string provenance;
  std::vector<StencilSample> samples;

  int input_dim() const;
  int output_dim() const;
  /// Throws LengthMismatch on ragged samples or non-finite values.
  void validate() const;

  bool operator==(const Dataset&) const = default;
};

/// Appends `b` to `a`; both must hold the same variant and dimensions.
void append_dataset(Dataset& a, const Dataset& b);

/// Binary dataset file: magic "NLDS", u32 version, u32 variant, provenance
/// text, u64 sample count, u32 input and target dims, then per sample three
/// i32 location indices and the f64 input and target values.
void save_dataset(const Dataset& d, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

struct GenerationOptions {
  int reference_cells = 400;
  ReferenceOptions reference;
  GasModel gas;
};

/// Largest coarse step allowed for every preset in `ics` on a grid with
/// `cells` cells: cfl * margin * dx / S against the initial wave speeds,
/// further capped so each diffusion stage stays explicitly stable (with at
/// most two sub-steps for the boosted dc2d run).
double select_timestep(std::span<const ICPreset> ics, const InputSpec& in, int cells, double cfl,
                       double margin, const GasModel& gas);

/// The preset's coarse prediction grid with `dt` aligned to t_final.
GridSpec prediction_grid_for(const ICPreset& p, int cells, double dt);

/// The two input sources of one initial value problem, evolved to t_final.
struct InputFields {
  GridSpec prediction;
  FieldSnapshot a_prev;
  FieldSnapshot a_curr;
  FieldSnapshot b_prev;
  FieldSnapshot b_curr;
  int a_stride = 1;
  int b_stride = 2;
  std::string description;

  InputHalf half_a() const { return {&a_prev, &a_curr, a_stride}; }
  InputHalf half_b() const { return {&b_prev, &b_curr, b_stride}; }

  /// Half a's final level sampled on the prediction grid.
  FieldSnapshot coarse_solution() const;
};

InputFields run_inputs(const ICPreset& ic, const InputSpec& in, const GridSpec& prediction,
                       const GenerationOptions& opts);

/// High-fidelity solution at t_final sampled at the prediction nodes.
FieldSnapshot reference_on(const ICPreset& ic, const GridSpec& prediction,
                           const GenerationOptions& opts);

/// For each delta: perturb, run the inputs and the reference, and assemble
/// every interior sample of the prediction grid. Throws ConfigError on an
/// empty delta list; solver errors are rethrown with the delta attached.
Dataset generate_training_set(const ICPreset& preset, std::span<const double> deltas,
                              const InputSpec& in, const GridSpec& prediction,
                              const GenerationOptions& opts);

}  // namespace nnlci
