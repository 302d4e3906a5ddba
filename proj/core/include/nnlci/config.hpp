#pragma once

#include "nnlci/euler.hpp"
#include "nnlci/optim.hpp"
#include "nnlci/reference.hpp"
#include "nnlci/schemes.hpp"
#include "nnlci/stencils.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nnlci {

// ---------------------------------------------------------------------------
// Sectioned key=value text. '#' starts a comment, "[name]" opens a section
// (names may repeat), everything before the first header belongs to an
// unnamed section.

struct KvEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct KvSection {
  std::string name;
  int line = 0;
  std::vector<KvEntry> entries;

  const KvEntry* find(std::string_view key) const;
};

struct KvDocument {
  std::string origin;
  std::vector<KvSection> sections;

  /// Throws ConfigError with origin:line on malformed lines.
  static KvDocument parse(std::string_view text, std::string origin = "<string>");
  static KvDocument load(const std::filesystem::path& path);

  /// First section called `name`, or nullptr.
  const KvSection* section(std::string_view name) const;
  std::vector<const KvSection*> all(std::string_view name) const;

  /// Sets (or adds) section.key = value.
  void set(std::string_view section, std::string_view key, std::string value);
};

/// Typed access to one section that remembers which keys were read, so
/// misspelt keys can be reported.
class KvReader {
 public:
  KvReader(const KvSection* s, std::string origin);

  bool has(std::string_view key) const;
  std::string str(std::string_view key, std::optional<std::string> fallback = {});
  double num(std::string_view key, std::optional<double> fallback = {});
  int integer(std::string_view key, std::optional<int> fallback = {});
  std::uint64_t u64(std::string_view key, std::optional<std::uint64_t> fallback = {});
  bool flag(std::string_view key, std::optional<bool> fallback = {});
  std::vector<double> nums(std::string_view key, std::optional<std::vector<double>> fallback = {});
  std::vector<std::string> strs(std::string_view key,
                                std::optional<std::vector<std::string>> fallback = {});

  /// Throws ConfigError naming any key that was never read.
  void finish() const;

  [[noreturn]] void fail(std::string_view key, const std::string& what) const;

 private:
  const KvEntry* lookup(std::string_view key);
  const KvSection* s_;
  std::string origin_;
  std::vector<std::string> used_;
};

double parse_number(std::string_view text);

// ---------------------------------------------------------------------------
// Experiment configuration.

enum class HalfScheme { leapfrog_diffusion, rusanov, high_order };

std::string to_string(HalfScheme s);
HalfScheme parse_half_scheme(const std::string& text);

/// One of the two solution sources feeding the network.
struct HalfSpec {
  HalfScheme scheme = HalfScheme::leapfrog_diffusion;
  /// 0: the prediction grid itself, 1: its once-refined grid.
  int refinement = 0;
  /// alpha = alpha_factor * dx of the grid the half runs on.
  double alpha_factor = 1.0;

  int stride() const { return 1 << refinement; }
  bool operator==(const HalfSpec&) const = default;
};

struct InputSpec {
  Variant variant = Variant::cg1d;
  HalfSpec a;
  HalfSpec b{HalfScheme::leapfrog_diffusion, 1, 1.0};
  bool append_dt = false;

  /// Throws ConfigError when the halves do not fit the declared variant.
  void validate(int dim) const;
  bool operator==(const InputSpec&) const = default;
};

/// Default halves for a variant; `c` is the diffusion ratio used by dc2d.
InputSpec default_input(Variant v, double c = 4.0);

enum class DtMode { shared, per_preset };

struct RunConfig {
  // [problem]
  std::string preset;
  /// Presets whose perturbations form the training set (default: preset).
  std::vector<std::string> train_presets;
  double gamma = 1.4;

  // [grid]
  int cells = 50;
  int reference_cells = 400;
  double cfl = 0.4;
  double cfl_margin = 0.5;
  /// Fixed coarse step; 0 selects it from the CFL rule.
  double dt = 0.0;
  DtMode dt_mode = DtMode::shared;
  /// Extra evenly spaced step sizes between the presets' own steps, used
  /// for training when the step is part of the input.
  int intermediate_dts = 0;

  // [input]
  InputSpec input;
  ReferenceOptions reference;

  // [training]
  std::vector<double> train_deltas;
  std::vector<int> hidden;
  Activation activation = Activation::tanh;
  TrainConfig train;
  bool seed_given = false;

  // [evaluation]
  std::vector<double> eval_deltas;
  std::vector<double> cross_sections;

  // [output]
  std::filesystem::path out_dir = "nnlci-out";

  GasModel gas() const { return GasModel{gamma}; }

  /// Full checks that need no computation (presets must resolve).
  void validate() const;
};

/// Parses a run configuration. `overrides` are "section.key=value" strings
/// applied on top of the file.
RunConfig parse_run_config(KvDocument doc, const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides = {});

/// Canonical text form, written into provenance files.
std::string format_run_config(const RunConfig& c);

/// Default hidden layers for a preset family (1D: 6x180, 2D by configuration).
std::vector<int> default_hidden(const std::string& preset, int dim, bool cross_training,
                                 bool append_dt);

}  // namespace nnlci
