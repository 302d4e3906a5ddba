#pragma once

#include "nnlci/config.hpp"
#include "nnlci/dataset.hpp"
#include "nnlci/mlp.hpp"
#include "nnlci/optim.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace nnlci {

/// Key=value lines stored with a trained model so predictions can be
/// checked against the inputs it was trained on.
std::string model_metadata(const InputSpec& in);

/// Runs the network on every interior node of the prediction grid; the
/// boundary ring is copied from half a's solution. Throws VariantMismatch
/// when `in` differs from the model's training inputs and NonPhysicalState
/// (naming the node) on a non-finite network output.
FieldSnapshot predict_field(const MlpModel& m, const InputFields& inputs, const InputSpec& in);

struct RelativeL2 {
  /// Error of the concatenated variables, each scaled by the RMS of its
  /// reference values.
  double aggregate = 0.0;
  /// ||pred_k - ref_k|| / ||ref_k|| per variable (rho, u, [v,] p).
  std::vector<double> per_variable;
};

/// Relative l2 error over interior nodes. Throws GridMismatch when the
/// fields are on different grids.
RelativeL2 relative_l2(const FieldSnapshot& pred, const FieldSnapshot& ref);

/// Writes "x,rho,u,v,p" rows along the grid row nearest to `y` (ties go to
/// the lower row) after a "# y=<row coordinate>" line. Returns the row
/// coordinate. Throws OutOfRange when y is outside the domain.
double export_cross_section(const FieldSnapshot& f, double y, std::ostream& os);

/// Writes "x,y,rho,u,v,p" for every node, x fastest.
void export_contour(const FieldSnapshot& f, std::ostream& os);

using LogFn = std::function<void(const std::string&)>;

/// Coarse step sizes of an experiment.
struct TimestepPlan {
  /// (preset name, dt) pairs used for training data; several per preset
  /// when intermediate step sizes are requested.
  std::vector<std::pair<std::string, double>> training;
  /// Unaligned coarse step of the evaluation preset.
  double eval_dt = 0.0;
};

TimestepPlan plan_timesteps(const RunConfig& c);

GenerationOptions generation_options(const RunConfig& c);

Dataset build_training_set(const RunConfig& c, const LogFn& log = {});

/// Trains the configured network on `d` and records the input spec in the
/// model's metadata.
TrainResult train_model(const RunConfig& c, const Dataset& d, const LogFn& log = {});

struct EvalCase {
  double delta = 0.0;
  std::string label;
  FieldSnapshot prediction;
  FieldSnapshot reference;
  FieldSnapshot coarse;
  RelativeL2 prediction_error;
  RelativeL2 coarse_error;
};

/// "Original", "+3%", "-3%", ...
std::string delta_label(double delta);
/// "original", "plus3", "minus3", ... for file names.
std::string delta_file_tag(double delta);

EvalCase evaluate_delta(const RunConfig& c, const MlpModel& m, double delta);

/// Error table: one row per evaluation delta, deterministic formatting.
std::string error_table_csv(const std::vector<EvalCase>& cases, int dim);

struct RunOptions {
  bool dry_run = false;
  LogFn log;
};

struct ExperimentReport {
  std::vector<EvalCase> cases;
  std::string error_table;
  double final_loss = 0.0;
  std::size_t training_samples = 0;
};

/// Full pipeline: training data, training, evaluation at every eval delta.
/// Writes config.txt, dataset.nlds, model.nnlc, loss_trace.csv, errors.csv,
/// provenance.txt and per-case field files into c.out_dir. Errors are
/// rethrown tagged with the failing stage.
ExperimentReport run_experiment(const RunConfig& c, const RunOptions& opts = {});

void write_loss_trace(const std::vector<LossPoint>& trace, const std::filesystem::path& path);

}  // namespace nnlci
