#pragma once

#include "nnlci/stencils.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace nnlci {

enum class Activation { tanh, relu };

std::string to_string(Activation a);
Activation parse_activation(const std::string& text);

/// Per-feature z-score statistics for inputs and outputs.
struct NormStats {
  std::vector<double> in_mean;
  std::vector<double> in_std;
  std::vector<double> out_mean;
  std::vector<double> out_std;

  bool operator==(const NormStats&) const = default;
};

/// Standard deviations below this are replaced by 1.
inline constexpr double kMinStd = 1e-12;

/// Mean and population standard deviation of every input and target
/// feature over `samples`.
NormStats fit_norm_stats(std::span<const StencilSample> samples);

NormStats identity_norm_stats(int d_in, int d_out);

/// Dense feed-forward network. All weights and biases live in one flat
/// parameter vector so optimizers can treat the model as a point in R^n.
/// Layer l maps layer_sizes[l] -> layer_sizes[l+1]; its weight matrix is
/// stored column-major followed by its bias.
class MlpModel {
 public:
  MlpModel() = default;
  explicit MlpModel(std::vector<int> layer_sizes, Activation activation = Activation::tanh);

  /// Uniform Glorot initialisation of the weights, zero biases.
  void init_glorot(std::uint64_t seed);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  Activation activation() const { return activation_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t num_params() const { return params_.size(); }

  std::size_t weight_offset(int layer) const { return offsets_[static_cast<std::size_t>(layer)]; }
  std::size_t bias_offset(int layer) const;

  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
  Eigen::Map<Eigen::MatrixXd> weight(int layer);
  Eigen::Map<Eigen::VectorXd> bias(int layer);

  NormStats norm;
  /// Free-form key=value lines (variant, time step, grids, ...), persisted
  /// with the model.
  std::string metadata;

  /// Throws CorruptModelFile if shapes or values are inconsistent.
  void validate() const;

  bool operator==(const MlpModel&) const = default;

 private:
  std::vector<int> sizes_;
  Activation activation_ = Activation::tanh;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;
};

/// Normalised training matrices: one column per sample.
struct NormalizedBatch {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  std::size_t size() const { return static_cast<std::size_t>(x.cols()); }
};

NormalizedBatch normalize_batch(const MlpModel& m, std::span<const StencilSample> samples);

/// Raw input -> raw output (normalisation applied on both ends). Throws
/// LengthMismatch on a wrong input length.
std::vector<double> forward(const MlpModel& m, std::span<const double> x);

/// Forward pass for many raw inputs at once, one column per input.
Eigen::MatrixXd forward_batch(const MlpModel& m, const Eigen::MatrixXd& x);

/// Sum over samples of ||net(x) - y||^2 in normalised output space.
double loss(const MlpModel& m, const NormalizedBatch& batch);
double loss(const MlpModel& m, std::span<const StencilSample> samples);

/// Loss and its exact gradient with respect to m.params(); `grad` must have
/// num_params() entries. Samples are processed in fixed-size column chunks in
/// a fixed order so the result is bitwise reproducible.
double loss_and_grad(const MlpModel& m, const NormalizedBatch& batch, std::span<double> grad);

std::vector<double> grad(const MlpModel& m, std::span<const StencilSample> samples);

/// Binary model file: magic "NNLC", u32 version, architecture header,
/// norm stats, metadata and f64 parameters, all little-endian.
void save_model(const MlpModel& m, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace nnlci
