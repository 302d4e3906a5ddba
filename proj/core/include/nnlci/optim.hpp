#pragma once

#include "nnlci/mlp.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nnlci {

struct TrainConfig {
  int adam_iters = 10000;
  int lbfgs_iters = 10000;
  double adam_lr = 1e-3;
  /// The Adam learning rate is multiplied by lr_decay every lr_decay_every
  /// iterations.
  int lr_decay_every = 10000;
  double lr_decay = 0.5;
  std::uint64_t seed = 0;
  int lbfgs_memory = 10;
  /// L-BFGS stops once the gradient norm falls below this.
  double tolerance = 1e-10;

  static constexpr int kMaxIters = 50000;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct LossPoint {
  std::string stage;  // "adam" or "lbfgs"
  int iter = 0;
  double loss = 0.0;
};

/// Receives (stage, iteration, loss) once per iteration.
using ProgressFn = std::function<void(const std::string&, int, double)>;

struct TrainResult {
  MlpModel model;
  std::vector<LossPoint> trace;
  double final_loss = 0.0;
  bool line_search_failed = false;
};

/// Objective for minimize_lbfgs: returns f(x) and writes the gradient.
using Objective = std::function<double(std::span<const double> x, std::span<double> g)>;

struct LbfgsOptions {
  int max_iters = 100;
  int memory = 10;
  double c1 = 1e-4;
  double c2 = 0.9;
  double grad_tol = 1e-10;
  int max_line_search_evals = 30;
};

struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Set when a line search could not satisfy the strong Wolfe conditions;
  /// `x` is then the best iterate found.
  bool line_search_failed = false;
  /// f after every accepted step, starting with f(x0).
  std::vector<double> trace;
};

/// Limited-memory BFGS with a strong-Wolfe line search (bracketing and
/// zoom with cubic interpolation).
LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0, const LbfgsOptions& opts,
                           const std::function<void(int, double)>& on_step = {});

/// Full-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8) for cfg.adam_iters
/// steps from the model's current parameters. Throws DivergedLoss on a
/// non-finite loss.
TrainResult train_adam(MlpModel m, const NormalizedBatch& batch, const TrainConfig& cfg,
                       const ProgressFn& progress = {});

/// L-BFGS for cfg.lbfgs_iters iterations from the model's current parameters.
TrainResult train_lbfgs(MlpModel m, const NormalizedBatch& batch, const TrainConfig& cfg,
                        const ProgressFn& progress = {});

/// Fits normalisation on `samples`, seeds the weights with cfg.seed, then
/// runs Adam followed by L-BFGS. The trace holds both stages.
TrainResult train(const std::vector<int>& layer_sizes, Activation act,
                  std::span<const StencilSample> samples, const TrainConfig& cfg,
                  const ProgressFn& progress = {});

}  // namespace nnlci
