#include "nnlci/optim.hpp"

#include "nnlci/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace nnlci {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

[[noreturn]] void diverged(const std::string& stage, int iter, double value) {
  std::ostringstream os;
  os << stage << " loss became non-finite (" << value << ") at iteration " << iter;
  throw DivergedLoss(os.str());
}

// Minimiser of the cubic through (a, fa, ga) and (b, fb, gb); falls back to
// bisection when the cubic is degenerate or lands too close to an end.
double cubic_min(double a, double fa, double ga, double b, double fb, double gb) {
  const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - ga * gb;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const double pad = 0.1 * (hi - lo);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double t = b - (b - a) * (gb + d2 - d1) / (gb - ga + 2.0 * d2);
    if (std::isfinite(t) && t > lo + pad && t < hi - pad) return t;
  }
  return 0.5 * (a + b);
}

struct LinePoint {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;
  std::vector<double> grad;
};

class LineSearch {
 public:
  LineSearch(const Objective& f, std::span<const double> x, std::span<const double> dir,
             const LbfgsOptions& o)
      : f_(f), x_(x), d_(dir), o_(o), trial_(x.size()) {}

  // On success `accepted` satisfies the strong Wolfe conditions. `best` is
  // always the lowest finite point evaluated.
  bool search(const LinePoint& zero, double alpha0) {
    zero_ = &zero;
    best.f = zero.f;
    best.alpha = 0.0;
    LinePoint prev{0.0, zero.f, zero.slope, {}};
    double alpha = alpha0;
    for (int k = 0; evals_ < o_.max_line_search_evals; ++k) {
      LinePoint cur = eval(alpha);
      if (!armijo(cur) || (k > 0 && cur.f >= prev.f)) return zoom(std::move(prev), std::move(cur));
      if (std::abs(cur.slope) <= -o_.c2 * zero.slope) {
        accepted = std::move(cur);
        return true;
      }
      if (cur.slope >= 0.0) return zoom(std::move(cur), std::move(prev));
      prev = std::move(cur);
      alpha *= 2.0;
    }
    return false;
  }

  LinePoint accepted;
  LinePoint best;

 private:
  bool armijo(const LinePoint& p) const {
    return std::isfinite(p.f) && p.f <= zero_->f + o_.c1 * p.alpha * zero_->slope;
  }

  LinePoint eval(double alpha) {
    for (std::size_t k = 0; k < x_.size(); ++k) trial_[k] = x_[k] + alpha * d_[k];
    LinePoint p;
    p.alpha = alpha;
    p.grad.assign(x_.size(), 0.0);
    p.f = f_(trial_, p.grad);
    p.slope = dot(p.grad, d_);
    ++evals_;
    if (std::isfinite(p.f) && p.f < best.f) best = p;
    return p;
  }

  bool zoom(LinePoint lo, LinePoint hi) {
    while (evals_ < o_.max_line_search_evals) {
      if (std::abs(hi.alpha - lo.alpha) <= 1e-14 * std::max(1.0, lo.alpha)) break;
      const double alpha = std::isfinite(hi.f) && std::isfinite(hi.slope)
                               ? cubic_min(lo.alpha, lo.f, lo.slope, hi.alpha, hi.f, hi.slope)
                               : 0.5 * (lo.alpha + hi.alpha);
      LinePoint cur = eval(alpha);
      if (!armijo(cur) || cur.f >= lo.f) {
        hi = std::move(cur);
        continue;
      }
      if (std::abs(cur.slope) <= -o_.c2 * zero_->slope) {
        accepted = std::move(cur);
        return true;
      }
      if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = std::move(lo);
      lo = std::move(cur);
    }
    return false;
  }

  const Objective& f_;
  std::span<const double> x_;
  std::span<const double> d_;
  const LbfgsOptions& o_;
  const LinePoint* zero_ = nullptr;
  std::vector<double> trial_;
  int evals_ = 0;
};

}  // namespace

void TrainConfig::validate() const {
  if (adam_iters < 0 || adam_iters > kMaxIters || lbfgs_iters < 0 || lbfgs_iters > kMaxIters) {
    throw ConfigError("iteration counts must lie in [0, 50000]");
  }
  if (adam_iters + lbfgs_iters == 0) throw ConfigError("no optimizer iterations requested");
  if (!(adam_lr > 0.0)) throw ConfigError("adam learning rate must be positive");
  if (lr_decay_every <= 0 || !(lr_decay > 0.0 && lr_decay <= 1.0)) {
    throw ConfigError("learning-rate decay needs a period > 0 and a factor in (0, 1]");
  }
  if (lbfgs_memory < 1) throw ConfigError("lbfgs memory must be at least 1");
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be non-negative");
}

LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0, const LbfgsOptions& opts,
                           const std::function<void(int, double)>& on_step) {
  const std::size_t n = x0.size();
  LbfgsResult r;
  r.x = std::move(x0);
  std::vector<double> g(n);
  r.f = f(r.x, g);
  if (!std::isfinite(r.f)) diverged("lbfgs", 0, r.f);
  r.trace.push_back(r.f);

  struct Pair {
    std::vector<double> s;
    std::vector<double> y;
    double rho;
  };
  std::deque<Pair> hist;
  std::vector<double> d(n);
  std::vector<double> coef;

  while (r.iterations < opts.max_iters) {
    if (norm2(g) <= opts.grad_tol) {
      r.converged = true;
      break;
    }
    // Two-loop recursion: d = -H g.
    d = g;
    coef.assign(hist.size(), 0.0);
    for (std::size_t k = hist.size(); k-- > 0;) {
      coef[k] = hist[k].rho * dot(hist[k].s, d);
      for (std::size_t c = 0; c < n; ++c) d[c] -= coef[k] * hist[k].y[c];
    }
    if (!hist.empty()) {
      const Pair& last = hist.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (auto& v : d) v *= gamma;
    }
    for (std::size_t k = 0; k < hist.size(); ++k) {
      const double beta = hist[k].rho * dot(hist[k].y, d);
      for (std::size_t c = 0; c < n; ++c) d[c] += (coef[k] - beta) * hist[k].s[c];
    }
    for (auto& v : d) v = -v;

    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      hist.clear();
      for (std::size_t c = 0; c < n; ++c) d[c] = -g[c];
      slope = dot(g, d);
    }
    const double alpha0 = hist.empty() ? std::min(1.0, 1.0 / norm2(g)) : 1.0;

    const LinePoint zero{0.0, r.f, slope, {}};
    LineSearch ls(f, r.x, d, opts);
    if (!ls.search(zero, alpha0)) {
      r.line_search_failed = true;
      if (ls.best.alpha > 0.0) {
        for (std::size_t c = 0; c < n; ++c) r.x[c] += ls.best.alpha * d[c];
        r.f = ls.best.f;
        g = std::move(ls.best.grad);
        ++r.iterations;
        r.trace.push_back(r.f);
        if (on_step) on_step(r.iterations, r.f);
      }
      break;
    }

    Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t c = 0; c < n; ++c) {
      p.s[c] = ls.accepted.alpha * d[c];
      p.y[c] = ls.accepted.grad[c] - g[c];
      r.x[c] += p.s[c];
    }
    r.f = ls.accepted.f;
    g = std::move(ls.accepted.grad);
    const double sy = dot(p.s, p.y);
    if (sy > 0.0) {
      p.rho = 1.0 / sy;
      if (static_cast<int>(hist.size()) == opts.memory) hist.pop_front();
      hist.push_back(std::move(p));
    }
    ++r.iterations;
    r.trace.push_back(r.f);
    if (on_step) on_step(r.iterations, r.f);
  }
  if (norm2(g) <= opts.grad_tol) r.converged = true;
  return r;
}

TrainResult train_adam(MlpModel m, const NormalizedBatch& batch, const TrainConfig& cfg,
                       const ProgressFn& progress) {
  cfg.validate();
  TrainResult out;
  const std::size_t n = m.num_params();
  std::vector<double> g(n);
  std::vector<double> mom(n, 0.0);
  std::vector<double> vel(n, 0.0);
  constexpr double b1 = 0.9;
  constexpr double b2 = 0.999;
  constexpr double eps = 1e-8;
  double b1t = 1.0;
  double b2t = 1.0;
  double lr = cfg.adam_lr;
  auto p = m.params();
  for (int it = 0; it < cfg.adam_iters; ++it) {
    if (it > 0 && it % cfg.lr_decay_every == 0) lr *= cfg.lr_decay;
    const double f = loss_and_grad(m, batch, g);
    if (!std::isfinite(f)) diverged("adam", it, f);
    out.trace.push_back({"adam", it, f});
    if (progress) progress("adam", it, f);
    b1t *= b1;
    b2t *= b2;
    for (std::size_t k = 0; k < n; ++k) {
      mom[k] = b1 * mom[k] + (1.0 - b1) * g[k];
      vel[k] = b2 * vel[k] + (1.0 - b2) * g[k] * g[k];
      const double mh = mom[k] / (1.0 - b1t);
      const double vh = vel[k] / (1.0 - b2t);
      p[k] -= lr * mh / (std::sqrt(vh) + eps);
    }
  }
  out.final_loss = loss(m, batch);
  if (!std::isfinite(out.final_loss)) diverged("adam", cfg.adam_iters, out.final_loss);
  out.model = std::move(m);
  return out;
}

TrainResult train_lbfgs(MlpModel m, const NormalizedBatch& batch, const TrainConfig& cfg,
                        const ProgressFn& progress) {
  cfg.validate();
  LbfgsOptions o;
  o.max_iters = cfg.lbfgs_iters;
  o.memory = cfg.lbfgs_memory;
  o.grad_tol = cfg.tolerance;
  MlpModel work = m;
  const Objective obj = [&](std::span<const double> x, std::span<double> grad) {
    std::copy(x.begin(), x.end(), work.params().begin());
    return loss_and_grad(work, batch, grad);
  };
  std::vector<double> x0(m.params().begin(), m.params().end());
  TrainResult out;
  const auto r = minimize_lbfgs(obj, std::move(x0), o, [&](int it, double f) {
    if (progress) progress("lbfgs", it, f);
  });
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    out.trace.push_back({"lbfgs", static_cast<int>(k), r.trace[k]});
  }
  std::copy(r.x.begin(), r.x.end(), m.params().begin());
  out.final_loss = r.f;
  out.line_search_failed = r.line_search_failed;
  out.model = std::move(m);
  return out;
}

TrainResult train(const std::vector<int>& layer_sizes, Activation act,
                  std::span<const StencilSample> samples, const TrainConfig& cfg,
                  const ProgressFn& progress) {
  cfg.validate();
  if (samples.empty()) throw LengthMismatch("training set is empty");
  MlpModel m(layer_sizes, act);
  m.norm = fit_norm_stats(samples);
  m.init_glorot(cfg.seed);
  const NormalizedBatch batch = normalize_batch(m, samples);
  TrainResult out;
  out.model = std::move(m);
  out.final_loss = loss(out.model, batch);
  if (cfg.adam_iters > 0) {
    TrainResult a = train_adam(std::move(out.model), batch, cfg, progress);
    out.trace = std::move(a.trace);
    out.model = std::move(a.model);
    out.final_loss = a.final_loss;
  }
  if (cfg.lbfgs_iters > 0) {
    TrainResult l = train_lbfgs(std::move(out.model), batch, cfg, progress);
    out.trace.insert(out.trace.end(), l.trace.begin(), l.trace.end());
    out.model = std::move(l.model);
    out.final_loss = l.final_loss;
    out.line_search_failed = l.line_search_failed;
  }
  return out;
}

}  // namespace nnlci
