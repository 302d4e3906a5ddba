#include "nnlci/mlp.hpp"

#include "nnlci/error.hpp"
#include "nnlci/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace nnlci {

namespace {

constexpr char kModelMagic[4] = {'N', 'N', 'L', 'C'};
constexpr std::uint32_t kModelVersion = 1;
constexpr Eigen::Index kChunk = 2048;

// tanh through the vectorised exponential: sign(z) (1 - e) / (1 + e) with
// e = exp(-2|z|).
void apply_activation(Activation act, Eigen::Ref<Eigen::MatrixXd> z) {
  auto a = z.array();
  if (act == Activation::relu) {
    a = a.max(0.0);
    return;
  }
  const Eigen::ArrayXXd e = (-2.0 * a.abs()).exp();
  a = a.sign() * (1.0 - e) / (1.0 + e);
}

// Multiplies g by the activation derivative expressed through the output a.
void apply_activation_derivative(Activation act, const Eigen::MatrixXd& a, Eigen::MatrixXd& g) {
  if (act == Activation::relu) {
    g.array() *= (a.array() > 0.0).cast<double>();
  } else {
    g.array() *= 1.0 - a.array().square();
  }
}

[[noreturn]] void corrupt(const std::string& what) { throw CorruptModelFile(what); }

}  // namespace

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

Activation parse_activation(const std::string& text) {
  if (text == "tanh") return Activation::tanh;
  if (text == "relu") return Activation::relu;
  throw ConfigError("unknown activation '" + text + "'");
}

NormStats fit_norm_stats(std::span<const StencilSample> samples) {
  if (samples.empty()) throw LengthMismatch("cannot fit normalisation on an empty set");
  const std::size_t din = samples.front().input.size();
  const std::size_t dout = samples.front().target.size();
  NormStats st;
  auto fit = [&](auto member, std::size_t d, std::vector<double>& mean, std::vector<double>& sd) {
    mean.assign(d, 0.0);
    sd.assign(d, 0.0);
    for (const auto& s : samples) {
      const std::vector<double>& v = s.*member;
      if (v.size() != d) throw LengthMismatch("samples have inconsistent lengths");
      for (std::size_t k = 0; k < d; ++k) mean[k] += v[k];
    }
    const double n = static_cast<double>(samples.size());
    for (auto& m : mean) m /= n;
    for (const auto& s : samples) {
      const std::vector<double>& v = s.*member;
      for (std::size_t k = 0; k < d; ++k) sd[k] += (v[k] - mean[k]) * (v[k] - mean[k]);
    }
    for (auto& x : sd) {
      x = std::sqrt(x / n);
      if (x < kMinStd) x = 1.0;
    }
  };
  fit(&StencilSample::input, din, st.in_mean, st.in_std);
  fit(&StencilSample::target, dout, st.out_mean, st.out_std);
  return st;
}

NormStats identity_norm_stats(int d_in, int d_out) {
  NormStats st;
  st.in_mean.assign(static_cast<std::size_t>(d_in), 0.0);
  st.in_std.assign(static_cast<std::size_t>(d_in), 1.0);
  st.out_mean.assign(static_cast<std::size_t>(d_out), 0.0);
  st.out_std.assign(static_cast<std::size_t>(d_out), 1.0);
  return st;
}

MlpModel::MlpModel(std::vector<int> layer_sizes, Activation activation)
    : sizes_(std::move(layer_sizes)), activation_(activation) {
  if (sizes_.size() < 2) throw LengthMismatch("a network needs at least input and output sizes");
  for (int s : sizes_) {
    if (s <= 0) throw LengthMismatch("layer sizes must be positive");
  }
  std::size_t total = 0;
  for (int l = 0; l + 1 < static_cast<int>(sizes_.size()); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l + 1]) * static_cast<std::size_t>(sizes_[l] + 1);
  }
  params_.assign(total, 0.0);
  norm = identity_norm_stats(sizes_.front(), sizes_.back());
}

std::size_t MlpModel::bias_offset(int layer) const {
  const auto l = static_cast<std::size_t>(layer);
  return offsets_[l] + static_cast<std::size_t>(sizes_[l + 1]) * static_cast<std::size_t>(sizes_[l]);
}

Eigen::Map<const Eigen::MatrixXd> MlpModel::weight(int layer) const {
  const auto l = static_cast<std::size_t>(layer);
  return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
}

Eigen::Map<const Eigen::VectorXd> MlpModel::bias(int layer) const {
  return {params_.data() + bias_offset(layer), sizes_[static_cast<std::size_t>(layer) + 1]};
}

Eigen::Map<Eigen::MatrixXd> MlpModel::weight(int layer) {
  const auto l = static_cast<std::size_t>(layer);
  return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
}

Eigen::Map<Eigen::VectorXd> MlpModel::bias(int layer) {
  return {params_.data() + bias_offset(layer), sizes_[static_cast<std::size_t>(layer) + 1]};
}

void MlpModel::init_glorot(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::fill(params_.begin(), params_.end(), 0.0);
  for (int l = 0; l < num_layers(); ++l) {
    const double fan_in = sizes_[static_cast<std::size_t>(l)];
    const double fan_out = sizes_[static_cast<std::size_t>(l) + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    // Drawn through the raw engine so the stream does not depend on the
    // standard library's distribution implementation.
    auto w = weight(l);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        w(r, c) = (2.0 * unit - 1.0) * limit;
      }
    }
  }
}

void MlpModel::validate() const {
  if (sizes_.size() < 2) corrupt("model has fewer than two layers");
  const auto din = static_cast<std::size_t>(sizes_.front());
  const auto dout = static_cast<std::size_t>(sizes_.back());
  if (norm.in_mean.size() != din || norm.in_std.size() != din || norm.out_mean.size() != dout ||
      norm.out_std.size() != dout) {
    corrupt("normalisation statistics do not match the layer sizes");
  }
  for (double p : params_) {
    if (!std::isfinite(p)) corrupt("model has non-finite parameters");
  }
}

NormalizedBatch normalize_batch(const MlpModel& m, std::span<const StencilSample> samples) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  NormalizedBatch b;
  b.x.resize(m.input_dim(), n);
  b.y.resize(m.output_dim(), n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const StencilSample& s = samples[static_cast<std::size_t>(c)];
    if (s.input.size() != static_cast<std::size_t>(m.input_dim()) ||
        s.target.size() != static_cast<std::size_t>(m.output_dim())) {
      throw LengthMismatch("sample length does not match the network");
    }
    for (int k = 0; k < m.input_dim(); ++k) {
      const auto kk = static_cast<std::size_t>(k);
      b.x(k, c) = (s.input[kk] - m.norm.in_mean[kk]) / m.norm.in_std[kk];
    }
    for (int k = 0; k < m.output_dim(); ++k) {
      const auto kk = static_cast<std::size_t>(k);
      b.y(k, c) = (s.target[kk] - m.norm.out_mean[kk]) / m.norm.out_std[kk];
    }
  }
  return b;
}

namespace {

// Per-chunk buffers: acts[l] is the input of layer l (acts[0] the network
// input), out the linear output layer.
struct Workspace {
  std::vector<Eigen::MatrixXd> acts;
  Eigen::MatrixXd out;
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_prev;
  // Gradient accumulators. Eigen's kernels round differently depending on
  // the destination's address, so sums go into aligned storage first.
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;

  void resize(const MlpModel& m, Eigen::Index cols) {
    const auto& sz = m.layer_sizes();
    acts.resize(static_cast<std::size_t>(m.num_layers()));
    for (int l = 0; l < m.num_layers(); ++l) {
      acts[static_cast<std::size_t>(l)].resize(sz[static_cast<std::size_t>(l)], cols);
    }
    out.resize(m.output_dim(), cols);
  }
};

void forward_normalized(const MlpModel& m, const Eigen::Ref<const Eigen::MatrixXd>& x,
                        Workspace& ws) {
  ws.resize(m, x.cols());
  ws.acts[0] = x;
  const int nl = m.num_layers();
  for (int l = 0; l < nl; ++l) {
    Eigen::MatrixXd& dst = l + 1 < nl ? ws.acts[static_cast<std::size_t>(l) + 1] : ws.out;
    dst.noalias() = m.weight(l) * ws.acts[static_cast<std::size_t>(l)];
    dst.colwise() += m.bias(l);
    if (l + 1 < nl) apply_activation(m.activation(), dst);
  }
}

}  // namespace

Eigen::MatrixXd forward_batch(const MlpModel& m, const Eigen::MatrixXd& x) {
  if (x.rows() != m.input_dim()) throw LengthMismatch("input length does not match the network");
  const Eigen::Map<const Eigen::VectorXd> in_mean(m.norm.in_mean.data(), m.input_dim());
  const Eigen::Map<const Eigen::VectorXd> in_std(m.norm.in_std.data(), m.input_dim());
  const Eigen::Map<const Eigen::VectorXd> out_mean(m.norm.out_mean.data(), m.output_dim());
  const Eigen::Map<const Eigen::VectorXd> out_std(m.norm.out_std.data(), m.output_dim());
  Eigen::MatrixXd out(m.output_dim(), x.cols());
  Workspace ws;
  for (Eigen::Index c0 = 0; c0 < x.cols(); c0 += kChunk) {
    const Eigen::Index nc = std::min(kChunk, x.cols() - c0);
    Eigen::MatrixXd xn = x.middleCols(c0, nc);
    xn = (xn.colwise() - in_mean).array().colwise() / in_std.array();
    forward_normalized(m, xn, ws);
    out.middleCols(c0, nc) = (ws.out.array().colwise() * out_std.array()).matrix().colwise() + out_mean;
  }
  return out;
}

std::vector<double> forward(const MlpModel& m, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(m.input_dim())) {
    std::ostringstream os;
    os << "network expects " << m.input_dim() << " inputs, got " << x.size();
    throw LengthMismatch(os.str());
  }
  const Eigen::MatrixXd in = Eigen::Map<const Eigen::VectorXd>(x.data(), m.input_dim());
  const Eigen::MatrixXd out = forward_batch(m, in);
  return {out.data(), out.data() + out.size()};
}

double loss(const MlpModel& m, const NormalizedBatch& batch) {
  double total = 0.0;
  Workspace ws;
  for (Eigen::Index c0 = 0; c0 < batch.x.cols(); c0 += kChunk) {
    const Eigen::Index nc = std::min(kChunk, batch.x.cols() - c0);
    forward_normalized(m, batch.x.middleCols(c0, nc), ws);
    total += (ws.out - batch.y.middleCols(c0, nc)).squaredNorm();
  }
  return total;
}

double loss(const MlpModel& m, std::span<const StencilSample> samples) {
  return loss(m, normalize_batch(m, samples));
}

double loss_and_grad(const MlpModel& m, const NormalizedBatch& batch, std::span<double> grad) {
  if (grad.size() != m.num_params()) throw LengthMismatch("gradient buffer has the wrong size");
  double total = 0.0;
  Workspace ws;
  const int nl = m.num_layers();
  const auto& sz = m.layer_sizes();
  ws.gw.resize(static_cast<std::size_t>(nl));
  ws.gb.resize(static_cast<std::size_t>(nl));
  for (int l = 0; l < nl; ++l) {
    const auto li = static_cast<std::size_t>(l);
    ws.gw[li].setZero(sz[li + 1], sz[li]);
    ws.gb[li].setZero(sz[li + 1]);
  }
  for (Eigen::Index c0 = 0; c0 < batch.x.cols(); c0 += kChunk) {
    const Eigen::Index nc = std::min(kChunk, batch.x.cols() - c0);
    forward_normalized(m, batch.x.middleCols(c0, nc), ws);
    ws.g = ws.out - batch.y.middleCols(c0, nc);
    total += ws.g.squaredNorm();
    ws.g *= 2.0;
    for (int l = nl - 1; l >= 0; --l) {
      const auto li = static_cast<std::size_t>(l);
      const Eigen::MatrixXd& a = ws.acts[li];
      ws.gw[li].noalias() += ws.g * a.transpose();
      ws.gb[li] += ws.g.rowwise().sum();
      if (l > 0) {
        ws.g_prev.noalias() = m.weight(l).transpose() * ws.g;
        apply_activation_derivative(m.activation(), a, ws.g_prev);
        std::swap(ws.g, ws.g_prev);
      }
    }
  }
  for (int l = 0; l < nl; ++l) {
    const auto li = static_cast<std::size_t>(l);
    std::copy_n(ws.gw[li].data(), ws.gw[li].size(), grad.data() + m.weight_offset(l));
    std::copy_n(ws.gb[li].data(), ws.gb[li].size(), grad.data() + m.bias_offset(l));
  }
  return total;
}

std::vector<double> grad(const MlpModel& m, std::span<const StencilSample> samples) {
  std::vector<double> g(m.num_params());
  loss_and_grad(m, normalize_batch(m, samples), g);
  return g;
}

void save_model(const MlpModel& m, const std::filesystem::path& path) {
  m.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  BinaryWriter w(os);
  w.bytes(kModelMagic, 4);
  w.u32(kModelVersion);
  w.u32(m.activation() == Activation::relu ? 1u : 0u);
  w.u32(static_cast<std::uint32_t>(m.layer_sizes().size()));
  for (int s : m.layer_sizes()) w.u32(static_cast<std::uint32_t>(s));
  for (const auto* v : {&m.norm.in_mean, &m.norm.in_std, &m.norm.out_mean, &m.norm.out_std}) {
    for (double x : *v) w.f64(x);
  }
  w.text(m.metadata);
  w.u64(m.num_params());
  for (double p : m.params()) w.f64(p);
  if (!os) throw Error("failed writing " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CorruptModelFile("cannot open model file " + path.string());
  BinaryReader r(is, [](const std::string& what) { corrupt("model file: " + what); });
  char magic[4];
  r.bytes(magic, 4);
  if (!std::equal(magic, magic + 4, kModelMagic)) corrupt("bad model magic");
  if (r.u32() != kModelVersion) corrupt("unsupported model version");
  const std::uint32_t act = r.u32();
  if (act > 1) corrupt("unknown activation tag");
  const std::uint32_t nsizes = r.u32();
  if (nsizes < 2 || nsizes > 64) corrupt("implausible layer count");
  std::vector<int> sizes;
  for (std::uint32_t k = 0; k < nsizes; ++k) {
    const std::uint32_t s = r.u32();
    if (s == 0 || s > (1u << 20)) corrupt("implausible layer size");
    sizes.push_back(static_cast<int>(s));
  }
  MlpModel m(sizes, act == 1 ? Activation::relu : Activation::tanh);
  for (auto* v : {&m.norm.in_mean, &m.norm.in_std, &m.norm.out_mean, &m.norm.out_std}) {
    for (double& x : *v) x = r.f64();
  }
  m.metadata = r.text();
  if (r.u64() != m.num_params()) corrupt("parameter count does not match the architecture");
  for (double& p : m.params()) p = r.f64();
  if (!r.at_end()) corrupt("trailing bytes after model payload");
  m.validate();
  return m;
}

}  // namespace nnlci
