#include "uavnav/nn.hpp"

#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "uavnav/error.hpp"

namespace uavnav::nn {

namespace {

constexpr std::string_view kNetMagic{"UAVNNET\0", 8};
constexpr std::string_view kAdamMagic{"UAVADAM\0", 8};
constexpr std::uint32_t kFormatVersion = 1;

void activate(Activation a, Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::ReLU: z = z.cwiseMax(0.0); break;
    case Activation::Tanh: z = z.array().tanh(); break;
    case Activation::Sigmoid: z = (1.0 + (-z.array()).exp()).inverse(); break;
    case Activation::Identity: break;
  }
}

// Multiplies `delta` in place by the activation derivative, expressed
// through the activation's output `y`.
void scale_by_derivative(Activation a, const Eigen::MatrixXd& y, Eigen::MatrixXd& delta) {
  switch (a) {
    case Activation::ReLU: delta = (y.array() > 0.0).select(delta, 0.0); break;
    case Activation::Tanh: delta.array() *= 1.0 - y.array().square(); break;
    case Activation::Sigmoid: delta.array() *= y.array() * (1.0 - y.array()); break;
    case Activation::Identity: break;
  }
}

void write_values(detail::ByteWriter& w, const Eigen::MatrixXd& m) {
  // row-major on disk
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.f64(m(r, c));
}

void read_values(detail::ByteReader& r, Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = r.f64();
}

void write_vector(detail::ByteWriter& w, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) w.f64(v[i]);
}

void read_vector(detail::ByteReader& r, Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = r.f64();
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::ReLU: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Identity: return "identity";
  }
  return "unknown";
}

Activation parse_activation(std::string_view text) {
  for (auto a : {Activation::ReLU, Activation::Tanh, Activation::Sigmoid, Activation::Identity})
    if (to_string(a) == text) return a;
  fail(ErrorCode::Config, "unknown activation '" + std::string(text) + "'");
}

DenseNetwork::DenseNetwork(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  require(!layers_.empty(), ErrorCode::Shape, "network needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    require(layer.out_dim() > 0 && layer.in_dim() > 0, ErrorCode::Shape, "empty layer");
    require(layer.bias.size() == layer.out_dim(), ErrorCode::Shape, "bias length must equal layer width");
    if (l > 0)
      require(layers_[l - 1].out_dim() == layer.in_dim(), ErrorCode::Shape,
              "layer " + std::to_string(l) + " input does not chain with previous output");
  }
}

DenseNetwork DenseNetwork::random(std::span<const int> sizes, Activation hidden, Activation output, Rng& rng) {
  require(sizes.size() >= 2, ErrorCode::Shape, "need input and output sizes");
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    require(in > 0 && out > 0, ErrorCode::Shape, "layer sizes must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out), l + 2 == sizes.size() ? output : hidden};
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    for (int r = 0; r < out; ++r) layer.bias[r] = rng.uniform(-bound, bound);
    layers.push_back(std::move(layer));
  }
  return DenseNetwork(std::move(layers));
}

std::size_t DenseNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool DenseNetwork::same_architecture(const DenseNetwork& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& a = layers_[l];
    const auto& b = other.layers_[l];
    if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim() || a.activation != b.activation) return false;
  }
  return true;
}

bool DenseNetwork::finite() const {
  for (const auto& l : layers_)
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

Eigen::VectorXd DenseNetwork::forward(const Eigen::VectorXd& input) const {
  return forward_batch(input);
}

Eigen::MatrixXd DenseNetwork::forward_batch(const Eigen::MatrixXd& inputs) const {
  require(inputs.rows() == input_dim(), ErrorCode::Shape,
          "input has " + std::to_string(inputs.rows()) + " rows, network expects " + std::to_string(input_dim()));
  Eigen::MatrixXd x = inputs;
  for (const auto& layer : layers_) {
    Eigen::MatrixXd z = layer.weight * x;
    z.colwise() += layer.bias;
    activate(layer.activation, z);
    x = std::move(z);
  }
  return x;
}

bool operator==(const DenseNetwork& a, const DenseNetwork& b) {
  if (!a.same_architecture(b)) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l)
    if (a.layers_[l].weight != b.layers_[l].weight || a.layers_[l].bias != b.layers_[l].bias) return false;
  return true;
}

ForwardCache forward_cached(const DenseNetwork& net, const Eigen::MatrixXd& inputs) {
  require(inputs.rows() == net.input_dim(), ErrorCode::Shape, "input dimension mismatch");
  ForwardCache cache;
  cache.values.reserve(net.layers().size() + 1);
  cache.values.push_back(inputs);
  for (const auto& layer : net.layers()) {
    Eigen::MatrixXd z = layer.weight * cache.values.back();
    z.colwise() += layer.bias;
    activate(layer.activation, z);
    cache.values.push_back(std::move(z));
  }
  return cache;
}

Gradients Gradients::zeros_like(const DenseNetwork& net) {
  Gradients g;
  for (const auto& l : net.layers()) {
    g.weight.push_back(Eigen::MatrixXd::Zero(l.out_dim(), l.in_dim()));
    g.bias.push_back(Eigen::VectorXd::Zero(l.out_dim()));
  }
  return g;
}

bool Gradients::congruent(const DenseNetwork& net) const {
  const auto& layers = net.layers();
  if (weight.size() != layers.size() || bias.size() != layers.size()) return false;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (weight[l].rows() != layers[l].out_dim() || weight[l].cols() != layers[l].in_dim()) return false;
    if (bias[l].size() != layers[l].out_dim()) return false;
  }
  return true;
}

bool Gradients::finite() const {
  for (std::size_t l = 0; l < weight.size(); ++l)
    if (!weight[l].allFinite() || !bias[l].allFinite()) return false;
  return true;
}

Gradients& Gradients::operator*=(double s) {
  for (auto& w : weight) w *= s;
  for (auto& b : bias) b *= s;
  return *this;
}

Backprop backward(const DenseNetwork& net, const ForwardCache& cache, const Eigen::MatrixXd& upstream) {
  const auto& layers = net.layers();
  require(cache.values.size() == layers.size() + 1, ErrorCode::Shape, "forward cache does not match network");
  require(upstream.rows() == net.output_dim() && upstream.cols() == cache.output().cols(), ErrorCode::Shape,
          "upstream gradient shape mismatch");

  Backprop out{Gradients::zeros_like(net), {}};
  Eigen::MatrixXd delta = upstream;
  for (std::size_t i = layers.size(); i-- > 0;) {
    const DenseLayer& layer = layers[i];
    scale_by_derivative(layer.activation, cache.values[i + 1], delta);
    const Eigen::MatrixXd& x = cache.values[i];
    out.grads.weight[i].noalias() = delta * x.transpose();
    out.grads.bias[i] = delta.rowwise().sum();
    Eigen::MatrixXd next = layer.weight.transpose() * delta;
    delta = std::move(next);
  }
  out.input_gradient = std::move(delta);
  return out;
}

Backprop backward(const DenseNetwork& net, const Eigen::VectorXd& input, const Eigen::VectorXd& upstream) {
  return backward(net, forward_cached(net, input), upstream);
}

AdamState::AdamState(const DenseNetwork& net, AdamParams p)
    : params(p), first_moment(Gradients::zeros_like(net)), second_moment(Gradients::zeros_like(net)) {}

void optimizer_step(DenseNetwork& net, const Gradients& grads, AdamState& opt) {
  require(grads.congruent(net) && opt.first_moment.congruent(net) && opt.second_moment.congruent(net),
          ErrorCode::Shape, "gradient/optimizer shape does not match network");
  if (!grads.finite()) fail(ErrorCode::Divergence, "non-finite gradient");

  const AdamParams& p = opt.params;
  ++opt.step_count;
  const double t = static_cast<double>(opt.step_count);
  const double correction1 = 1.0 - std::pow(p.beta1, t);
  const double correction2 = 1.0 - std::pow(p.beta2, t);

  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = p.beta1 * m + (1.0 - p.beta1) * g;
    v = p.beta2 * v + (1.0 - p.beta2) * g.cwiseProduct(g);
    param.array() -= p.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + p.epsilon);
  };
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weight, grads.weight[l], opt.first_moment.weight[l], opt.second_moment.weight[l]);
    update(layers[l].bias, grads.bias[l], opt.first_moment.bias[l], opt.second_moment.bias[l]);
  }
}

void soft_update(DenseNetwork& target, const DenseNetwork& online, double nu) {
  require(target.same_architecture(online), ErrorCode::Shape, "soft update between different architectures");
  require(nu >= 0.0 && nu <= 1.0, ErrorCode::InvalidArgument, "nu must lie in [0, 1]");
  auto& dst = target.layers();
  const auto& src = online.layers();
  for (std::size_t l = 0; l < dst.size(); ++l) {
    dst[l].weight = nu * src[l].weight + (1.0 - nu) * dst[l].weight;
    dst[l].bias = nu * src[l].bias + (1.0 - nu) * dst[l].bias;
  }
}

std::vector<std::uint8_t> save(const DenseNetwork& net) {
  detail::ByteWriter w;
  w.magic(kNetMagic);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(net.layers().size()));
  for (const auto& l : net.layers()) {
    w.u32(static_cast<std::uint32_t>(l.in_dim()));
    w.u32(static_cast<std::uint32_t>(l.out_dim()));
    w.u8(static_cast<std::uint8_t>(l.activation));
  }
  for (const auto& l : net.layers()) {
    write_values(w, l.weight);
    write_vector(w, l.bias);
  }
  return w.take();
}

DenseNetwork load(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic(kNetMagic);
  const std::uint32_t version = r.u32();
  require(version == kFormatVersion, ErrorCode::CorruptCheckpoint,
          "unsupported network format version " + std::to_string(version));
  const std::uint32_t count = r.u32();
  require(count >= 1 && count <= 1024, ErrorCode::CorruptCheckpoint, "implausible layer count");
  std::vector<DenseLayer> layers;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t in = r.u32();
    const std::uint32_t out = r.u32();
    const std::uint8_t act = r.u8();
    require(in > 0 && out > 0 && in <= (1u << 20) && out <= (1u << 20), ErrorCode::CorruptCheckpoint,
            "implausible layer dimensions");
    require(act <= static_cast<std::uint8_t>(Activation::Identity), ErrorCode::CorruptCheckpoint,
            "unknown activation tag");
    layers.push_back({Eigen::MatrixXd(out, in), Eigen::VectorXd(out), static_cast<Activation>(act)});
  }
  for (auto& l : layers) {
    read_values(r, l.weight);
    read_vector(r, l.bias);
  }
  require(r.at_end(), ErrorCode::CorruptCheckpoint, "trailing bytes after network");
  try {
    return DenseNetwork(std::move(layers));
  } catch (const Error& e) {
    fail(ErrorCode::CorruptCheckpoint, std::string("inconsistent layer table: ") + e.what());
  }
}

std::vector<std::uint8_t> save(const AdamState& opt) {
  detail::ByteWriter w;
  w.magic(kAdamMagic);
  w.u32(kFormatVersion);
  w.f64(opt.params.learning_rate);
  w.f64(opt.params.beta1);
  w.f64(opt.params.beta2);
  w.f64(opt.params.epsilon);
  w.i64(opt.step_count);
  w.u32(static_cast<std::uint32_t>(opt.first_moment.weight.size()));
  for (const Gradients* g : {&opt.first_moment, &opt.second_moment})
    for (std::size_t l = 0; l < g->weight.size(); ++l) {
      write_values(w, g->weight[l]);
      write_vector(w, g->bias[l]);
    }
  return w.take();
}

AdamState load_adam(std::span<const std::uint8_t> bytes, const DenseNetwork& net) {
  detail::ByteReader r(bytes);
  r.expect_magic(kAdamMagic);
  require(r.u32() == kFormatVersion, ErrorCode::CorruptCheckpoint, "unsupported optimizer format version");
  AdamParams p;
  p.learning_rate = r.f64();
  p.beta1 = r.f64();
  p.beta2 = r.f64();
  p.epsilon = r.f64();
  AdamState opt(net, p);
  opt.step_count = r.i64();
  require(r.u32() == net.layers().size(), ErrorCode::CorruptCheckpoint, "optimizer layer count mismatch");
  for (Gradients* g : {&opt.first_moment, &opt.second_moment})
    for (std::size_t l = 0; l < g->weight.size(); ++l) {
      read_values(r, g->weight[l]);
      read_vector(r, g->bias[l]);
    }
  require(r.at_end(), ErrorCode::CorruptCheckpoint, "trailing bytes after optimizer state");
  return opt;
}

}  // namespace uavnav::nn
