#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "uavnav/rng.hpp"

namespace uavnav::nn {

enum class Activation : std::uint8_t { ReLU = 0, Tanh = 1, Sigmoid = 2, Identity = 3 };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view text);

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
  Activation activation = Activation::Identity;

  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }
};

/// Fully connected feed-forward network. Batched calls take one sample per
/// column.
class DenseNetwork {
 public:
  DenseNetwork() = default;
  explicit DenseNetwork(std::vector<DenseLayer> layers);

  /// Layer widths `sizes` = {in, h1, ..., out}; weights and biases uniform in
  /// +-1/sqrt(fan_in).
  static DenseNetwork random(std::span<const int> sizes, Activation hidden, Activation output, Rng& rng);

  Eigen::Index input_dim() const { return layers_.front().in_dim(); }
  Eigen::Index output_dim() const { return layers_.back().out_dim(); }
  std::size_t parameter_count() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  bool same_architecture(const DenseNetwork& other) const;
  bool finite() const;

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  friend bool operator==(const DenseNetwork& a, const DenseNetwork& b);

 private:
  std::vector<DenseLayer> layers_;
};

/// Per-layer outputs of a batched forward pass; `values[0]` is the input.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> values;

  const Eigen::MatrixXd& output() const { return values.back(); }
};

ForwardCache forward_cached(const DenseNetwork& net, const Eigen::MatrixXd& inputs);

struct Gradients {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;

  static Gradients zeros_like(const DenseNetwork& net);
  bool congruent(const DenseNetwork& net) const;
  bool finite() const;
  Gradients& operator*=(double s);
};

struct Backprop {
  Gradients grads;
  Eigen::MatrixXd input_gradient;  // in x batch
};

/// Reverse-mode gradients of sum(upstream .* output) over the batch with
/// respect to every parameter and every input.
Backprop backward(const DenseNetwork& net, const ForwardCache& cache, const Eigen::MatrixXd& upstream);

/// Single-sample convenience; recomputes the forward pass.
Backprop backward(const DenseNetwork& net, const Eigen::VectorXd& input, const Eigen::VectorXd& upstream);

struct AdamParams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamParams params;
  Gradients first_moment;
  Gradients second_moment;
  std::int64_t step_count = 0;

  AdamState() = default;
  AdamState(const DenseNetwork& net, AdamParams p);
};

/// Bias-corrected adaptive-moment descent step. Throws Divergence on a
/// non-finite gradient; the network is left untouched in that case.
void optimizer_step(DenseNetwork& net, const Gradients& grads, AdamState& opt);

/// target <- nu * online + (1 - nu) * target
void soft_update(DenseNetwork& target, const DenseNetwork& online, double nu);

std::vector<std::uint8_t> save(const DenseNetwork& net);
DenseNetwork load(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> save(const AdamState& opt);
AdamState load_adam(std::span<const std::uint8_t> bytes, const DenseNetwork& net);

}  // namespace uavnav::nn
