#pragma once

// Flat parameter views of networks and gradients for test comparisons.

#include <Eigen/Dense>

#include "uavnav/nn.hpp"
#include "uavnav/rng.hpp"

namespace uavnav::testutil {

inline Eigen::VectorXd flatten(const nn::DenseNetwork& net) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(net.parameter_count()));
  Eigen::Index k = 0;
  for (const auto& l : net.layers()) {
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) v[k++] = l.weight.data()[i];
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) v[k++] = l.bias[i];
  }
  return v;
}

inline void unflatten(nn::DenseNetwork& net, const Eigen::VectorXd& v) {
  Eigen::Index k = 0;
  for (auto& l : net.layers()) {
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) l.weight.data()[i] = v[k++];
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = v[k++];
  }
}

inline Eigen::VectorXd flatten(const nn::Gradients& g) {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < g.weight.size(); ++l) n += g.weight[l].size() + g.bias[l].size();
  Eigen::VectorXd v(n);
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < g.weight.size(); ++l) {
    for (Eigen::Index i = 0; i < g.weight[l].size(); ++i) v[k++] = g.weight[l].data()[i];
    for (Eigen::Index i = 0; i < g.bias[l].size(); ++i) v[k++] = g.bias[l][i];
  }
  return v;
}

inline Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(-scale, scale);
  return v;
}

}  // namespace uavnav::testutil
