// SPDX-License-Identifier: Apache-2.0
//
// Feed-forward networks with tanh hidden layers, exact reverse-mode
// gradients, and Adam updates. Batches are row-major: one sample per row.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vlcsee/linalg.hpp"
#include "vlcsee/rng.hpp"

namespace vlcsee {

struct MlpGrads {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

// Activations recorded by a forward pass; consumed by the matching
// backward pass.
struct MlpCache {
  std::vector<Matrix> activations;  // activations[0] = input batch
};

class Mlp {
 public:
  // sizes = {input, hidden..., output}; hidden layers use tanh, the output
  // layer is linear. Weights get a scaled orthogonal init, output layer
  // scaled by output_gain; biases start at zero.
  Mlp(std::vector<int> sizes, Rng& rng, double output_gain = 1.0);

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }
  const std::vector<int>& sizes() const { return sizes_; }

  Vector forward(const Vector& input) const;
  Matrix forward_batch(const Matrix& inputs, MlpCache* cache = nullptr) const;

  // Gradients of sum_i loss_i when upstream(i, :) = d loss_i / d output_i.
  MlpGrads backward_batch(const MlpCache& cache, const Matrix& upstream) const;

  MlpGrads zero_grads() const;

  std::vector<Matrix> weights;
  std::vector<Vector> biases;

 private:
  std::vector<int> sizes_;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over one network's parameters.
class Adam {
 public:
  Adam(const Mlp& net, AdamConfig config = {});
  void step(Mlp& net, const MlpGrads& grads, double lr);
  std::int64_t updates() const { return t_; }
  void restore_update_count(std::int64_t t) { t_ = t; }

  AdamConfig config;
  std::vector<Matrix> m_weights, v_weights;
  std::vector<Vector> m_biases, v_biases;

 private:
  std::int64_t t_ = 0;
};

// Adam over a flat vector (used for the policy's log-std parameters).
class AdamVector {
 public:
  AdamVector(int dim, AdamConfig config = {});
  void step(Vector& params, const Vector& grad, double lr);
  std::int64_t updates() const { return t_; }

  AdamConfig config;
  Vector m, v;

 private:
  std::int64_t t_ = 0;
};

// Versioned binary checkpoint blobs. Layout (little-endian):
//   magic "VLSE" | u32 version | u32 layer count | u32 sizes...
//   per layer: weight rows*cols doubles (row-major), bias doubles
// Optimizer state appends moment tensors in the same order plus the step
// counter; free vectors carry a u32 length prefix; generator state is a
// u32-length-prefixed text blob. Writers/readers throw std::runtime_error
// on malformed data.
void save_mlp(std::ostream& out, const Mlp& net);
Mlp load_mlp(std::istream& in, Rng& rng);
void save_adam(std::ostream& out, const Adam& adam);
void load_adam(std::istream& in, Adam& adam);
void save_params(std::ostream& out, const Vector& params);
Vector load_params(std::istream& in);
void save_rng(std::ostream& out, const Rng& rng);
void load_rng(std::istream& in, Rng& rng);

}  // namespace vlcsee
