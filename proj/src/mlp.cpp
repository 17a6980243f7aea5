// SPDX-License-Identifier: Apache-2.0
#include "vlcsee/mlp.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace vlcsee {

namespace {

// Scaled orthogonal initialization: QR of a Gaussian matrix with signs
// fixed from the diagonal of R.
Matrix orthogonal_init(int rows, int cols, double gain, Rng& rng) {
  const bool transpose = rows < cols;
  const int r = transpose ? cols : rows;
  const int c = transpose ? rows : cols;
  Matrix g(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) g(i, j) = rng.gaussian();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(r, c);
  const Matrix rmat = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
  for (int j = 0; j < c; ++j) {
    if (rmat(j, j) < 0) q.col(j) = -q.col(j);
  }
  Matrix out = transpose ? Matrix(q.transpose()) : q;
  return gain * out;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("checkpoint: truncated stream");
  return v;
}

void write_i64(std::ostream& out, std::int64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::int64_t read_i64(std::istream& in) {
  std::int64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("checkpoint: truncated stream");
  return v;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
}

void read_matrix(std::istream& in, Matrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      double v = 0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      if (!in) throw std::runtime_error("checkpoint: truncated stream");
      m(i, j) = v;
    }
  }
}

void write_vector(std::ostream& out, const Vector& v) {
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_vector(std::istream& in, Vector& v) {
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint: truncated stream");
}

constexpr char kMagic[4] = {'V', 'L', 'S', 'E'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

Mlp::Mlp(std::vector<int> sizes, Rng& rng, double output_gain) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
  const int layers = static_cast<int>(sizes_.size()) - 1;
  weights.reserve(layers);
  biases.reserve(layers);
  for (int i = 0; i < layers; ++i) {
    const double gain = (i == layers - 1) ? output_gain : 1.0;
    weights.push_back(orthogonal_init(sizes_[i + 1], sizes_[i], gain, rng));
    biases.push_back(Vector::Zero(sizes_[i + 1]));
  }
}

Vector Mlp::forward(const Vector& input) const {
  if (input.size() != input_dim()) throw std::invalid_argument("Mlp::forward: input size mismatch");
  Vector a = input;
  for (int i = 0; i < num_layers(); ++i) {
    Vector z = weights[i] * a + biases[i];
    a = (i + 1 < num_layers()) ? Vector(z.array().tanh()) : std::move(z);
  }
  return a;
}

Matrix Mlp::forward_batch(const Matrix& inputs, MlpCache* cache) const {
  if (inputs.cols() != input_dim()) throw std::invalid_argument("Mlp::forward_batch: input size mismatch");
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(inputs);
  }
  Matrix a = inputs;
  for (int i = 0; i < num_layers(); ++i) {
    Matrix z = a * weights[i].transpose();
    z.rowwise() += biases[i].transpose();
    a = (i + 1 < num_layers()) ? Matrix(z.array().tanh()) : std::move(z);
    if (cache && i + 1 < num_layers()) cache->activations.push_back(a);
  }
  return a;
}

MlpGrads Mlp::backward_batch(const MlpCache& cache, const Matrix& upstream) const {
  if (cache.activations.size() != static_cast<std::size_t>(num_layers())) {
    throw std::invalid_argument("Mlp::backward_batch: cache does not match this network");
  }
  MlpGrads grads = zero_grads();
  Matrix delta = upstream;  // d loss / d z for the current layer
  for (int i = num_layers() - 1; i >= 0; --i) {
    grads.weights[i] = delta.transpose() * cache.activations[i];
    grads.biases[i] = delta.colwise().sum().transpose();
    if (i > 0) {
      Matrix back = delta * weights[i];
      // tanh'(z) = 1 - a^2 expressed with the stored activation
      delta = back.array() * (1.0 - cache.activations[i].array().square());
    }
  }
  return grads;
}

MlpGrads Mlp::zero_grads() const {
  MlpGrads g;
  g.weights.reserve(num_layers());
  g.biases.reserve(num_layers());
  for (int i = 0; i < num_layers(); ++i) {
    g.weights.push_back(Matrix::Zero(weights[i].rows(), weights[i].cols()));
    g.biases.push_back(Vector::Zero(biases[i].size()));
  }
  return g;
}

Adam::Adam(const Mlp& net, AdamConfig cfg) : config(cfg) {
  for (const auto& w : net.weights) {
    m_weights.push_back(Matrix::Zero(w.rows(), w.cols()));
    v_weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : net.biases) {
    m_biases.push_back(Vector::Zero(b.size()));
    v_biases.push_back(Vector::Zero(b.size()));
  }
}

void Adam::step(Mlp& net, const MlpGrads& grads, double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < net.weights.size(); ++i) {
    m_weights[i] = config.beta1 * m_weights[i] + (1.0 - config.beta1) * grads.weights[i];
    v_weights[i] = config.beta2 * v_weights[i].array().matrix() +
                   (1.0 - config.beta2) * grads.weights[i].array().square().matrix();
    net.weights[i].array() -=
        lr * (m_weights[i].array() / c1) / ((v_weights[i].array() / c2).sqrt() + config.epsilon);
    m_biases[i] = config.beta1 * m_biases[i] + (1.0 - config.beta1) * grads.biases[i];
    v_biases[i] = config.beta2 * v_biases[i] + (1.0 - config.beta2) * grads.biases[i].array().square().matrix();
    net.biases[i].array() -=
        lr * (m_biases[i].array() / c1) / ((v_biases[i].array() / c2).sqrt() + config.epsilon);
  }
}

AdamVector::AdamVector(int dim, AdamConfig cfg)
    : config(cfg), m(Vector::Zero(dim)), v(Vector::Zero(dim)) {}

void AdamVector::step(Vector& params, const Vector& grad, double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t_));
  m = config.beta1 * m + (1.0 - config.beta1) * grad;
  v = config.beta2 * v + (1.0 - config.beta2) * grad.array().square().matrix();
  params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config.epsilon);
}

void save_mlp(std::ostream& out, const Mlp& net) {
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(net.sizes().size()));
  for (int s : net.sizes()) write_u32(out, static_cast<std::uint32_t>(s));
  for (int i = 0; i < net.num_layers(); ++i) {
    write_matrix(out, net.weights[i]);
    write_vector(out, net.biases[i]);
  }
}

Mlp load_mlp(std::istream& in, Rng& rng) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("checkpoint: bad magic");
  const std::uint32_t version = read_u32(in);
  if (version != kVersion) throw std::runtime_error("checkpoint: unsupported version");
  const std::uint32_t count = read_u32(in);
  std::vector<int> sizes(count);
  for (auto& s : sizes) s = static_cast<int>(read_u32(in));
  Mlp net(sizes, rng);
  for (int i = 0; i < net.num_layers(); ++i) {
    read_matrix(in, net.weights[i]);
    read_vector(in, net.biases[i]);
  }
  return net;
}

void save_adam(std::ostream& out, const Adam& adam) {
  write_i64(out, adam.updates());
  for (std::size_t i = 0; i < adam.m_weights.size(); ++i) {
    write_matrix(out, adam.m_weights[i]);
    write_matrix(out, adam.v_weights[i]);
    write_vector(out, adam.m_biases[i]);
    write_vector(out, adam.v_biases[i]);
  }
}

void load_adam(std::istream& in, Adam& adam) {
  const std::int64_t t = read_i64(in);
  for (std::size_t i = 0; i < adam.m_weights.size(); ++i) {
    read_matrix(in, adam.m_weights[i]);
    read_matrix(in, adam.v_weights[i]);
    read_vector(in, adam.m_biases[i]);
    read_vector(in, adam.v_biases[i]);
  }
  adam.restore_update_count(t);
}

void save_params(std::ostream& out, const Vector& params) {
  write_u32(out, static_cast<std::uint32_t>(params.size()));
  write_vector(out, params);
}

Vector load_params(std::istream& in) {
  Vector params(static_cast<Eigen::Index>(read_u32(in)));
  read_vector(in, params);
  return params;
}

void save_rng(std::ostream& out, const Rng& rng) {
  std::ostringstream text;
  text << rng;
  const std::string blob = text.str();
  write_u32(out, static_cast<std::uint32_t>(blob.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
}

void load_rng(std::istream& in, Rng& rng) {
  const std::uint32_t size = read_u32(in);
  std::string blob(size, '\0');
  in.read(blob.data(), static_cast<std::streamsize>(size));
  if (!in) throw std::runtime_error("checkpoint: truncated stream");
  std::istringstream text(blob);
  text >> rng;
  if (!text) throw std::runtime_error("checkpoint: malformed generator state");
}

}  // namespace vlcsee
