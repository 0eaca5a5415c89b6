/*
Copyright 2026 The gfl Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

// Dense layers with explicit reverse passes. Activations are row batches
// (N x dim); every backward takes the forward cache it needs and accumulates
// parameter gradients into a same-shaped parameter struct.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>

#include "gfl/rng.hpp"

namespace gfl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kLeakySlope = 0.01;
inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.1;

struct LinearParams {
  Matrix W;  // in x out
  Vector b;  // out

  static LinearParams init(std::uint32_t in, std::uint32_t out, Rng& rng) {
    LinearParams p;
    p.W.resize(in, out);
    p.b.resize(out);
    double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (std::uint32_t j = 0; j < out; ++j)
      for (std::uint32_t i = 0; i < in; ++i) p.W(i, j) = rng.uniform(-bound, bound);
    for (std::uint32_t j = 0; j < out; ++j) p.b(j) = rng.uniform(-bound, bound);
    return p;
  }
  static LinearParams zeros(std::uint32_t in, std::uint32_t out) {
    LinearParams p;
    p.W = Matrix::Zero(in, out);
    p.b = Vector::Zero(out);
    return p;
  }
};

inline Matrix linear_forward(const LinearParams& p, const Matrix& x) {
  return (x * p.W).rowwise() + p.b.transpose();
}

/// Returns dx; accumulates dW, db into `grad`.
inline Matrix linear_backward(const LinearParams& p, const Matrix& x, const Matrix& dy,
                              LinearParams& grad) {
  grad.W.noalias() += x.transpose() * dy;
  grad.b.noalias() += dy.colwise().sum().transpose();
  return dy * p.W.transpose();
}

struct BatchNormParams {
  Vector gamma, beta;
  Vector running_mean, running_var;  // state, not learnable

  static BatchNormParams init(std::uint32_t dim) {
    BatchNormParams p;
    p.gamma = Vector::Ones(dim);
    p.beta = Vector::Zero(dim);
    p.running_mean = Vector::Zero(dim);
    p.running_var = Vector::Ones(dim);
    return p;
  }
  static BatchNormParams zeros(std::uint32_t dim) {
    BatchNormParams p;
    p.gamma = Vector::Zero(dim);
    p.beta = Vector::Zero(dim);
    p.running_mean = Vector::Zero(dim);
    p.running_var = Vector::Zero(dim);
    return p;
  }
};

struct BatchNormCache {
  Matrix xhat;
  Vector invstd;
  bool train = false;
};

/// Train mode normalizes with biased batch statistics and, when
/// `update_running`, folds them into the running averages (unbiased variance,
/// like the stock deep-learning stacks). Eval mode uses the running stats.
inline Matrix batchnorm_forward(BatchNormParams& p, const Matrix& x, bool train,
                                bool update_running, BatchNormCache& cache) {
  const auto n = static_cast<double>(x.rows());
  cache.train = train;
  if (train) {
    Vector mean = x.colwise().mean().transpose();
    Matrix centered = x.rowwise() - mean.transpose();
    Vector var = centered.array().square().colwise().mean().transpose();
    cache.invstd = (var.array() + kBatchNormEps).rsqrt();
    cache.xhat = centered.array().rowwise() * cache.invstd.transpose().array();
    if (update_running) {
      Vector var_unbiased = n > 1 ? Vector((var.array() * n / (n - 1)).matrix()) : var;
      p.running_mean = (1 - kBatchNormMomentum) * p.running_mean + kBatchNormMomentum * mean;
      p.running_var = (1 - kBatchNormMomentum) * p.running_var + kBatchNormMomentum * var_unbiased;
    }
  } else {
    cache.invstd = (p.running_var.array() + kBatchNormEps).rsqrt();
    cache.xhat = (x.rowwise() - p.running_mean.transpose()).array().rowwise() *
                 cache.invstd.transpose().array();
  }
  return (cache.xhat.array().rowwise() * p.gamma.transpose().array()).matrix().rowwise() +
         p.beta.transpose();
}

inline Matrix batchnorm_backward(const BatchNormParams& p, const BatchNormCache& cache,
                                 const Matrix& dy, BatchNormParams& grad) {
  grad.gamma.noalias() += (dy.array() * cache.xhat.array()).colwise().sum().matrix().transpose();
  grad.beta.noalias() += dy.colwise().sum().transpose();
  Matrix dxhat = dy.array().rowwise() * p.gamma.transpose().array();
  if (!cache.train)
    return dxhat.array().rowwise() * cache.invstd.transpose().array();
  const auto n = static_cast<double>(dy.rows());
  Vector sum_dxhat = dxhat.colwise().sum().transpose();
  Vector sum_dxhat_xhat = (dxhat.array() * cache.xhat.array()).colwise().sum().transpose();
  Matrix dx = n * dxhat;
  dx.rowwise() -= sum_dxhat.transpose();
  dx.array() -= cache.xhat.array().rowwise() * sum_dxhat_xhat.transpose().array();
  return dx.array().rowwise() * (cache.invstd / n).transpose().array();
}

inline Matrix leaky_relu_forward(const Matrix& x) {
  return x.array().max(kLeakySlope * x.array());
}

inline Matrix leaky_relu_backward(const Matrix& x, const Matrix& dy) {
  return (x.array() > 0).select(dy, kLeakySlope * dy);
}

inline Matrix relu_forward(const Matrix& x) { return x.array().max(0.0); }

inline Matrix relu_backward(const Matrix& x, const Matrix& dy) {
  return (x.array() > 0).select(dy, Matrix::Zero(dy.rows(), dy.cols()));
}

struct EmbeddingParams {
  Matrix table;  // vocab x dim

  static EmbeddingParams init(std::uint32_t vocab, std::uint32_t dim, Rng& rng) {
    EmbeddingParams p;
    p.table.resize(vocab, dim);
    double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    for (std::uint32_t j = 0; j < dim; ++j)
      for (std::uint32_t i = 0; i < vocab; ++i) p.table(i, j) = rng.uniform(-bound, bound);
    return p;
  }
  static EmbeddingParams zeros(std::uint32_t vocab, std::uint32_t dim) {
    EmbeddingParams p;
    p.table = Matrix::Zero(vocab, dim);
    return p;
  }

  /// Out-of-vocabulary indices clamp to the last row.
  std::uint32_t clamp(std::uint32_t idx) const {
    auto vocab = static_cast<std::uint32_t>(table.rows());
    return idx < vocab ? idx : vocab - 1;
  }
};

inline void embedding_forward(const EmbeddingParams& p, std::span<const std::uint32_t> idx,
                              Matrix& out) {
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) += p.table.row(p.clamp(idx[i]));
}

inline void embedding_backward(const EmbeddingParams& p, std::span<const std::uint32_t> idx,
                               const Matrix& dy, EmbeddingParams& grad) {
  for (std::size_t i = 0; i < idx.size(); ++i)
    grad.table.row(p.clamp(idx[i])) += dy.row(static_cast<Eigen::Index>(i));
}

inline Vector sigmoid_forward(const Vector& z) {
  return ((-z.array()).exp() + 1.0).inverse();
}

/// Mean softmax cross-entropy over the batch; fills dlogits with the mean
/// gradient. Returns the loss.
inline double softmax_cross_entropy(const Matrix& logits, std::span<const std::uint32_t> labels,
                                    Matrix& dlogits) {
  const auto batch = logits.rows();
  dlogits.resize(logits.rows(), logits.cols());
  double loss = 0;
  for (Eigen::Index i = 0; i < batch; ++i) {
    double mx = logits.row(i).maxCoeff();
    Eigen::RowVectorXd shifted = logits.row(i).array() - mx;
    Eigen::RowVectorXd expv = shifted.array().exp();
    double z = expv.sum();
    loss += std::log(z) - shifted(labels[static_cast<std::size_t>(i)]);
    dlogits.row(i) = expv / z;
    dlogits(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
  }
  dlogits /= static_cast<double>(batch);
  return loss / static_cast<double>(batch);
}

}  // namespace gfl
