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

#include <cmath>
#include <cstdint>
#include <vector>

#include "gfl/error.hpp"
#include "gfl/model.hpp"

namespace gfl {

struct AdamConfig {
  double lr0 = 0.01;
  std::uint32_t halving_period = 20;  // lr halves after every such many epochs
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-6;  // L2, folded into the gradient
};

/// Learning rate for a 0-based epoch index: lr0 / 2^(epoch / period).
inline double lr_for_epoch(double lr0, std::uint32_t epoch, std::uint32_t period) {
  if (period == 0) return lr0;
  return std::ldexp(lr0, -static_cast<int>(epoch / period));
}

class Adam {
 public:
  Adam(ModelParams& params, AdamConfig cfg) : cfg_(cfg) {
    std::size_t total = 0;
    for (const ParamView& v : param_views(params))
      if (v.learnable) total += v.size;
    m_.assign(total, 0.0);
    v_.assign(total, 0.0);
  }

  void step(ModelParams& params, ModelParams& grads, double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    auto pv = param_views(params);
    auto gv = param_views(grads);
    std::size_t off = 0;
    for (std::size_t i = 0; i < pv.size(); ++i) {
      if (!pv[i].learnable) continue;
      double* p = pv[i].data;
      const double* g = gv[i].data;
      for (std::size_t k = 0; k < pv[i].size; ++k, ++off) {
        double grad = g[k] + cfg_.weight_decay * p[k];
        m_[off] = cfg_.beta1 * m_[off] + (1.0 - cfg_.beta1) * grad;
        v_[off] = cfg_.beta2 * v_[off] + (1.0 - cfg_.beta2) * grad * grad;
        p[k] -= lr * (m_[off] / bc1) / (std::sqrt(v_[off] / bc2) + cfg_.eps);
      }
    }
    if (off != m_.size()) throw Error("optimizer/parameter shape drift");
  }

  std::uint64_t steps() const { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

}  // namespace gfl
