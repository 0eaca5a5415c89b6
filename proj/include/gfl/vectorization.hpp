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

// Barcode coordinate functions built on the rational hat structure element
//
//   s(p) = 1/(1 + |p - c|_1)  -  1/(1 + | |r| - |p - c|_1 |)
//
// with learnable center c and radius r. One element produces one output
// coordinate by summing s over all points of a barcode; each barcode channel
// carries 100 elements, and the three channels concatenate to the 300-dim
// graph representation. Finite barcodes live in R^2, essential barcodes in R
// (the same formula with the 1-norm degenerating to |.|).
//
// The element does not vanish on the diagonal, so the assembly stage must
// already have removed zero-persistence points; vectorize() enforces that.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "gfl/barcode.hpp"
#include "gfl/error.hpp"
#include "gfl/rng.hpp"

namespace gfl {

inline constexpr int kElementsPerBarcode = 100;
inline constexpr int kReadoutDim = 3 * kElementsPerBarcode;

namespace detail {
// Subgradient convention at the kinks of |.|: sign(0) := 0.
inline double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }
}  // namespace detail

template <int D>
struct StructureElement {
  std::array<double, D> c{};
  double r = 0;
};

using StructureElement1D = StructureElement<1>;
using StructureElement2D = StructureElement<2>;

template <int D>
inline double rational_hat(const std::array<double, D>& p, const StructureElement<D>& e) {
  double u = 0;
  for (int i = 0; i < D; ++i) u += std::abs(p[i] - e.c[i]);
  double w = std::abs(std::abs(e.r) - u);
  return 1.0 / (1.0 + u) - 1.0 / (1.0 + w);
}

template <int D>
struct RationalHatGrad {
  std::array<double, D> dp{};
  std::array<double, D> dc{};
  double dr = 0;
};

template <int D>
inline RationalHatGrad<D> rational_hat_grad(const std::array<double, D>& p,
                                            const StructureElement<D>& e) {
  double u = 0;
  std::array<double, D> su{};
  for (int i = 0; i < D; ++i) {
    double d = p[i] - e.c[i];
    su[i] = detail::sgn(d);
    u += std::abs(d);
  }
  double rim = std::abs(e.r) - u;
  double w = std::abs(rim);
  double inv_u = 1.0 / (1.0 + u), inv_w = 1.0 / (1.0 + w);
  // ds/du and ds/d|r| through both terms
  double ds_du = -inv_u * inv_u - detail::sgn(rim) * inv_w * inv_w;
  double ds_dr = detail::sgn(rim) * detail::sgn(e.r) * inv_w * inv_w;

  RationalHatGrad<D> g;
  for (int i = 0; i < D; ++i) {
    g.dp[i] = ds_du * su[i];
    g.dc[i] = -ds_du * su[i];
  }
  g.dr = ds_dr;
  return g;
}

struct VectorizationParams {
  std::vector<StructureElement2D> finite0;    // kElementsPerBarcode each
  std::vector<StructureElement1D> essential0;
  std::vector<StructureElement1D> essential1;

  /// Centers uniform over the barcode support [0,1]^d, radius 0.25.
  static VectorizationParams init(Rng& rng) {
    VectorizationParams vp;
    vp.finite0.resize(kElementsPerBarcode);
    vp.essential0.resize(kElementsPerBarcode);
    vp.essential1.resize(kElementsPerBarcode);
    for (auto& e : vp.finite0) e = {{rng.uniform01(), rng.uniform01()}, 0.25};
    for (auto& e : vp.essential0) e = {{rng.uniform01()}, 0.25};
    for (auto& e : vp.essential1) e = {{rng.uniform01()}, 0.25};
    return vp;
  }
};

/// Output layout: [finite0 | essential0 | essential1], 100 coordinates each.
/// An empty barcode contributes zeros to its channel.
inline std::vector<double> vectorize(const BarcodeSet& bs, const VectorizationParams& vp) {
  std::vector<double> out(kReadoutDim, 0.0);
  for (const FinitePoint& p : bs.finite0) {
    if (p.birth == p.death)
      throw Error("diagonal barcode point reached vectorization");
    std::array<double, 2> q{p.birth, p.death};
    for (int k = 0; k < kElementsPerBarcode; ++k) out[k] += rational_hat<2>(q, vp.finite0[k]);
  }
  for (const EssPoint& p : bs.essential0) {
    std::array<double, 1> q{p.birth};
    for (int k = 0; k < kElementsPerBarcode; ++k)
      out[kElementsPerBarcode + k] += rational_hat<1>(q, vp.essential0[k]);
  }
  for (const EssPoint& p : bs.essential1) {
    std::array<double, 1> q{p.birth};
    for (int k = 0; k < kElementsPerBarcode; ++k)
      out[2 * kElementsPerBarcode + k] += rational_hat<1>(q, vp.essential1[k]);
  }
  return out;
}

/// Reverse pass of vectorize. Coordinate gradients flow to the attributed
/// vertex's filter value (sign +1 for sub- and mirrored superlevel points
/// alike, see BarcodeSet); element gradients accumulate into `d_vp`.
/// `d_filter` must be sized to the graph's vertex count.
inline void vectorize_backward(const BarcodeSet& bs, const VectorizationParams& vp,
                               std::span<const double> d_out, std::span<double> d_filter,
                               VectorizationParams& d_vp) {
  for (const FinitePoint& p : bs.finite0) {
    std::array<double, 2> q{p.birth, p.death};
    for (int k = 0; k < kElementsPerBarcode; ++k) {
      double g = d_out[k];
      if (g == 0) continue;
      auto hg = rational_hat_grad<2>(q, vp.finite0[k]);
      d_filter[p.birth_attr] += g * hg.dp[0];
      d_filter[p.death_attr] += g * hg.dp[1];
      d_vp.finite0[k].c[0] += g * hg.dc[0];
      d_vp.finite0[k].c[1] += g * hg.dc[1];
      d_vp.finite0[k].r += g * hg.dr;
    }
  }
  auto essential = [&](const std::vector<EssPoint>& points,
                       const std::vector<StructureElement1D>& els,
                       std::vector<StructureElement1D>& dels, int base) {
    for (const EssPoint& p : points) {
      std::array<double, 1> q{p.birth};
      for (int k = 0; k < kElementsPerBarcode; ++k) {
        double g = d_out[base + k];
        if (g == 0) continue;
        auto hg = rational_hat_grad<1>(q, els[k]);
        d_filter[p.birth_attr] += g * hg.dp[0];
        dels[k].c[0] += g * hg.dc[0];
        dels[k].r += g * hg.dr;
      }
    }
  };
  essential(bs.essential0, vp.essential0, d_vp.essential0, kElementsPerBarcode);
  essential(bs.essential1, vp.essential1, d_vp.essential1, 2 * kElementsPerBarcode);
}

}  // namespace gfl
