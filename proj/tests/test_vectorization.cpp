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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gfl/rng.hpp"
#include "gfl/vectorization.hpp"

using namespace gfl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("rational hat closed-form values") {
  SECTION("at the center with r=1") {
    StructureElement2D e{{0.3, 0.7}, 1.0};
    CHECK_THAT(rational_hat<2>({0.3, 0.7}, e), WithinAbs(0.5, 1e-12));
  }
  SECTION("on the rim the second term collapses") {
    StructureElement2D e{{0.0, 0.0}, 0.5};
    // |p - c|_1 = |r| = 0.5
    double expect = 1.0 / 1.5 - 1.0;
    CHECK_THAT(rational_hat<2>({0.5, 0.0}, e), WithinAbs(expect, 1e-12));
    StructureElement1D e1{{0.2}, -0.3};
    CHECK_THAT(rational_hat<1>({0.5}, e1), WithinAbs(1.0 / 1.3 - 1.0, 1e-12));
  }
  SECTION("both distances equal cancel") {
    StructureElement2D e{{0.0, 0.0}, 2.0};
    CHECK_THAT(rational_hat<2>({1.0, 0.0}, e), WithinAbs(0.0, 1e-12));
  }
}

namespace {

template <int D>
void check_grads(Rng& rng, int trials) {
  const double h = 1e-6;
  for (int t = 0; t < trials; ++t) {
    std::array<double, D> p;
    StructureElement<D> e;
    for (int i = 0; i < D; ++i) {
      p[i] = rng.uniform(-1, 1);
      e.c[i] = rng.uniform(-1, 1);
    }
    e.r = rng.uniform(-1, 1);
    // stay away from the kinks where the subgradient convention kicks in
    double u = 0;
    bool near_kink = std::abs(e.r) < 1e-3;
    for (int i = 0; i < D; ++i) {
      near_kink = near_kink || std::abs(p[i] - e.c[i]) < 1e-3;
      u += std::abs(p[i] - e.c[i]);
    }
    near_kink = near_kink || std::abs(std::abs(e.r) - u) < 1e-3;
    if (near_kink) {
      --t;
      continue;
    }

    auto g = rational_hat_grad<D>(p, e);
    for (int i = 0; i < D; ++i) {
      auto pp = p, pm = p;
      pp[i] += h;
      pm[i] -= h;
      double fd = (rational_hat<D>(pp, e) - rational_hat<D>(pm, e)) / (2 * h);
      CHECK_THAT(g.dp[i], WithinRel(fd, 1e-6) || WithinAbs(fd, 1e-9));

      auto ep = e, em = e;
      ep.c[i] += h;
      em.c[i] -= h;
      fd = (rational_hat<D>(p, ep) - rational_hat<D>(p, em)) / (2 * h);
      CHECK_THAT(g.dc[i], WithinRel(fd, 1e-6) || WithinAbs(fd, 1e-9));
    }
    auto ep = e, em = e;
    ep.r += h;
    em.r -= h;
    double fd = (rational_hat<D>(p, ep) - rational_hat<D>(p, em)) / (2 * h);
    CHECK_THAT(g.dr, WithinRel(fd, 1e-6) || WithinAbs(fd, 1e-9));
  }
}

}  // namespace

TEST_CASE("rational hat gradients match central differences") {
  Rng rng(2718);
  check_grads<1>(rng, 200);
  check_grads<2>(rng, 200);
}

TEST_CASE("gradient conventions at special points") {
  SECTION("at p = c the center gradient vanishes (sign(0) := 0)") {
    StructureElement2D e{{0.4, 0.6}, 0.8};
    auto g = rational_hat_grad<2>({0.4, 0.6}, e);
    CHECK(g.dc[0] == 0.0);
    CHECK(g.dc[1] == 0.0);
    CHECK(g.dp[0] == 0.0);
    CHECK(g.dp[1] == 0.0);
  }
  SECTION("dr is positive when the rim lies beyond the point") {
    StructureElement2D e{{0.0, 0.0}, 0.9};
    auto g = rational_hat_grad<2>({0.2, 0.1}, e);  // |r| > |p-c|_1 > 0
    CHECK(g.dr > 0.0);
    const double h = 1e-6;
    auto ep = e, em = e;
    ep.r += h;
    em.r -= h;
    double fd =
        (rational_hat<2>({0.2, 0.1}, ep) - rational_hat<2>({0.2, 0.1}, em)) / (2 * h);
    CHECK(fd > 0.0);
  }
}

TEST_CASE("vectorize basics") {
  Rng rng(5);
  auto vp = VectorizationParams::init(rng);

  SECTION("empty barcode set maps to the zero vector") {
    auto out = vectorize(BarcodeSet{}, vp);
    REQUIRE(out.size() == kReadoutDim);
    for (double x : out) CHECK(x == 0.0);
  }
  SECTION("singleton barcode equals the per-element hat values") {
    BarcodeSet bs;
    bs.finite0.push_back({0.25, 0.75, 0, 1});
    auto out = vectorize(bs, vp);
    for (int k = 0; k < kElementsPerBarcode; ++k)
      CHECK(out[k] == rational_hat<2>({0.25, 0.75}, vp.finite0[k]));
    for (int k = kElementsPerBarcode; k < kReadoutDim; ++k) CHECK(out[k] == 0.0);
  }
  SECTION("additive over multiset union, per channel") {
    Rng r2(17);
    BarcodeSet a, b, ab;
    auto add_random = [&](BarcodeSet& dst, int n) {
      for (int i = 0; i < n; ++i) {
        double lo = r2.uniform(0, 0.5), hi = r2.uniform(0.5001, 1);
        dst.finite0.push_back({lo, hi, 0, 1});
        dst.essential0.push_back({r2.uniform01(), 0});
        dst.essential1.push_back({r2.uniform01(), 0});
      }
    };
    add_random(a, 3);
    add_random(b, 4);
    ab = a;
    ab.finite0.insert(ab.finite0.end(), b.finite0.begin(), b.finite0.end());
    ab.essential0.insert(ab.essential0.end(), b.essential0.begin(), b.essential0.end());
    ab.essential1.insert(ab.essential1.end(), b.essential1.begin(), b.essential1.end());
    auto va = vectorize(a, vp), vb = vectorize(b, vp), vab = vectorize(ab, vp);
    for (int k = 0; k < kReadoutDim; ++k) CHECK_THAT(vab[k], WithinAbs(va[k] + vb[k], 1e-12));
  }
  SECTION("invariant under point reordering") {
    BarcodeSet a;
    a.finite0 = {{0.1, 0.9, 0, 1}, {0.2, 0.8, 1, 2}, {0.3, 0.7, 2, 0}};
    a.essential0 = {{0.5, 0}, {0.6, 1}};
    BarcodeSet b = a;
    std::swap(b.finite0[0], b.finite0[2]);
    std::swap(b.essential0[0], b.essential0[1]);
    CHECK(vectorize(a, vp) == vectorize(b, vp));
  }
  SECTION("diagonal point is a contract violation") {
    BarcodeSet bs;
    bs.finite0.push_back({0.5, 0.5, 0, 1});
    CHECK_THROWS_AS(vectorize(bs, vp), Error);
  }
}

TEST_CASE("vectorize backward matches finite differences") {
  Rng rng(40902);
  auto vp = VectorizationParams::init(rng);
  BarcodeSet bs;
  bs.finite0 = {{0.21, 0.86, 0, 1}, {0.33, 0.52, 2, 1}};
  bs.essential0 = {{0.11, 0}, {0.67, 2}};
  bs.essential1 = {{0.79, 1}};
  const std::uint32_t n = 3;

  // scalar objective: weighted sum of the readout
  std::vector<double> w(kReadoutDim);
  for (auto& x : w) x = rng.uniform(-1, 1);
  auto objective = [&](const BarcodeSet& b, const VectorizationParams& p) {
    auto out = vectorize(b, p);
    double s = 0;
    for (int k = 0; k < kReadoutDim; ++k) s += w[k] * out[k];
    return s;
  };

  std::vector<double> d_filter(n, 0.0);
  VectorizationParams d_vp;
  d_vp.finite0.resize(kElementsPerBarcode);
  d_vp.essential0.resize(kElementsPerBarcode);
  d_vp.essential1.resize(kElementsPerBarcode);
  vectorize_backward(bs, vp, w, d_filter, d_vp);

  const double h = 1e-6;
  auto fd_ok = [](double analytic, double fd) {
    return std::abs(analytic - fd) <= std::max(1e-8, 1e-4 * std::max(std::abs(analytic), std::abs(fd)));
  };

  // filter-value gradients: bump every coordinate attributed to vertex v
  for (std::uint32_t v = 0; v < n; ++v) {
    auto bump = [&](double eps) {
      BarcodeSet b = bs;
      for (auto& p : b.finite0) {
        if (p.birth_attr == v) p.birth += eps;
        if (p.death_attr == v) p.death += eps;
      }
      for (auto& p : b.essential0)
        if (p.birth_attr == v) p.birth += eps;
      for (auto& p : b.essential1)
        if (p.birth_attr == v) p.birth += eps;
      return objective(b, vp);
    };
    double fd = (bump(h) - bump(-h)) / (2 * h);
    CHECK(fd_ok(d_filter[v], fd));
  }

  // a sample of element parameter gradients
  Rng pick(9);
  for (int rep = 0; rep < 60; ++rep) {
    int k = static_cast<int>(pick.below(kElementsPerBarcode));
    int channel = static_cast<int>(pick.below(3));
    int coord = static_cast<int>(pick.below(channel == 0 ? 3 : 2));
    auto read = [&](VectorizationParams& p) -> double* {
      if (channel == 0)
        return coord < 2 ? &p.finite0[k].c[coord] : &p.finite0[k].r;
      auto& els = channel == 1 ? p.essential0 : p.essential1;
      return coord < 1 ? &els[k].c[0] : &els[k].r;
    };
    VectorizationParams vp_p = vp, vp_m = vp;
    *read(vp_p) += h;
    *read(vp_m) -= h;
    double fd = (objective(bs, vp_p) - objective(bs, vp_m)) / (2 * h);
    VectorizationParams probe = d_vp;
    CHECK(fd_ok(*read(probe), fd));
  }
}
