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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "gfl/error.hpp"
#include "gfl/graph.hpp"

namespace gfl {

struct Simplex {
  // dim 0: {v[0]}, v[1] unused; dim 1: {v[0], v[1]} with v[0] < v[1].
  std::uint8_t dim = 0;
  std::uint32_t v[2] = {0, 0};

  static Simplex vertex(std::uint32_t a) { return Simplex{0, {a, 0}}; }
  static Simplex edge(std::uint32_t a, std::uint32_t b) {
    return Simplex{1, {std::min(a, b), std::max(a, b)}};
  }
};

/// Sublevel filtration of a graph under a vertex function: a strict total
/// order on all simplices, the per-simplex value, the vertex attributed with
/// realizing that value, and the 1-based index of the value among the sorted
/// distinct values a_1 < ... < a_m.
///
/// The order sorts by (value, dim, lexicographic vertex tuple) ascending.
/// Value ties are settled deterministically so that the whole pipeline,
/// gradients included, is reproducible: the barcode itself does not depend on
/// the tie rule, but the gradient routing does.
struct Filtration {
  std::uint32_t num_vertices = 0;
  std::vector<Simplex> simplices;        // filtration order
  std::vector<double> values;            // per simplex
  std::vector<std::uint32_t> attribution;  // vertex realizing the value
  std::vector<std::uint32_t> level;      // 1-based rank among distinct values
  std::vector<double> level_values;      // a_1 .. a_m

  std::uint32_t num_levels() const { return static_cast<std::uint32_t>(level_values.size()); }
  std::size_t size() const { return simplices.size(); }
};

inline std::vector<double> negate_filter(std::span<const double> f) {
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = -f[i];
  return g;
}

/// Builds the sublevel filtration of `g` under per-vertex values `f`: edges
/// take the max of their endpoint values, attributed to the endpoint
/// attaining it (ties to the smaller vertex index).
inline Filtration build_sublevel_filtration(const Graph& g, std::span<const double> f) {
  if (f.size() != g.num_vertices)
    throw NumericError("filter size != vertex count");
  for (double x : f)
    if (!std::isfinite(x)) throw NumericError("non-finite filter value");

  Filtration flt;
  flt.num_vertices = g.num_vertices;
  const std::size_t n = g.num_vertices, total = n + g.edges.size();
  flt.simplices.reserve(total);
  flt.values.reserve(total);
  flt.attribution.reserve(total);

  for (std::uint32_t v = 0; v < n; ++v) {
    flt.simplices.push_back(Simplex::vertex(v));
    flt.values.push_back(f[v]);
    flt.attribution.push_back(v);
  }
  for (auto [u, v] : g.edges) {
    flt.simplices.push_back(Simplex::edge(u, v));
    // max aggregation; on equal endpoint values attribute the smaller index
    std::uint32_t attr = f[u] >= f[v] ? u : v;
    flt.values.push_back(std::max(f[u], f[v]));
    flt.attribution.push_back(attr);
  }

  std::vector<std::uint32_t> order(total);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (flt.values[a] != flt.values[b]) return flt.values[a] < flt.values[b];
    const Simplex &sa = flt.simplices[a], &sb = flt.simplices[b];
    if (sa.dim != sb.dim) return sa.dim < sb.dim;
    if (sa.v[0] != sb.v[0]) return sa.v[0] < sb.v[0];
    return sa.v[1] < sb.v[1];
  });

  Filtration out;
  out.num_vertices = flt.num_vertices;
  out.simplices.reserve(total);
  out.values.reserve(total);
  out.attribution.reserve(total);
  out.level.reserve(total);
  for (std::uint32_t idx : order) {
    out.simplices.push_back(flt.simplices[idx]);
    out.values.push_back(flt.values[idx]);
    out.attribution.push_back(flt.attribution[idx]);
  }
  // Distinct values in ascending order; exact comparison is correct here
  // because an edge value is a bitwise copy of an endpoint value.
  for (std::size_t i = 0; i < total; ++i) {
    if (i == 0 || out.values[i] != out.values[i - 1])
      out.level_values.push_back(out.values[i]);
    out.level.push_back(static_cast<std::uint32_t>(out.level_values.size()));
  }
  return out;
}

}  // namespace gfl
