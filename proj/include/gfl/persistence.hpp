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

// Two independent persistence engines over a vertex-filtered graph:
//
//   persistence_union_find     - 0-dim pairs by disjoint sets (elder rule),
//                                1-dim essential births for cycle edges;
//                                near-linear, the training fast path.
//   persistence_matrix_reduction - left-to-right GF(2) column reduction of
//                                the boundary matrix; the general path.
//
// Both must produce identical output, point for point including the vertex
// attributions; the test suite enforces this. On a 1-dimensional complex no
// 2-simplices exist, so every 1-cycle is essential and B_1 has no finite
// points by construction.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "gfl/filtration.hpp"

namespace gfl {

constexpr std::uint32_t kNoVertex = std::numeric_limits<std::uint32_t>::max();

struct BarcodePoint {
  double birth = 0;
  double death = 0;
  std::uint32_t birth_attr = kNoVertex;
  std::uint32_t death_attr = kNoVertex;
  /// Birth and death happen at the same filtration level. Kept internally so
  /// the |V| - c counting identity holds; dropped at barcode assembly.
  bool zero_persistence = false;
};

struct EssentialPoint {
  double birth = 0;
  std::uint32_t birth_attr = kNoVertex;
};

struct RawBarcodes {
  std::vector<BarcodePoint> b0_finite;  // includes zero-persistence, flagged
  std::vector<EssentialPoint> b0_essential;
  std::vector<EssentialPoint> b1_essential;
};

inline RawBarcodes persistence_union_find(const Filtration& flt) {
  RawBarcodes out;
  const std::uint32_t n = flt.num_vertices;
  std::vector<std::uint32_t> parent(n), rank(n, 0);
  // Per-component metadata, stored at the current set root. A component is
  // identified by its birth vertex: the first vertex of the component in
  // filtration order. On a merge the component whose birth vertex is later
  // in the order dies; this is the elder rule plus its documented tie-break
  // (equal births die toward the larger birth-vertex index), and matches the
  // lowest-one pairing of the matrix reduction.
  std::vector<std::uint32_t> birth_pos(n), birth_vertex(n), birth_level(n);
  std::vector<double> birth_value(n);
  std::iota(parent.begin(), parent.end(), 0u);

  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  for (std::size_t pos = 0; pos < flt.size(); ++pos) {
    const Simplex& s = flt.simplices[pos];
    if (s.dim == 0) {
      std::uint32_t v = s.v[0];
      birth_pos[v] = static_cast<std::uint32_t>(pos);
      birth_vertex[v] = v;
      birth_level[v] = flt.level[pos];
      birth_value[v] = flt.values[pos];
      continue;
    }
    assert(s.v[0] < n && s.v[1] < n);
    std::uint32_t ra = find(s.v[0]), rb = find(s.v[1]);
    if (ra == rb) {
      // cycle edge: an essential 1-dim class is born here
      out.b1_essential.push_back({flt.values[pos], flt.attribution[pos]});
      continue;
    }
    std::uint32_t young = birth_pos[ra] > birth_pos[rb] ? ra : rb;
    std::uint32_t old_root = young == ra ? rb : ra;
    out.b0_finite.push_back({birth_value[young], flt.values[pos], birth_vertex[young],
                             flt.attribution[pos],
                             birth_level[young] == flt.level[pos]});
    // union by rank; surviving metadata is the elder's
    if (rank[ra] < rank[rb]) std::swap(ra, rb);
    parent[rb] = ra;
    if (rank[ra] == rank[rb]) ++rank[ra];
    birth_pos[ra] = birth_pos[old_root];
    birth_vertex[ra] = birth_vertex[old_root];
    birth_level[ra] = birth_level[old_root];
    birth_value[ra] = birth_value[old_root];
  }

  // surviving components, in birth order (matches the reduction engine)
  std::vector<std::uint32_t> roots;
  for (std::uint32_t v = 0; v < n; ++v)
    if (find(v) == v) roots.push_back(v);
  std::sort(roots.begin(), roots.end(),
            [&](std::uint32_t a, std::uint32_t b) { return birth_pos[a] < birth_pos[b]; });
  for (std::uint32_t r : roots) out.b0_essential.push_back({birth_value[r], birth_vertex[r]});
  return out;
}

inline RawBarcodes persistence_matrix_reduction(const Filtration& flt) {
  RawBarcodes out;
  const std::size_t total = flt.size();
  std::vector<std::uint32_t> vertex_pos(flt.num_vertices, 0);
  for (std::size_t pos = 0; pos < total; ++pos)
    if (flt.simplices[pos].dim == 0) vertex_pos[flt.simplices[pos].v[0]] = static_cast<std::uint32_t>(pos);

  // pivot row -> index of the reduced column owning it
  std::vector<std::uint32_t> pivot_owner(total, kNoVertex);
  std::vector<std::vector<std::uint32_t>> columns(total);
  std::vector<bool> vertex_paired(flt.num_vertices, false);

  for (std::size_t pos = 0; pos < total; ++pos) {
    const Simplex& s = flt.simplices[pos];
    if (s.dim == 0) continue;
    std::uint32_t pa = vertex_pos[s.v[0]], pb = vertex_pos[s.v[1]];
    assert(pa < pos && pb < pos);  // face before coface
    std::vector<std::uint32_t>& col = columns[pos];
    col = {std::min(pa, pb), std::max(pa, pb)};
    while (!col.empty()) {
      std::uint32_t low = col.back();
      std::uint32_t owner = pivot_owner[low];
      if (owner == kNoVertex) break;
      // GF(2) column addition (symmetric difference of sorted index sets)
      const auto& other = columns[owner];
      std::vector<std::uint32_t> sum;
      sum.reserve(col.size() + other.size());
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                    std::back_inserter(sum));
      col.swap(sum);
    }
    if (col.empty()) {
      out.b1_essential.push_back({flt.values[pos], flt.attribution[pos]});
    } else {
      std::uint32_t low = col.back();
      pivot_owner[low] = static_cast<std::uint32_t>(pos);
      assert(flt.simplices[low].dim == 0);
      vertex_paired[flt.simplices[low].v[0]] = true;
      out.b0_finite.push_back({flt.values[low], flt.values[pos], flt.attribution[low],
                               flt.attribution[pos], flt.level[low] == flt.level[pos]});
    }
  }
  for (std::size_t pos = 0; pos < total; ++pos) {
    const Simplex& s = flt.simplices[pos];
    if (s.dim == 0 && !vertex_paired[s.v[0]])
      out.b0_essential.push_back({flt.values[pos], flt.attribution[pos]});
  }
  return out;
}

}  // namespace gfl
