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
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gfl/error.hpp"

namespace gfl {

/// Undirected graph with 0-based vertex ids local to the graph. Also the
/// 1-dimensional simplicial complex it spans: vertices are the 0-simplices,
/// edges the 1-simplices.
struct Graph {
  std::uint32_t num_vertices = 0;
  /// Each undirected edge stored once as (i, j) with i < j, no duplicates.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  /// Discrete node attributes, densely remapped; empty when the dataset has none.
  std::optional<std::vector<std::uint32_t>> node_labels;
  std::uint32_t graph_label = 0;

  std::vector<std::uint32_t> degrees() const {
    std::vector<std::uint32_t> deg(num_vertices, 0);
    for (auto [u, v] : edges) {
      ++deg[u];
      ++deg[v];
    }
    return deg;
  }

  /// Throws StructuralError if an invariant is broken.
  void validate() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> seen(edges);
    std::sort(seen.begin(), seen.end());
    for (std::size_t k = 0; k < seen.size(); ++k) {
      auto [u, v] = seen[k];
      if (u == v) throw StructuralError("self-loop on vertex " + std::to_string(u));
      if (u > v) throw StructuralError("edge endpoints not ascending");
      if (v >= num_vertices)
        throw StructuralError("edge endpoint " + std::to_string(v) + " out of range");
      if (k > 0 && seen[k] == seen[k - 1]) throw StructuralError("duplicate edge");
    }
    if (node_labels && node_labels->size() != num_vertices)
      throw StructuralError("node_labels length mismatch");
  }
};

struct GraphDataset {
  std::vector<Graph> graphs;
  std::uint32_t num_classes = 0;
  std::uint32_t max_degree = 0;
  std::uint32_t num_node_labels = 0;

  /// Builds a dataset from graphs whose labels are already 0..C-1, computing
  /// the dataset-level statistics.
  static GraphDataset from_graphs(std::vector<Graph> gs) {
    GraphDataset d;
    d.graphs = std::move(gs);
    for (const Graph& g : d.graphs) {
      d.num_classes = std::max(d.num_classes, g.graph_label + 1);
      for (std::uint32_t deg : g.degrees()) d.max_degree = std::max(d.max_degree, deg);
      if (g.node_labels)
        for (std::uint32_t l : *g.node_labels)
          d.num_node_labels = std::max(d.num_node_labels, l + 1);
    }
    return d;
  }
};

enum class FeatureMode { degree, uninformative, degree_and_label };

/// Per-vertex embedding-table indices. `label` parallels `primary` only in
/// degree_and_label mode.
struct NodeFeatures {
  std::vector<std::uint32_t> primary;
  std::vector<std::uint32_t> label;

  bool has_label() const { return !label.empty(); }
};

inline NodeFeatures initial_features(const Graph& g, FeatureMode mode) {
  NodeFeatures f;
  switch (mode) {
    case FeatureMode::degree:
      f.primary = g.degrees();
      break;
    case FeatureMode::uninformative:
      f.primary.assign(g.num_vertices, 0);
      break;
    case FeatureMode::degree_and_label:
      if (!g.node_labels)
        throw ConfigError("degree_and_label features require node labels");
      f.primary = g.degrees();
      f.label = *g.node_labels;
      break;
  }
  return f;
}

/// Size of the primary feature embedding table for a dataset/mode pair.
/// Degrees index 0..max_degree; unseen larger degrees clamp to the last row.
inline std::uint32_t feature_vocab(const GraphDataset& d, FeatureMode mode) {
  return mode == FeatureMode::uninformative ? 1u : d.max_degree + 1u;
}

}  // namespace gfl
