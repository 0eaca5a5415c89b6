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

// Synthetic graph families whose classes differ topologically:
//
//   tree       random tree, uniform attachment           (beta_1 = 0)
//   pa_tree    preferential attachment tree; same cycle rank with a
//              degree-inhomogeneous profile
//   cyclesK    connected graph with exactly K independent cycles: a tree
//              plus K extra edges (K a positive integer, e.g. cycles2)
//   pa_cyclesK preferential-attachment variant of cyclesK

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gfl/error.hpp"
#include "gfl/graph.hpp"
#include "gfl/rng.hpp"

namespace gfl {

struct SynthSpec {
  std::vector<std::string> class_families;
  std::uint32_t n_per_class = 100;
  std::uint32_t size_min = 10;
  std::uint32_t size_max = 30;
  std::uint64_t seed = 0;
};

namespace detail {

struct FamilyKind {
  bool preferential = false;
  std::uint32_t extra_edges = 0;
};

inline FamilyKind parse_family(const std::string& name) {
  FamilyKind k;
  std::string rest = name;
  if (rest.starts_with("pa_")) {
    k.preferential = true;
    rest = rest.substr(3);
  }
  if (rest == "tree") return k;
  if (rest.starts_with("cycles")) {
    auto digits = rest.substr(6);
    std::uint32_t count = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), count);
    if (ec == std::errc() && p == digits.data() + digits.size() && count >= 1) {
      k.extra_edges = count;
      return k;
    }
  }
  throw ConfigError("unknown graph family: " + name);
}

inline Graph generate_family_graph(const FamilyKind& kind, std::uint32_t n, Rng& rng) {
  Graph g;
  g.num_vertices = n;
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  // endpoints list doubles as the degree-proportional sampling pool
  std::vector<std::uint32_t> pool;
  for (std::uint32_t v = 1; v < n; ++v) {
    std::uint32_t u;
    if (kind.preferential && !pool.empty())
      u = pool[static_cast<std::size_t>(rng.below(pool.size()))];
    else
      u = static_cast<std::uint32_t>(rng.below(v));
    edges.emplace(std::min(u, v), std::max(u, v));
    pool.push_back(u);
    pool.push_back(v);
  }
  std::uint64_t capacity = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (capacity < edges.size() + kind.extra_edges)
    throw ConfigError("graphs of size " + std::to_string(n) + " cannot host " +
                      std::to_string(kind.extra_edges) + " extra edges");
  for (std::uint32_t added = 0; added < kind.extra_edges;) {
    auto a = static_cast<std::uint32_t>(rng.below(n));
    auto b = static_cast<std::uint32_t>(rng.below(n));
    if (a == b) continue;
    if (edges.emplace(std::min(a, b), std::max(a, b)).second) ++added;
  }
  g.edges.assign(edges.begin(), edges.end());
  return g;
}

}  // namespace detail

inline GraphDataset generate_synthetic(const SynthSpec& spec) {
  if (spec.class_families.empty()) throw ConfigError("synthetic spec lists no families");
  if (spec.n_per_class == 0) throw ConfigError("n_per_class must be positive");
  if (spec.size_min < 2 || spec.size_max < spec.size_min)
    throw ConfigError("invalid size range");

  std::vector<detail::FamilyKind> kinds;
  for (const std::string& name : spec.class_families)
    kinds.push_back(detail::parse_family(name));

  std::vector<Graph> graphs;
  graphs.reserve(kinds.size() * spec.n_per_class);
  for (std::uint32_t c = 0; c < kinds.size(); ++c) {
    for (std::uint32_t i = 0; i < spec.n_per_class; ++i) {
      Rng rng(derive_seed(spec.seed, (static_cast<std::uint64_t>(c) << 32) | i));
      auto n = spec.size_min + static_cast<std::uint32_t>(
                                   rng.below(spec.size_max - spec.size_min + 1));
      Graph g = detail::generate_family_graph(kinds[c], n, rng);
      g.graph_label = c;
      graphs.push_back(std::move(g));
    }
  }
  GraphDataset d = GraphDataset::from_graphs(std::move(graphs));
  d.num_classes = static_cast<std::uint32_t>(kinds.size());
  return d;
}

}  // namespace gfl
