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

// TU benchmark text format: a dataset directory DS/ holds DS_A.txt (directed
// edge list, 1-based global node ids, both orientations), DS_graph_indicator.txt
// (graph id per node), DS_graph_labels.txt (label per graph) and optionally
// DS_node_labels.txt. Node ids are re-indexed per graph to 0..n-1 on load;
// graph and node labels are densely remapped via sorted distinct values.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gfl/error.hpp"
#include "gfl/graph.hpp"

namespace gfl {

namespace detail {

/// Reads every non-blank line of `in` as a fixed-arity integer record.
inline std::vector<std::vector<long long>> read_int_records(std::istream& in,
                                                            const std::string& name,
                                                            std::size_t arity) {
  std::vector<std::vector<long long>> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& c : line)
      if (c == ',' || c == '\r' || c == '\t') c = ' ';
    std::istringstream ls(line);
    std::vector<long long> rec;
    long long v;
    while (ls >> v) rec.push_back(v);
    if (!ls.eof()) throw ParseError(name, lineno, "non-integer token");
    if (rec.empty()) continue;  // blank line
    if (rec.size() != arity)
      throw ParseError(name, lineno,
                       "expected " + std::to_string(arity) + " integers, got " +
                           std::to_string(rec.size()));
    records.push_back(std::move(rec));
  }
  return records;
}

/// Sorted-distinct dense remap: value -> index in 0..k-1.
inline std::map<long long, std::uint32_t> dense_remap(const std::vector<long long>& values) {
  std::set<long long> distinct(values.begin(), values.end());
  std::map<long long, std::uint32_t> remap;
  std::uint32_t next = 0;
  for (long long v : distinct) remap[v] = next++;
  return remap;
}

}  // namespace detail

struct TuStreams {
  std::istream& a;
  std::istream& graph_indicator;
  std::istream& graph_labels;
  std::istream* node_labels = nullptr;  // optional
};

inline GraphDataset parse_tu_dataset(TuStreams streams, const std::string& name = "DS") {
  auto indicator = detail::read_int_records(streams.graph_indicator, name + "_graph_indicator", 1);
  const std::size_t num_nodes = indicator.size();

  long long num_graphs = 0;
  for (const auto& rec : indicator) {
    if (rec[0] < 1) throw StructuralError(name + ": graph indicator below 1");
    num_graphs = std::max(num_graphs, rec[0]);
  }

  // Global node id (1-based) -> (graph, local id). Local ids follow the rank
  // of the global id within its graph, which is the identity offset for the
  // contiguous layout TU files use.
  std::vector<std::uint32_t> node_graph(num_nodes), node_local(num_nodes);
  std::vector<std::uint32_t> graph_size(static_cast<std::size_t>(num_graphs), 0);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    auto g = static_cast<std::uint32_t>(indicator[i][0] - 1);
    node_graph[i] = g;
    node_local[i] = graph_size[g]++;
  }
  for (std::size_t g = 0; g < graph_size.size(); ++g)
    if (graph_size[g] == 0)
      throw StructuralError(name + ": graph " + std::to_string(g + 1) + " has no nodes");

  auto label_records = detail::read_int_records(streams.graph_labels, name + "_graph_labels", 1);
  if (label_records.size() != static_cast<std::size_t>(num_graphs))
    throw StructuralError(name + ": graph label count " + std::to_string(label_records.size()) +
                          " != graph count " + std::to_string(num_graphs));
  std::vector<long long> raw_labels;
  raw_labels.reserve(label_records.size());
  for (const auto& rec : label_records) raw_labels.push_back(rec[0]);
  auto label_map = detail::dense_remap(raw_labels);

  std::vector<Graph> graphs(static_cast<std::size_t>(num_graphs));
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    graphs[g].num_vertices = graph_size[g];
    graphs[g].graph_label = label_map.at(raw_labels[g]);
  }

  if (streams.node_labels) {
    auto nl = detail::read_int_records(*streams.node_labels, name + "_node_labels", 1);
    if (nl.size() != num_nodes)
      throw StructuralError(name + ": node label count != node count");
    std::vector<long long> raw;
    raw.reserve(nl.size());
    for (const auto& rec : nl) raw.push_back(rec[0]);
    auto nl_map = detail::dense_remap(raw);
    for (std::size_t g = 0; g < graphs.size(); ++g)
      graphs[g].node_labels.emplace(graphs[g].num_vertices, 0);
    for (std::size_t i = 0; i < num_nodes; ++i)
      (*graphs[node_graph[i]].node_labels)[node_local[i]] = nl_map.at(raw[i]);
  }

  auto edge_records = detail::read_int_records(streams.a, name + "_A", 2);
  std::vector<std::set<std::pair<std::uint32_t, std::uint32_t>>> edge_sets(graphs.size());
  std::size_t lineno = 0;
  for (const auto& rec : edge_records) {
    ++lineno;
    long long u = rec[0], v = rec[1];
    if (u < 1 || v < 1 || u > static_cast<long long>(num_nodes) ||
        v > static_cast<long long>(num_nodes))
      throw StructuralError(name + "_A: node id out of range in record " +
                            std::to_string(lineno));
    auto ui = static_cast<std::size_t>(u - 1), vi = static_cast<std::size_t>(v - 1);
    if (node_graph[ui] != node_graph[vi])
      throw StructuralError(name + "_A: edge (" + std::to_string(u) + "," + std::to_string(v) +
                            ") spans two graphs");
    if (ui == vi)
      throw StructuralError(name + "_A: self-loop on node " + std::to_string(u));
    auto a = node_local[ui], b = node_local[vi];
    edge_sets[node_graph[ui]].emplace(std::min(a, b), std::max(a, b));
  }
  for (std::size_t g = 0; g < graphs.size(); ++g)
    graphs[g].edges.assign(edge_sets[g].begin(), edge_sets[g].end());

  GraphDataset dataset = GraphDataset::from_graphs(std::move(graphs));
  dataset.num_classes = static_cast<std::uint32_t>(label_map.size());
  return dataset;
}

/// Resolves the <name>_*.txt files of a TU dataset directory. The prefix is
/// the directory basename; falls back to scanning for a single *_A.txt.
inline GraphDataset load_tu_dataset(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("not a dataset directory: " + dir.string());
  std::string name = dir.filename().string();
  if (name.empty()) name = dir.parent_path().filename().string();
  auto file = [&](const std::string& suffix) { return dir / (name + suffix); };
  if (!fs::exists(file("_A.txt"))) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      std::string fn = entry.path().filename().string();
      if (fn.size() > 6 && fn.ends_with("_A.txt")) {
        name = fn.substr(0, fn.size() - 6);
        break;
      }
    }
  }
  std::ifstream a(file("_A.txt")), ind(file("_graph_indicator.txt")),
      lab(file("_graph_labels.txt"));
  if (!a || !ind || !lab)
    throw ConfigError("missing TU files for dataset " + name + " in " + dir.string());
  std::ifstream nl;
  bool has_nl = fs::exists(file("_node_labels.txt"));
  if (has_nl) nl.open(file("_node_labels.txt"));
  TuStreams streams{a, ind, lab, has_nl ? &nl : nullptr};
  return parse_tu_dataset(streams, name);
}

/// Writes `dataset` to `dir` in TU format (both edge orientations, 1-based
/// contiguous node ids). Parsing the result reproduces the dataset exactly.
inline void write_tu_dataset(const GraphDataset& dataset, const std::filesystem::path& dir,
                             const std::string& name) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ofstream a(dir / (name + "_A.txt")), ind(dir / (name + "_graph_indicator.txt")),
      lab(dir / (name + "_graph_labels.txt"));
  bool any_nl = false;
  for (const Graph& g : dataset.graphs) any_nl = any_nl || g.node_labels.has_value();
  std::ofstream nl;
  if (any_nl) nl.open(dir / (name + "_node_labels.txt"));

  std::uint64_t base = 1;  // first global id of the current graph
  for (std::size_t gi = 0; gi < dataset.graphs.size(); ++gi) {
    const Graph& g = dataset.graphs[gi];
    for (std::uint32_t v = 0; v < g.num_vertices; ++v) {
      ind << (gi + 1) << "\n";
      if (any_nl) nl << (g.node_labels ? (*g.node_labels)[v] : 0) << "\n";
    }
    for (auto [u, v] : g.edges) {
      a << (base + u) << ", " << (base + v) << "\n";
      a << (base + v) << ", " << (base + u) << "\n";
    }
    lab << g.graph_label << "\n";
    base += g.num_vertices;
  }
}

}  // namespace gfl
