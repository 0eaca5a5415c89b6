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

// The end-to-end classifier with its homological readout.
//
// Vertex filter (readout gfl): Embedding -> one GIN-eps aggregation with
// inner MLP FC[64,64]-BatchNorm-LeakyReLU-FC[64,64] -> filter head
// FC[64,64]-BatchNorm-LeakyReLU-FC[64,1]-Sigmoid, values in (0,1).
//
// Readout: sub- and superlevel filtrations of the filter, union-find
// persistence, barcode assembly, rational-hat vectorization (3 x 100 dims).
// ph_only freezes the filter to degree/max_degree; sum sums the GIN node
// features; baseline sums per-vertex MLP features without message passing.
//
// Classifier: FC[readout,64]-ReLU-FC[64,classes].
//
// Gradients are exact reverse-mode: a barcode coordinate is the filter value
// of its attributed vertex, so its gradient flows to that vertex and on
// through sigmoid/MLP/GIN/embeddings. When filter values tie, the routing is
// whatever the documented deterministic tie rules of the filtration induce.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "gfl/barcode.hpp"
#include "gfl/error.hpp"
#include "gfl/filtration.hpp"
#include "gfl/graph.hpp"
#include "gfl/nn.hpp"
#include "gfl/persistence.hpp"
#include "gfl/rng.hpp"
#include "gfl/vectorization.hpp"

namespace gfl {

enum class Readout { gfl, ph_only, sum, baseline };
enum class Mode { train, eval };

struct ModelConfig {
  Readout readout = Readout::gfl;
  FeatureMode features = FeatureMode::degree;
  std::uint32_t primary_vocab = 1;
  std::uint32_t label_vocab = 0;  // 0: no label embedding
  std::uint32_t num_classes = 2;
  std::uint32_t hidden = 64;
  std::uint32_t max_degree = 1;  // ph_only filter normalization

  bool uses_persistence() const {
    return readout == Readout::gfl || readout == Readout::ph_only;
  }
  bool uses_node_net() const { return readout != Readout::ph_only; }
  bool uses_aggregation() const {
    return readout == Readout::gfl || readout == Readout::sum;
  }
  std::uint32_t readout_dim() const {
    return uses_persistence() ? static_cast<std::uint32_t>(kReadoutDim) : hidden;
  }

  static ModelConfig for_dataset(const GraphDataset& d, Readout r, FeatureMode mode) {
    ModelConfig cfg;
    cfg.readout = r;
    cfg.features = mode;
    cfg.primary_vocab = feature_vocab(d, mode);
    cfg.label_vocab = mode == FeatureMode::degree_and_label ? d.num_node_labels : 0;
    cfg.num_classes = d.num_classes;
    cfg.max_degree = std::max(1u, d.max_degree);
    return cfg;
  }
};

struct ModelParams {
  ModelConfig cfg;
  EmbeddingParams emb_primary;
  EmbeddingParams emb_label;  // empty table when cfg.label_vocab == 0
  double gin_eps = 0.0;
  LinearParams gin_fc1;
  BatchNormParams gin_bn;
  LinearParams gin_fc2;
  LinearParams flt_fc1;
  BatchNormParams flt_bn;
  LinearParams flt_fc2;
  LinearParams clf_fc1;
  LinearParams clf_fc2;
  VectorizationParams vec;

  static ModelParams init(const ModelConfig& cfg, Rng& rng) {
    ModelParams p;
    p.cfg = cfg;
    const std::uint32_t h = cfg.hidden;
    p.emb_primary = EmbeddingParams::init(cfg.primary_vocab, h, rng);
    p.emb_label = cfg.label_vocab ? EmbeddingParams::init(cfg.label_vocab, h, rng)
                                  : EmbeddingParams{Matrix(0, h)};
    p.gin_eps = 0.0;  // learnable, starts at plain sum aggregation
    p.gin_fc1 = LinearParams::init(h, h, rng);
    p.gin_bn = BatchNormParams::init(h);
    p.gin_fc2 = LinearParams::init(h, h, rng);
    p.flt_fc1 = LinearParams::init(h, h, rng);
    p.flt_bn = BatchNormParams::init(h);
    p.flt_fc2 = LinearParams::init(h, 1, rng);
    p.clf_fc1 = LinearParams::init(cfg.readout_dim(), h, rng);
    p.clf_fc2 = LinearParams::init(h, cfg.num_classes, rng);
    p.vec = VectorizationParams::init(rng);
    return p;
  }

  static ModelParams zeros_like(const ModelParams& src) {
    ModelParams p;
    p.cfg = src.cfg;
    const std::uint32_t h = src.cfg.hidden;
    p.emb_primary = EmbeddingParams::zeros(src.cfg.primary_vocab, h);
    p.emb_label = EmbeddingParams{Matrix::Zero(src.emb_label.table.rows(), h)};
    p.gin_eps = 0.0;
    p.gin_fc1 = LinearParams::zeros(h, h);
    p.gin_bn = BatchNormParams::zeros(h);
    p.gin_fc2 = LinearParams::zeros(h, h);
    p.flt_fc1 = LinearParams::zeros(h, h);
    p.flt_bn = BatchNormParams::zeros(h);
    p.flt_fc2 = LinearParams::zeros(h, 1);
    p.clf_fc1 = LinearParams::zeros(src.cfg.readout_dim(), h);
    p.clf_fc2 = LinearParams::zeros(h, src.cfg.num_classes);
    p.vec.finite0.assign(kElementsPerBarcode, StructureElement2D{});
    p.vec.essential0.assign(kElementsPerBarcode, StructureElement1D{});
    p.vec.essential1.assign(kElementsPerBarcode, StructureElement1D{});
    return p;
  }
};

/// Flat named view over every parameter array; the checkpoint layout and the
/// optimizer/finite-difference parameter order.
struct ParamView {
  const char* name;
  double* data;
  std::size_t size;
  bool learnable;  // running statistics are state, not parameters
};

static_assert(sizeof(StructureElement2D) == 3 * sizeof(double));
static_assert(sizeof(StructureElement1D) == 2 * sizeof(double));

inline std::vector<ParamView> param_views(ModelParams& p) {
  std::vector<ParamView> v;
  auto mat = [&](const char* name, Matrix& m, bool learnable = true) {
    v.push_back({name, m.data(), static_cast<std::size_t>(m.size()), learnable});
  };
  auto vec = [&](const char* name, Vector& x, bool learnable = true) {
    v.push_back({name, x.data(), static_cast<std::size_t>(x.size()), learnable});
  };
  mat("emb.primary", p.emb_primary.table);
  if (p.emb_label.table.rows() > 0) mat("emb.label", p.emb_label.table);
  v.push_back({"gin.eps", &p.gin_eps, 1, true});
  mat("gin.fc1.w", p.gin_fc1.W);
  vec("gin.fc1.b", p.gin_fc1.b);
  vec("gin.bn.gamma", p.gin_bn.gamma);
  vec("gin.bn.beta", p.gin_bn.beta);
  vec("gin.bn.running_mean", p.gin_bn.running_mean, false);
  vec("gin.bn.running_var", p.gin_bn.running_var, false);
  mat("gin.fc2.w", p.gin_fc2.W);
  vec("gin.fc2.b", p.gin_fc2.b);
  mat("flt.fc1.w", p.flt_fc1.W);
  vec("flt.fc1.b", p.flt_fc1.b);
  vec("flt.bn.gamma", p.flt_bn.gamma);
  vec("flt.bn.beta", p.flt_bn.beta);
  vec("flt.bn.running_mean", p.flt_bn.running_mean, false);
  vec("flt.bn.running_var", p.flt_bn.running_var, false);
  mat("flt.fc2.w", p.flt_fc2.W);
  vec("flt.fc2.b", p.flt_fc2.b);
  mat("clf.fc1.w", p.clf_fc1.W);
  vec("clf.fc1.b", p.clf_fc1.b);
  mat("clf.fc2.w", p.clf_fc2.W);
  vec("clf.fc2.b", p.clf_fc2.b);
  v.push_back({"vec.finite0", reinterpret_cast<double*>(p.vec.finite0.data()),
               p.vec.finite0.size() * 3, true});
  v.push_back({"vec.essential0", reinterpret_cast<double*>(p.vec.essential0.data()),
               p.vec.essential0.size() * 2, true});
  v.push_back({"vec.essential1", reinterpret_cast<double*>(p.vec.essential1.data()),
               p.vec.essential1.size() * 2, true});
  return v;
}

/// Graph plus everything the model needs precomputed: feature indices and a
/// CSR adjacency. Immutable and shareable.
struct PreparedGraph {
  const Graph* graph = nullptr;
  NodeFeatures features;
  std::vector<std::uint32_t> adj_offsets;  // n+1
  std::vector<std::uint32_t> adj;
};

inline PreparedGraph prepare_graph(const Graph& g, FeatureMode mode) {
  PreparedGraph pg;
  pg.graph = &g;
  pg.features = initial_features(g, mode);
  pg.adj_offsets.assign(g.num_vertices + 1, 0);
  for (auto [u, v] : g.edges) {
    ++pg.adj_offsets[u + 1];
    ++pg.adj_offsets[v + 1];
  }
  for (std::uint32_t i = 1; i <= g.num_vertices; ++i) pg.adj_offsets[i] += pg.adj_offsets[i - 1];
  pg.adj.resize(pg.adj_offsets.back());
  std::vector<std::uint32_t> cursor(pg.adj_offsets.begin(), pg.adj_offsets.end() - 1);
  for (auto [u, v] : g.edges) {
    pg.adj[cursor[u]++] = v;
    pg.adj[cursor[v]++] = u;
  }
  return pg;
}

inline std::vector<PreparedGraph> prepare_dataset(const GraphDataset& d, FeatureMode mode) {
  std::vector<PreparedGraph> out;
  out.reserve(d.graphs.size());
  for (const Graph& g : d.graphs) out.push_back(prepare_graph(g, mode));
  return out;
}

/// Degree filter for the ph_only readout, scaled into [0,1] by the dataset
/// max degree.
inline std::vector<double> frozen_degree_filter(const Graph& g, std::uint32_t max_degree) {
  std::vector<double> f(g.num_vertices);
  auto degs = g.degrees();
  double scale = static_cast<double>(std::max(1u, max_degree));
  for (std::uint32_t vtx = 0; vtx < g.num_vertices; ++vtx)
    f[vtx] = static_cast<double>(std::min(degs[vtx], max_degree)) / scale;
  return f;
}

/// Recorded forward computation: per-layer activations, per-graph barcodes
/// with their vertex attributions, and the readout — everything backward
/// needs for exact reverse-mode gradients.
struct Tape {
  Mode mode = Mode::eval;
  std::vector<std::uint32_t> node_offset;  // size B+1
  Matrix emb_out;
  Matrix mlp_in;
  BatchNormCache gin_bn_cache;
  Matrix gin_bn_out;
  Matrix gin_act_out;
  Matrix node_repr;
  BatchNormCache flt_bn_cache;
  Matrix flt_bn_out;
  Matrix flt_act_out;
  Vector flt_pre_sig;
  std::vector<double> filter;  // per node, (0,1) or [0,1] for ph_only
  std::vector<BarcodeSet> barcodes;
  Matrix readout;
  Matrix clf_fc1_out;
  Matrix clf_act;
  Matrix logits;
};

namespace detail {

/// Embedding + (optional) GIN-eps aggregation + inner MLP. Fills tape up to
/// node_repr; for gfl continues through the filter head into tape.filter.
inline void filter_stage(ModelParams& params, std::span<const PreparedGraph* const> batch,
                         Mode mode, bool update_running, Tape& tape) {
  const ModelConfig& cfg = params.cfg;
  const std::uint32_t h = cfg.hidden;
  const bool train = mode == Mode::train;

  tape.mode = mode;
  tape.node_offset.assign(1, 0);
  for (const PreparedGraph* pg : batch)
    tape.node_offset.push_back(tape.node_offset.back() + pg->graph->num_vertices);
  const std::uint32_t total = tape.node_offset.back();

  if (cfg.readout == Readout::ph_only) {
    tape.filter.clear();
    tape.filter.reserve(total);
    for (const PreparedGraph* pg : batch) {
      auto f = frozen_degree_filter(*pg->graph, cfg.max_degree);
      tape.filter.insert(tape.filter.end(), f.begin(), f.end());
    }
    return;
  }

  tape.emb_out = Matrix::Zero(total, h);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const PreparedGraph& pg = *batch[b];
    auto rows = tape.emb_out.middleRows(tape.node_offset[b], pg.graph->num_vertices);
    Matrix block = Matrix::Zero(pg.graph->num_vertices, h);
    embedding_forward(params.emb_primary, pg.features.primary, block);
    if (pg.features.has_label()) {
      if (params.emb_label.table.rows() == 0) throw ConfigError("model has no label embedding");
      embedding_forward(params.emb_label, pg.features.label, block);
    }
    rows = block;
  }

  if (cfg.uses_aggregation()) {
    tape.mlp_in = (1.0 + params.gin_eps) * tape.emb_out;
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const PreparedGraph& pg = *batch[b];
      const std::uint32_t off = tape.node_offset[b];
      for (std::uint32_t vtx = 0; vtx < pg.graph->num_vertices; ++vtx)
        for (std::uint32_t k = pg.adj_offsets[vtx]; k < pg.adj_offsets[vtx + 1]; ++k)
          tape.mlp_in.row(off + vtx) += tape.emb_out.row(off + pg.adj[k]);
    }
  } else {
    tape.mlp_in = tape.emb_out;
  }

  Matrix fc1 = linear_forward(params.gin_fc1, tape.mlp_in);
  tape.gin_bn_out = batchnorm_forward(params.gin_bn, fc1, train, update_running, tape.gin_bn_cache);
  tape.gin_act_out = leaky_relu_forward(tape.gin_bn_out);
  tape.node_repr = linear_forward(params.gin_fc2, tape.gin_act_out);

  if (cfg.readout != Readout::gfl) return;

  Matrix ffc1 = linear_forward(params.flt_fc1, tape.node_repr);
  tape.flt_bn_out =
      batchnorm_forward(params.flt_bn, ffc1, train, update_running, tape.flt_bn_cache);
  tape.flt_act_out = leaky_relu_forward(tape.flt_bn_out);
  tape.flt_pre_sig = linear_forward(params.flt_fc2, tape.flt_act_out).col(0);
  Vector f = sigmoid_forward(tape.flt_pre_sig);
  tape.filter.assign(f.data(), f.data() + f.size());
}

/// Sub+superlevel persistence readout of one graph's filter values.
inline BarcodeSet persistence_readout(const Graph& g, std::span<const double> f) {
  RawBarcodes sub = persistence_union_find(build_sublevel_filtration(g, f));
  std::vector<double> neg = negate_filter(f);
  RawBarcodes sup = persistence_union_find(build_sublevel_filtration(g, neg));
  return assemble_processed_barcodes(sub, sup);
}

}  // namespace detail

inline Tape forward_batch(ModelParams& params, std::span<const PreparedGraph* const> batch,
                          Mode mode, bool update_running = true) {
  const ModelConfig& cfg = params.cfg;
  Tape tape;
  detail::filter_stage(params, batch, mode, update_running, tape);

  const auto bsize = static_cast<Eigen::Index>(batch.size());
  tape.readout = Matrix::Zero(bsize, cfg.readout_dim());
  if (cfg.uses_persistence()) {
    tape.barcodes.resize(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const Graph& g = *batch[b]->graph;
      std::span<const double> f(tape.filter.data() + tape.node_offset[b], g.num_vertices);
      tape.barcodes[b] = detail::persistence_readout(g, f);
      auto out = vectorize(tape.barcodes[b], params.vec);
      tape.readout.row(static_cast<Eigen::Index>(b)) =
          Eigen::Map<const Eigen::RowVectorXd>(out.data(), kReadoutDim);
    }
  } else {
    for (std::size_t b = 0; b < batch.size(); ++b)
      tape.readout.row(static_cast<Eigen::Index>(b)) =
          tape.node_repr
              .middleRows(tape.node_offset[b], batch[b]->graph->num_vertices)
              .colwise()
              .sum();
  }

  tape.clf_fc1_out = linear_forward(params.clf_fc1, tape.readout);
  tape.clf_act = relu_forward(tape.clf_fc1_out);
  tape.logits = linear_forward(params.clf_fc2, tape.clf_act);
  return tape;
}

/// Reverse pass; accumulates into `grads` (a zeros_like(params) holder).
inline void backward_batch(const ModelParams& params,
                           std::span<const PreparedGraph* const> batch, const Tape& tape,
                           const Matrix& dlogits, ModelParams& grads) {
  const ModelConfig& cfg = params.cfg;
  const std::uint32_t total = tape.node_offset.back();

  Matrix dclf_act = linear_backward(params.clf_fc2, tape.clf_act, dlogits, grads.clf_fc2);
  Matrix dclf_fc1 = relu_backward(tape.clf_fc1_out, dclf_act);
  Matrix dreadout = linear_backward(params.clf_fc1, tape.readout, dclf_fc1, grads.clf_fc1);

  Vector dfilter;
  Matrix dnode_repr;
  if (cfg.uses_persistence()) dfilter = Vector::Zero(total);
  if (cfg.uses_node_net()) dnode_repr = Matrix::Zero(total, cfg.hidden);

  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto row = static_cast<Eigen::Index>(b);
    const std::uint32_t off = tape.node_offset[b];
    const std::uint32_t n = batch[b]->graph->num_vertices;
    if (cfg.uses_persistence()) {
      Eigen::RowVectorXd drow = dreadout.row(row);
      vectorize_backward(tape.barcodes[b], params.vec,
                         std::span<const double>(drow.data(), kReadoutDim),
                         std::span<double>(dfilter.data() + off, n), grads.vec);
    } else {
      dnode_repr.middleRows(off, n).rowwise() += dreadout.row(row);
    }
  }

  if (cfg.readout == Readout::ph_only) return;  // frozen filter: nothing upstream

  if (cfg.readout == Readout::gfl) {
    // sigmoid
    Vector f = Eigen::Map<const Vector>(tape.filter.data(), total);
    Vector dpre = dfilter.array() * f.array() * (1.0 - f.array());
    Matrix dflt_act =
        linear_backward(params.flt_fc2, tape.flt_act_out, Matrix(dpre), grads.flt_fc2);
    Matrix dflt_bn = leaky_relu_backward(tape.flt_bn_out, dflt_act);
    Matrix dflt_fc1 = batchnorm_backward(params.flt_bn, tape.flt_bn_cache, dflt_bn, grads.flt_bn);
    dnode_repr += linear_backward(params.flt_fc1, tape.node_repr, dflt_fc1, grads.flt_fc1);
  }

  Matrix dgin_act = linear_backward(params.gin_fc2, tape.gin_act_out, dnode_repr, grads.gin_fc2);
  Matrix dgin_bn = leaky_relu_backward(tape.gin_bn_out, dgin_act);
  Matrix dgin_fc1 = batchnorm_backward(params.gin_bn, tape.gin_bn_cache, dgin_bn, grads.gin_bn);
  Matrix dmlp_in = linear_backward(params.gin_fc1, tape.mlp_in, dgin_fc1, grads.gin_fc1);

  Matrix demb;
  if (cfg.uses_aggregation()) {
    grads.gin_eps += (tape.emb_out.array() * dmlp_in.array()).sum();
    demb = (1.0 + params.gin_eps) * dmlp_in;
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const PreparedGraph& pg = *batch[b];
      const std::uint32_t off = tape.node_offset[b];
      for (std::uint32_t vtx = 0; vtx < pg.graph->num_vertices; ++vtx)
        for (std::uint32_t k = pg.adj_offsets[vtx]; k < pg.adj_offsets[vtx + 1]; ++k)
          demb.row(off + pg.adj[k]) += dmlp_in.row(off + vtx);
    }
  } else {
    demb = dmlp_in;
  }

  for (std::size_t b = 0; b < batch.size(); ++b) {
    const PreparedGraph& pg = *batch[b];
    Matrix block = demb.middleRows(tape.node_offset[b], pg.graph->num_vertices);
    embedding_backward(params.emb_primary, pg.features.primary, block, grads.emb_primary);
    if (pg.features.has_label())
      embedding_backward(params.emb_label, pg.features.label, block, grads.emb_label);
  }
}

/// Per-vertex filter values of one graph plus the tape that produced them.
inline std::pair<std::vector<double>, Tape> vertex_filter_forward(ModelParams& params,
                                                                  const PreparedGraph& pg,
                                                                  Mode mode,
                                                                  bool update_running = true) {
  Tape tape;
  const PreparedGraph* ptr = &pg;
  detail::filter_stage(params, {&ptr, 1}, mode, update_running, tape);
  return {tape.filter, std::move(tape)};
}

inline Tape full_forward(ModelParams& params, const PreparedGraph& pg, Mode mode,
                         bool update_running = true) {
  const PreparedGraph* ptr = &pg;
  return forward_batch(params, {&ptr, 1}, mode, update_running);
}

/// The structure-agnostic deep-sets baseline: same forward with readout
/// `baseline` (per-vertex MLP, no message passing, sum pooling).
inline Tape baseline_forward(ModelParams& params, const PreparedGraph& pg, Mode mode) {
  if (params.cfg.readout != Readout::baseline)
    throw ConfigError("baseline_forward requires a baseline-configured model");
  return full_forward(params, pg, mode);
}

/// One round of GIN message passing followed by sum pooling.
inline Tape sum_readout_forward(ModelParams& params, const PreparedGraph& pg, Mode mode) {
  if (params.cfg.readout != Readout::sum)
    throw ConfigError("sum_readout_forward requires a sum-configured model");
  return full_forward(params, pg, mode);
}

}  // namespace gfl
