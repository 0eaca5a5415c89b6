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

// Training protocol: ADAM (0.9/0.999/1e-8) with weight decay 1e-6, initial
// learning rate 0.01 halved after every 20th epoch, 100 epochs, no early
// stopping; k-fold stratified cross-validation reporting the final-epoch
// model's test accuracy per fold.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gfl/adam.hpp"
#include "gfl/barcode.hpp"
#include "gfl/error.hpp"
#include "gfl/folds.hpp"
#include "gfl/graph.hpp"
#include "gfl/model.hpp"
#include "gfl/rng.hpp"
#include "gfl/synthetic.hpp"
#include "gfl/tu_format.hpp"

namespace gfl {

struct TrainConfig {
  std::string dataset_dir;          // TU dataset directory, or
  std::optional<SynthSpec> synth;   // a synthetic spec
  Readout readout = Readout::gfl;
  FeatureMode features = FeatureMode::degree;
  std::uint32_t epochs = 100;
  double lr = 0.01;
  std::uint32_t lr_halving_period = 20;
  double weight_decay = 1e-6;
  std::uint32_t batch_size = 64;
  std::uint32_t folds = 10;
  std::uint64_t seed = 0;
  bool deterministic = false;  // serialize fold execution
  std::string dump_dir;        // when set, dump test-fold barcodes here

  void validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(lr > 0)) throw ConfigError("lr must be positive");
    if (folds < 2) throw ConfigError("folds must be >= 2");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (dataset_dir.empty() == !synth.has_value())
      throw ConfigError("exactly one of dataset/synth_* must be configured");
  }
};

inline Readout parse_readout(const std::string& s) {
  if (s == "gfl") return Readout::gfl;
  if (s == "ph_only") return Readout::ph_only;
  if (s == "sum") return Readout::sum;
  if (s == "baseline") return Readout::baseline;
  throw ConfigError("unknown readout: " + s);
}

inline FeatureMode parse_feature_mode(const std::string& s) {
  if (s == "degree") return FeatureMode::degree;
  if (s == "uninformative") return FeatureMode::uninformative;
  if (s == "degree_and_label") return FeatureMode::degree_and_label;
  throw ConfigError("unknown feature mode: " + s);
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// key = value lines, '#' comments, blank lines ignored.
inline std::vector<std::pair<std::string, std::string>> read_kv_file(
    const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
  };
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path.string(), lineno, "expected key = value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

}  // namespace detail

/// Fills a SynthSpec from synth_* keys; used by both the train config and the
/// standalone synth spec file.
inline bool apply_synth_key(SynthSpec& spec, const std::string& key, const std::string& value) {
  if (key == "synth_classes") {
    spec.class_families = detail::split_csv(value);
  } else if (key == "synth_n_per_class") {
    spec.n_per_class = static_cast<std::uint32_t>(std::stoul(value));
  } else if (key == "synth_size_min") {
    spec.size_min = static_cast<std::uint32_t>(std::stoul(value));
  } else if (key == "synth_size_max") {
    spec.size_max = static_cast<std::uint32_t>(std::stoul(value));
  } else if (key == "seed" || key == "synth_seed") {
    spec.seed = std::stoull(value);
  } else {
    return false;
  }
  return true;
}

inline SynthSpec parse_synth_spec_file(const std::filesystem::path& path) {
  SynthSpec spec;
  for (const auto& [key, value] : detail::read_kv_file(path))
    if (!apply_synth_key(spec, key, value))
      throw ConfigError("unknown synth spec key: " + key);
  if (spec.class_families.empty())
    throw ConfigError("synth spec must set synth_classes");
  return spec;
}

inline TrainConfig parse_config_file(const std::filesystem::path& path) {
  TrainConfig cfg;
  SynthSpec synth;
  bool has_synth = false;
  for (const auto& [key, value] : detail::read_kv_file(path)) {
    if (key == "dataset") {
      cfg.dataset_dir = value;
    } else if (key == "readout") {
      cfg.readout = parse_readout(value);
    } else if (key == "features") {
      cfg.features = parse_feature_mode(value);
    } else if (key == "epochs") {
      cfg.epochs = static_cast<std::uint32_t>(std::stoul(value));
    } else if (key == "lr") {
      cfg.lr = std::stod(value);
    } else if (key == "lr_halving_period") {
      cfg.lr_halving_period = static_cast<std::uint32_t>(std::stoul(value));
    } else if (key == "weight_decay") {
      cfg.weight_decay = std::stod(value);
    } else if (key == "batch_size") {
      cfg.batch_size = static_cast<std::uint32_t>(std::stoul(value));
    } else if (key == "folds") {
      cfg.folds = static_cast<std::uint32_t>(std::stoul(value));
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
      synth.seed = cfg.seed;
    } else if (apply_synth_key(synth, key, value)) {
      has_synth = true;
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  if (has_synth) {
    synth.seed = cfg.seed;
    cfg.synth = synth;
  }
  cfg.validate();
  return cfg;
}

inline GraphDataset load_dataset(const TrainConfig& cfg) {
  if (!cfg.dataset_dir.empty()) return load_tu_dataset(cfg.dataset_dir);
  return generate_synthetic(*cfg.synth);
}

struct FoldMetrics {
  double accuracy = 0;
  std::vector<double> epoch_loss;
  double seconds = 0;
};

struct RunMetrics {
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0;
  double std_accuracy = 0;  // population std over folds
  std::vector<std::vector<double>> epoch_loss;
  double total_seconds = 0;
};

/// Per-graph eval-mode accuracy; argmax ties resolve to the smaller class.
inline double evaluate_accuracy(ModelParams& params,
                                const std::vector<PreparedGraph>& prepared,
                                const std::vector<std::uint32_t>& indices) {
  if (indices.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::uint32_t idx : indices) {
    Tape tape = full_forward(params, prepared[idx], Mode::eval, false);
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < tape.logits.cols(); ++c)
      if (tape.logits(0, c) > tape.logits(0, best)) best = c;
    if (static_cast<std::uint32_t>(best) == prepared[idx].graph->graph_label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

inline FoldMetrics train_fold(const TrainConfig& cfg, const GraphDataset& dataset,
                              const std::vector<PreparedGraph>& prepared,
                              const std::vector<std::vector<std::uint32_t>>& folds,
                              std::uint32_t fold_index) {
  auto t0 = std::chrono::steady_clock::now();
  const auto& test_indices = folds.at(fold_index);
  std::vector<std::uint32_t> train_indices;
  for (std::uint32_t f = 0; f < folds.size(); ++f)
    if (f != fold_index) train_indices.insert(train_indices.end(), folds[f].begin(), folds[f].end());
  std::sort(train_indices.begin(), train_indices.end());

  ModelConfig mcfg = ModelConfig::for_dataset(dataset, cfg.readout, cfg.features);
  Rng init_rng(derive_seed(cfg.seed, 0x1417u + fold_index));
  ModelParams params = ModelParams::init(mcfg, init_rng);
  Adam adam(params, AdamConfig{cfg.lr, cfg.lr_halving_period, 0.9, 0.999, 1e-8,
                               cfg.weight_decay});

  FoldMetrics metrics;
  metrics.epoch_loss.reserve(cfg.epochs);
  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_for_epoch(cfg.lr, epoch, cfg.lr_halving_period);
    Rng shuffle_rng(derive_seed(derive_seed(cfg.seed, 0x5AFEu + fold_index), epoch));
    std::vector<std::uint32_t> order = train_indices;
    shuffle_rng.shuffle(order);

    double loss_sum = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t size = std::min<std::size_t>(cfg.batch_size, order.size() - start);
      std::vector<const PreparedGraph*> batch(size);
      std::vector<std::uint32_t> labels(size);
      for (std::size_t i = 0; i < size; ++i) {
        batch[i] = &prepared[order[start + i]];
        labels[i] = prepared[order[start + i]].graph->graph_label;
      }
      Tape tape = forward_batch(params, batch, Mode::train);
      Matrix dlogits;
      double loss = softmax_cross_entropy(tape.logits, labels, dlogits);
      if (!std::isfinite(loss))
        throw NumericError("divergent loss at fold " + std::to_string(fold_index) + " epoch " +
                           std::to_string(epoch) + " batch " + std::to_string(start / cfg.batch_size));
      loss_sum += loss * static_cast<double>(size);
      ModelParams grads = ModelParams::zeros_like(params);
      backward_batch(params, batch, tape, dlogits, grads);
      adam.step(params, grads, lr);
    }
    metrics.epoch_loss.push_back(loss_sum / static_cast<double>(order.size()));
  }

  metrics.accuracy = evaluate_accuracy(params, prepared, test_indices);

  if (!cfg.dump_dir.empty() && mcfg.uses_persistence()) {
    namespace fs = std::filesystem;
    fs::path dir = fs::path(cfg.dump_dir) / ("fold" + std::to_string(fold_index));
    fs::create_directories(dir);
    for (std::uint32_t idx : test_indices) {
      Tape tape = full_forward(params, prepared[idx], Mode::eval, false);
      std::ofstream os(dir / ("graph_" + std::to_string(idx) + ".txt"));
      write_barcodes(os, tape.barcodes[0]);
    }
  }

  metrics.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return metrics;
}

inline RunMetrics run_cv(const TrainConfig& cfg, const GraphDataset& dataset) {
  cfg.validate();
  auto t0 = std::chrono::steady_clock::now();
  auto prepared = prepare_dataset(dataset, cfg.features);
  auto folds = stratified_folds(dataset, cfg.folds, derive_seed(cfg.seed, 0xF01D5u));

  std::vector<FoldMetrics> per_fold(cfg.folds);
  unsigned workers = cfg.deterministic
                         ? 1u
                         : std::max(1u, std::min(cfg.folds, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::uint32_t f = 0; f < cfg.folds; ++f)
      per_fold[f] = train_fold(cfg, dataset, prepared, folds, f);
  } else {
    // folds are independent; results land in fold order either way
    std::vector<std::thread> pool;
    std::atomic<std::uint32_t> next{0};
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        while (true) {
          std::uint32_t f = next.fetch_add(1);
          if (f >= cfg.folds) return;
          per_fold[f] = train_fold(cfg, dataset, prepared, folds, f);
        }
      });
    for (auto& t : pool) t.join();
  }

  RunMetrics rm;
  for (const FoldMetrics& fm : per_fold) {
    rm.fold_accuracy.push_back(fm.accuracy);
    rm.epoch_loss.push_back(fm.epoch_loss);
  }
  double sum = 0;
  for (double a : rm.fold_accuracy) sum += a;
  rm.mean_accuracy = sum / static_cast<double>(cfg.folds);
  double sq = 0;
  for (double a : rm.fold_accuracy) sq += (a - rm.mean_accuracy) * (a - rm.mean_accuracy);
  rm.std_accuracy = std::sqrt(sq / static_cast<double>(cfg.folds));
  rm.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rm;
}

inline void write_metrics_json(const RunMetrics& rm, std::ostream& os) {
  nlohmann::json j;
  j["per_fold_accuracy"] = rm.fold_accuracy;
  j["mean_accuracy"] = rm.mean_accuracy;
  j["std_accuracy"] = rm.std_accuracy;
  j["per_epoch_loss"] = rm.epoch_loss;
  j["total_seconds"] = rm.total_seconds;
  os << j.dump(2) << "\n";
}

struct TimingRow {
  std::uint64_t simplices = 0;  // m = |V| + |E|
  double seconds = 0;
};

/// Wall time of the union-find persistence forward (sub- and superlevel
/// filtration build plus both barcode computations) per graph, best of
/// `repeats` runs, against the simplex count m.
inline std::vector<TimingRow> timing_benchmark(const GraphDataset& dataset,
                                               std::uint32_t repeats, std::uint64_t seed = 0) {
  std::vector<TimingRow> rows;
  rows.reserve(dataset.graphs.size());
  for (std::size_t gi = 0; gi < dataset.graphs.size(); ++gi) {
    const Graph& g = dataset.graphs[gi];
    Rng rng(derive_seed(seed, gi));
    std::vector<double> f(g.num_vertices);
    for (double& x : f) x = rng.uniform01();
    std::vector<double> neg = negate_filter(f);

    double best = std::numeric_limits<double>::infinity();
    volatile std::size_t sink = 0;  // keep the computation alive
    for (std::uint32_t r = 0; r <= repeats; ++r) {
      auto t0 = std::chrono::steady_clock::now();
      RawBarcodes sub = persistence_union_find(build_sublevel_filtration(g, f));
      RawBarcodes sup = persistence_union_find(build_sublevel_filtration(g, neg));
      double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      sink = sink + sub.b0_finite.size() + sup.b0_finite.size();
      if (r > 0) best = std::min(best, dt);  // first run warms caches
    }
    rows.push_back({g.num_vertices + g.edges.size(), best});
  }
  return rows;
}

inline void write_timings_csv(const std::vector<TimingRow>& rows, std::ostream& os) {
  os << "m,seconds\n";
  os.precision(12);
  for (const TimingRow& r : rows) os << r.simplices << "," << r.seconds << "\n";
}

}  // namespace gfl
