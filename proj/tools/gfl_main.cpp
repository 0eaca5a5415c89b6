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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gfl/gfl.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed,
              bool deterministic, const std::string& dump_dir, const std::string& out_path) {
  gfl::TrainConfig cfg = gfl::parse_config_file(config_path);
  if (seed) {
    cfg.seed = *seed;
    if (cfg.synth) cfg.synth->seed = *seed;
  }
  cfg.deterministic = deterministic;
  cfg.dump_dir = dump_dir;

  gfl::GraphDataset dataset = gfl::load_dataset(cfg);
  std::printf("dataset: %zu graphs, %u classes, max degree %u\n", dataset.graphs.size(),
              dataset.num_classes, dataset.max_degree);

  gfl::RunMetrics rm = gfl::run_cv(cfg, dataset);
  for (std::size_t f = 0; f < rm.fold_accuracy.size(); ++f)
    std::printf("fold %2zu: accuracy %.4f\n", f, rm.fold_accuracy[f]);
  std::printf("mean accuracy %.4f +- %.4f  (%.1fs)\n", rm.mean_accuracy, rm.std_accuracy,
              rm.total_seconds);

  if (!out_path.empty()) {
    std::ofstream os(out_path);
    if (!os) throw gfl::Error("cannot write metrics to " + out_path);
    gfl::write_metrics_json(rm, os);
  }
  return 0;
}

int cmd_bench(const std::string& dataset_dir, std::uint32_t repeats, const std::string& out_path,
              std::uint64_t seed) {
  gfl::GraphDataset dataset = gfl::load_tu_dataset(dataset_dir);
  auto rows = gfl::timing_benchmark(dataset, repeats, seed);
  if (out_path.empty()) {
    gfl::write_timings_csv(rows, std::cout);
  } else {
    std::ofstream os(out_path);
    if (!os) throw gfl::Error("cannot write timings to " + out_path);
    gfl::write_timings_csv(rows, os);
    std::printf("wrote %zu timings to %s\n", rows.size(), out_path.c_str());
  }
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
  gfl::SynthSpec spec = gfl::parse_synth_spec_file(spec_path);
  gfl::GraphDataset dataset = gfl::generate_synthetic(spec);
  fs::path dir(out_dir);
  std::string name = dir.filename().string();
  if (name.empty()) name = "SYNTH";
  gfl::write_tu_dataset(dataset, dir, name);
  std::printf("wrote %zu graphs (%u classes) to %s\n", dataset.graphs.size(),
              dataset.num_classes, out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph classification with a learnable persistent-homology readout"};
  app.require_subcommand(1);

  std::string config_path, dump_dir, out_path;
  std::optional<std::uint64_t> seed_override;
  bool deterministic = false;
  auto* train = app.add_subcommand("train", "run k-fold cross-validated training");
  train->add_option("--config", config_path, "key=value config file")->required();
  train->add_option("--seed", seed_override, "override the config seed");
  train->add_flag("--deterministic", deterministic, "single-threaded fold execution");
  train->add_option("--dump-barcodes", dump_dir, "dump test-fold barcodes into this directory");
  train->add_option("--out", out_path, "write metrics JSON here");

  std::string bench_dataset, bench_out;
  std::uint32_t bench_repeats = 5;
  std::uint64_t bench_seed = 0;
  auto* bench = app.add_subcommand("bench", "time the persistence forward pass per graph");
  bench->add_option("--dataset", bench_dataset, "TU dataset directory")->required();
  bench->add_option("--repeats", bench_repeats, "timing repetitions per graph");
  bench->add_option("--out", bench_out, "write m,seconds CSV here");
  bench->add_option("--seed", bench_seed, "filter-value seed");

  std::string synth_spec, synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset in TU format");
  synth->add_option("--spec", synth_spec, "synth spec file")->required();
  synth->add_option("--out", synth_out, "output dataset directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed())
      return cmd_train(config_path, seed_override, deterministic, dump_dir, out_path);
    if (bench->parsed()) return cmd_bench(bench_dataset, bench_repeats, bench_out, bench_seed);
    if (synth->parsed()) return cmd_synth(synth_spec, synth_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
