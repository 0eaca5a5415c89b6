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

#include <cstdint>
#include <vector>

#include "gfl/error.hpp"
#include "gfl/graph.hpp"
#include "gfl/rng.hpp"

namespace gfl {

/// Stratified k-fold split: k disjoint index sets covering the dataset, with
/// per-fold class counts within one of count/k. Deterministic in `seed`.
inline std::vector<std::vector<std::uint32_t>> stratified_folds(const GraphDataset& d,
                                                                std::uint32_t k,
                                                                std::uint64_t seed) {
  if (k < 2) throw ConfigError("stratified_folds: k must be >= 2");
  std::vector<std::vector<std::uint32_t>> by_class(d.num_classes);
  for (std::uint32_t i = 0; i < d.graphs.size(); ++i)
    by_class[d.graphs[i].graph_label].push_back(i);

  std::vector<std::vector<std::uint32_t>> folds(k);
  for (std::uint32_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.size() < k)
      throw StratificationError("class " + std::to_string(c) + " has " +
                                std::to_string(members.size()) + " members, fewer than " +
                                std::to_string(k) + " folds");
    Rng rng(derive_seed(seed, 0xF01D5ULL * (c + 1)));
    rng.shuffle(members);
    // Rotate the fold that takes the remainder so it is not always fold 0.
    auto offset = static_cast<std::uint32_t>(rng.below(k));
    for (std::size_t i = 0; i < members.size(); ++i)
      folds[(i + offset) % k].push_back(members[i]);
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

}  // namespace gfl
