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

// Checkpoint byte layout (little-endian):
//   bytes 0..7   magic "GFLCKPT1"
//   u32          section count
//   per section: u16 name length, name bytes, u64 value count
//   payload:     the sections' float64 values, concatenated in header order
//
// Sections are the named parameter arrays of param_views(), model weights and
// vectorization elements alike, running statistics included.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gfl/error.hpp"
#include "gfl/model.hpp"

namespace gfl {

inline constexpr char kCheckpointMagic[8] = {'G', 'F', 'L', 'C', 'K', 'P', 'T', '1'};

inline void save_checkpoint(const std::filesystem::path& path, ModelParams& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open checkpoint for writing: " + path.string());
  auto views = param_views(params);
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  auto w32 = [&](std::uint32_t x) { os.write(reinterpret_cast<const char*>(&x), 4); };
  auto w64 = [&](std::uint64_t x) { os.write(reinterpret_cast<const char*>(&x), 8); };
  w32(static_cast<std::uint32_t>(views.size()));
  for (const ParamView& v : views) {
    auto len = static_cast<std::uint16_t>(std::strlen(v.name));
    os.write(reinterpret_cast<const char*>(&len), 2);
    os.write(v.name, len);
    w64(v.size);
  }
  for (const ParamView& v : views)
    os.write(reinterpret_cast<const char*>(v.data),
             static_cast<std::streamsize>(v.size * sizeof(double)));
  if (!os) throw Error("checkpoint write failed: " + path.string());
}

/// Loads into an already-shaped model; section names and sizes must match.
inline void load_checkpoint(const std::filesystem::path& path, ModelParams& params) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open checkpoint: " + path.string());
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw Error("not a checkpoint file: " + path.string());
  std::uint32_t count = 0;
  is.read(reinterpret_cast<char*>(&count), 4);

  auto views = param_views(params);
  if (count != views.size())
    throw Error("checkpoint has " + std::to_string(count) + " sections, model expects " +
                std::to_string(views.size()));
  std::vector<std::uint64_t> sizes(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint16_t len = 0;
    is.read(reinterpret_cast<char*>(&len), 2);
    std::string name(len, '\0');
    is.read(name.data(), len);
    is.read(reinterpret_cast<char*>(&sizes[i]), 8);
    if (name != views[i].name)
      throw Error("checkpoint section '" + name + "' does not match model section '" +
                  views[i].name + "'");
    if (sizes[i] != views[i].size)
      throw Error("checkpoint section '" + name + "' has " + std::to_string(sizes[i]) +
                  " values, model expects " + std::to_string(views[i].size));
  }
  for (std::uint32_t i = 0; i < count; ++i)
    is.read(reinterpret_cast<char*>(views[i].data),
            static_cast<std::streamsize>(sizes[i] * sizeof(double)));
  if (!is) throw Error("checkpoint truncated: " + path.string());
}

}  // namespace gfl
