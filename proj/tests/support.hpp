// Copyright 2026 The bandsel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <system_error>

#include "bandsel/pipeline.hpp"
#include "bandsel/synth.hpp"

namespace bandsel::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    const auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 100; ++attempt) {
      path_ = base / ("bandsel_test_" + std::to_string(rd()) + "_" +
                      std::to_string(attempt));
      if (std::filesystem::create_directory(path_)) return;
    }
    throw std::runtime_error("cannot create temp dir");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

// Small localized spec: 60 bands, RGB nearest at 8, 15, 25.
inline synth::SynthSpec small_spec(std::uint64_t seed = 1) {
  synth::SynthSpec s;
  s.n_stems_train = 12;
  s.n_stems_test = 6;
  s.rows = 8;
  s.cols = 256;
  s.n_bands = 60;
  s.planted_bands = {35, 45, 55};
  s.seed = seed;
  return s;
}

// Desk-scale localized spec with the default planted bands.
inline synth::SynthSpec desk_spec(std::uint64_t seed, int n_train = 24,
                                  int n_test = 12) {
  synth::SynthSpec s;
  s.n_stems_train = n_train;
  s.n_stems_test = n_test;
  s.rows = 100;
  s.cols = 320;
  s.planted_bands = {40, 120, 200};
  s.seed = seed;
  return s;
}

inline Manifest planned_manifest(const synth::SynthSpec& spec) {
  Manifest m;
  m.records = synth::plan_stems(spec);
  m.scale_mm_per_px = spec.scale_mm_per_px;
  return m;
}

// Generates cubes on demand instead of round-tripping through files.
inline CubeLoader synth_loader(const synth::SynthSpec& spec,
                               const Manifest& manifest) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    index[manifest.records[i].stem_id] = i;
  }
  return [spec, index](const StemRecord& r) {
    return synth::generate_cube(spec, r, index.at(r.stem_id));
  };
}

inline Dataset synth_dataset(const synth::SynthSpec& spec, int patch_width = 64,
                             const FeatureOptions& options = {}) {
  const Manifest m = planned_manifest(spec);
  return load_dataset(m, patch_width, options, synth_loader(spec, m));
}

}  // namespace bandsel::testing
