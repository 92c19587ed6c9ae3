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
#include <string>
#include <vector>

#include "bandsel/cube_io.hpp"

namespace bandsel::synth {

/// localized: infected pixels are attenuated only on planted bands
/// (+/- halfwidth). broad: every band is attenuated by (1 + alpha) / 2 and
/// the planted windows additionally by alpha.
enum class Mode { localized, broad };

struct SynthSpec {
  int n_stems_train = 24;
  int n_stems_test = 12;
  std::uint32_t rows = 500;
  std::uint32_t cols = 1600;
  std::uint32_t n_bands = 240;
  double wavelength_lo = 382.0;
  double wavelength_hi = 1032.0;
  std::vector<int> planted_bands;
  int band_halfwidth = 2;
  double attenuation = 0.7;
  double noise_sd = 0.02;
  Mode mode = Mode::localized;
  /// Interior lesion lengths span this interval; each dai value owns an
  /// equal consecutive slice, so lesions grow with dai.
  double lesion_min_mm = 8.0;
  double lesion_max_mm = 60.0;
  std::vector<int> dai_values{3, 6, 9};
  double scale_mm_per_px = 0.25;
  std::uint64_t seed = 0;
  /// Stems generated concurrently when writing a dataset; 0 = OpenMP default.
  int threads = 0;

  int n_stems() const { return n_stems_train + n_stems_test; }
  std::vector<double> wavelengths() const;
  /// Throws UsageError on an infeasible spec.
  void validate() const;
};

/// Healthy reflectance curve: low visible plateau with a green bump and a
/// logistic red edge centred at 710 nm rising to a near-infrared plateau.
///   r(nm) = 0.08 + 0.04 exp(-((nm - 550) / 35)^2)
///         + 0.40 / (1 + exp(-(nm - 710) / 15))
double base_reflectance(double nm);

/// Multiplier applied to a lesioned pixel at each band.
std::vector<double> infected_factors(const SynthSpec& spec);

/// Manifest rows for every stem (train first, then test). Within each
/// split, stems alternate inoculated/mock and cycle through dai_values.
/// Lesion lengths are whole pixels times the scale.
std::vector<StemRecord> plan_stems(const SynthSpec& spec);

/// Cube for stems[stem_index] of plan_stems(spec). Pixels within the lesion
/// extent of an inoculated stem are attenuated; noise is Gaussian per pixel
/// and band, clamped to [0, 1]. clamped (optional) receives the number of
/// samples that needed clamping.
DataCube generate_cube(const SynthSpec& spec, const StemRecord& record,
                       std::size_t stem_index, std::uint64_t* clamped = nullptr);

struct GenerateResult {
  Manifest manifest;
  std::filesystem::path manifest_path;
  std::uint64_t clamped = 0;
  std::uint64_t samples = 0;
};

/// Writes out_dir/manifest.csv, out_dir/truth.json and out_dir/cubes/*.hsc.
/// Output bytes depend only on the spec. Fails if clamping touched 0.1% or
/// more of all samples.
GenerateResult generate(const SynthSpec& spec,
                        const std::filesystem::path& out_dir);

/// Ground truth for assertions.
struct GroundTruth {
  std::vector<int> planted_bands;
  int band_halfwidth = 0;
  double attenuation = 0.0;
  Mode mode = Mode::localized;
  double noise_sd = 0.0;
  int patch_width = 0;
  std::vector<double> wavelengths;
  std::vector<double> healthy_mean;   // per band, expected pixel mean
  std::vector<double> infected_mean;  // per band, fully lesioned pixel
  /// Expected sd of a patch mean: noise_sd / sqrt(rows * patch_width).
  double patch_mean_sd = 0.0;
};

GroundTruth describe(const SynthSpec& spec, int patch_width = 64);

std::string_view to_string(Mode m);

}  // namespace bandsel::synth
