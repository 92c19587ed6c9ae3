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

#include "bandsel/synth.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>

#include "bandsel/common.hpp"
#include "bandsel/features.hpp"
#include "bandsel/rng.hpp"
#include "bandsel/serialize.hpp"

namespace bandsel::synth {
namespace {

constexpr std::array<const char*, 4> kGenotypes{"Pharaoh", "PI479719",
                                                "DT97-4290", "PI189958"};

bool in_planted_window(const SynthSpec& spec, int band) {
  return std::any_of(spec.planted_bands.begin(), spec.planted_bands.end(),
                     [&](int p) { return std::abs(band - p) <= spec.band_halfwidth; });
}

// Separate streams for lesion sampling and pixel noise of each stem.
std::uint64_t lesion_seed(const SynthSpec& s, std::size_t i) {
  return derive_seed(s.seed, 2 * i);
}
std::uint64_t pixel_seed(const SynthSpec& s, std::size_t i) {
  return derive_seed(s.seed, 2 * i + 1);
}

}  // namespace

std::string_view to_string(Mode m) {
  return m == Mode::localized ? "localized" : "broad";
}

std::vector<double> SynthSpec::wavelengths() const {
  return linear_wavelengths(wavelength_lo, wavelength_hi, n_bands);
}

void SynthSpec::validate() const {
  if (n_stems_train < 0 || n_stems_test < 0 || n_stems() < 1) {
    throw UsageError("need at least one stem");
  }
  if (rows < 1 || cols < 1 || n_bands < 1) {
    throw UsageError("cube dimensions must be positive");
  }
  if (!(wavelength_hi > wavelength_lo) && n_bands > 1) {
    throw UsageError("wavelength range must be increasing");
  }
  if (band_halfwidth < 0) throw UsageError("band halfwidth must be >= 0");
  for (int p : planted_bands) {
    if (p < 0 || p >= static_cast<int>(n_bands)) {
      throw UsageError("planted band " + std::to_string(p) + " out of range");
    }
  }
  if (mode == Mode::localized) {
    if (planted_bands.empty()) {
      throw UsageError("localized mode needs planted bands");
    }
    const auto axis = wavelengths();
    for (double target : kRgbTargets) {
      if (target < axis.front() || target > axis.back()) continue;
      const int rgb = nearest_band(axis, target);
      if (in_planted_window(*this, rgb)) {
        throw UsageError("planted band window overlaps RGB band " +
                         std::to_string(rgb));
      }
    }
  }
  if (!(attenuation > 0.0 && attenuation <= 1.0)) {
    throw UsageError("attenuation must be in (0, 1]");
  }
  if (!(noise_sd >= 0.0)) throw UsageError("noise sd must be >= 0");
  if (!(lesion_min_mm >= 0.0 && lesion_max_mm >= lesion_min_mm)) {
    throw UsageError("lesion range must satisfy 0 <= min <= max");
  }
  if (dai_values.empty()) throw UsageError("need at least one dai value");
  for (int d : dai_values) {
    if (d < 0) throw UsageError("dai values must be >= 0");
  }
  if (!(scale_mm_per_px > 0.0)) throw UsageError("scale must be > 0");
  if (threads < 0) throw UsageError("threads must be >= 0");
}

double base_reflectance(double nm) {
  const double green = (nm - 550.0) / 35.0;
  return 0.08 + 0.04 * std::exp(-green * green) +
         0.40 / (1.0 + std::exp(-(nm - 710.0) / 15.0));
}

std::vector<double> infected_factors(const SynthSpec& spec) {
  std::vector<double> f(spec.n_bands, 1.0);
  const double broad = 0.5 * (1.0 + spec.attenuation);
  for (std::uint32_t b = 0; b < spec.n_bands; ++b) {
    const bool planted = in_planted_window(spec, static_cast<int>(b));
    if (spec.mode == Mode::broad) {
      f[b] = planted ? broad * spec.attenuation : broad;
    } else if (planted) {
      f[b] = spec.attenuation;
    }
  }
  return f;
}

std::vector<StemRecord> plan_stems(const SynthSpec& spec) {
  spec.validate();
  std::vector<StemRecord> out;
  const std::size_t n_dai = spec.dai_values.size();
  for (int s = 0; s < spec.n_stems(); ++s) {
    const auto i = static_cast<std::size_t>(s);
    const bool train = s < spec.n_stems_train;
    const auto j = static_cast<std::size_t>(train ? s : s - spec.n_stems_train);
    StemRecord r;
    char id[32];
    std::snprintf(id, sizeof(id), "stem_%03d", s);
    r.stem_id = id;
    r.cube_path = "cubes/" + r.stem_id + ".hsc";
    r.genotype = kGenotypes[(j / 2) % kGenotypes.size()];
    r.treatment = j % 2 == 0 ? Treatment::inoculated : Treatment::mock;
    const std::size_t dai_slot = (j / 2) % n_dai;
    r.dai = spec.dai_values[dai_slot];
    r.replication = static_cast<int>(1 + (j / (2 * n_dai)) % 4);
    r.split = train ? Split::train : Split::test;
    r.inoculation_end = (j / (2 * n_dai)) % 2 == 0 ? InoculationEnd::low_col
                                                    : InoculationEnd::high_col;
    if (r.treatment == Treatment::inoculated) {
      Rng rng(lesion_seed(spec, i));
      const double width = (spec.lesion_max_mm - spec.lesion_min_mm) /
                           static_cast<double>(n_dai);
      const double lo = spec.lesion_min_mm + width * static_cast<double>(dai_slot);
      const double mm = lo + width * uniform01(rng);
      const double px = std::round(mm / spec.scale_mm_per_px);
      r.interior_mm = px * spec.scale_mm_per_px;
      r.exterior_mm = std::round(*r.interior_mm * 11.0) / 10.0;
      r.dead_mm = std::round(*r.interior_mm * 6.0) / 10.0;
    }
    out.push_back(std::move(r));
  }
  return out;
}

DataCube generate_cube(const SynthSpec& spec, const StemRecord& record,
                       std::size_t stem_index, std::uint64_t* clamped) {
  DataCube cube;
  cube.rows = spec.rows;
  cube.cols = spec.cols;
  cube.n_bands = spec.n_bands;
  cube.wavelengths = spec.wavelengths();
  std::vector<double> healthy(spec.n_bands);
  for (std::uint32_t b = 0; b < spec.n_bands; ++b) {
    healthy[b] = base_reflectance(cube.wavelengths[b]);
  }
  std::vector<double> lesioned = infected_factors(spec);
  for (std::uint32_t b = 0; b < spec.n_bands; ++b) lesioned[b] *= healthy[b];

  std::int64_t lesion_px = 0;
  if (record.treatment == Treatment::inoculated) {
    lesion_px = static_cast<std::int64_t>(
        std::llround(record.interior_or_zero() / spec.scale_mm_per_px));
  }
  Rng rng(pixel_seed(spec, stem_index));
  std::uint64_t n_clamped = 0;
  cube.reflectance.resize(std::size_t{spec.rows} * spec.cols * spec.n_bands);
  float* out = cube.reflectance.data();
  for (std::uint32_t r = 0; r < spec.rows; ++r) {
    for (std::uint32_t c = 0; c < spec.cols; ++c) {
      const std::int64_t dist =
          record.inoculation_end == InoculationEnd::low_col
              ? c
              : static_cast<std::int64_t>(spec.cols) - 1 - c;
      const auto& mean = dist < lesion_px ? lesioned : healthy;
      for (std::uint32_t b = 0; b < spec.n_bands; ++b) {
        double v = mean[b];
        if (spec.noise_sd > 0.0) v += spec.noise_sd * standard_normal(rng);
        if (v < 0.0 || v > 1.0) {
          v = std::clamp(v, 0.0, 1.0);
          ++n_clamped;
        }
        *out++ = static_cast<float>(v);
      }
    }
  }
  if (clamped) *clamped = n_clamped;
  return cube;
}

GenerateResult generate(const SynthSpec& spec,
                        const std::filesystem::path& out_dir) {
  spec.validate();
  GenerateResult result;
  result.manifest.records = plan_stems(spec);
  result.manifest.scale_mm_per_px = spec.scale_mm_per_px;
  result.manifest.base_dir = out_dir;
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "cubes", ec);
  if (ec) {
    throw Error("cannot create " + (out_dir / "cubes").string() + ": " +
                ec.message());
  }

  const auto& records = result.manifest.records;
  const auto n = static_cast<std::ptrdiff_t>(records.size());
  std::vector<std::uint64_t> clamped(records.size(), 0);
  std::exception_ptr failure;
  const int threads = spec.threads > 0 ? spec.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto idx = static_cast<std::size_t>(i);
      const DataCube cube = generate_cube(spec, records[idx], idx, &clamped[idx]);
      write_cube(cube, result.manifest.cube_file(records[idx]));
    } catch (...) {
#pragma omp critical(bandsel_synth_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (auto c : clamped) result.clamped += c;
  result.samples = std::uint64_t{spec.rows} * spec.cols * spec.n_bands *
                   records.size();
  if (result.clamped * 1000 >= result.samples) {
    throw Error("clamping touched " + std::to_string(result.clamped) + " of " +
                std::to_string(result.samples) +
                " samples (>= 0.1%); lower the noise");
  }
  result.manifest_path = out_dir / "manifest.csv";
  write_manifest(result.manifest, result.manifest_path);
  std::ofstream truth(out_dir / "truth.json", std::ios::trunc);
  if (!truth) throw Error("cannot write " + (out_dir / "truth.json").string());
  truth << to_json(describe(spec)).dump(2) << '\n';
  return result;
}

GroundTruth describe(const SynthSpec& spec, int patch_width) {
  GroundTruth t;
  t.planted_bands = spec.planted_bands;
  t.band_halfwidth = spec.band_halfwidth;
  t.attenuation = spec.attenuation;
  t.mode = spec.mode;
  t.noise_sd = spec.noise_sd;
  t.patch_width = patch_width;
  t.wavelengths = spec.wavelengths();
  const auto factors = infected_factors(spec);
  for (std::size_t b = 0; b < t.wavelengths.size(); ++b) {
    const double h = base_reflectance(t.wavelengths[b]);
    t.healthy_mean.push_back(h);
    t.infected_mean.push_back(h * factors[b]);
  }
  t.patch_mean_sd =
      spec.noise_sd / std::sqrt(static_cast<double>(spec.rows) * patch_width);
  return t;
}

}  // namespace bandsel::synth
