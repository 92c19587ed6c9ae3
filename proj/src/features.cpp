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

#include "bandsel/features.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "format.hpp"

namespace bandsel {
namespace {

void check_bands(std::span<const int> bands, std::size_t n_bands) {
  std::vector<int> sorted(bands.begin(), bands.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || static_cast<std::size_t>(sorted[i]) >= n_bands) {
      throw UsageError("band index " + std::to_string(sorted[i]) +
                       " out of range [0, " + std::to_string(n_bands) + ")");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw UsageError("duplicate band index " + std::to_string(sorted[i]));
    }
  }
}

}  // namespace

int nearest_band(std::span<const double> wavelengths, double target) {
  if (wavelengths.empty() || target < wavelengths.front() ||
      target > wavelengths.back()) {
    throw Error("wavelength " + detail::format_number(target) +
                " nm is outside the cube's spectral axis");
  }
  int best = 0;
  double best_dist = std::abs(wavelengths[0] - target);
  for (std::size_t i = 1; i < wavelengths.size(); ++i) {
    const double d = std::abs(wavelengths[i] - target);
    if (d < best_dist) {
      best = static_cast<int>(i);
      best_dist = d;
    }
  }
  return best;
}

BandMap build_band_map(std::span<const double> wavelengths,
                       const std::array<double, 3>& targets) {
  BandMap map;
  map.wavelengths.assign(wavelengths.begin(), wavelengths.end());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    map.rgb_bands[i] = nearest_band(wavelengths, targets[i]);
  }
  return map;
}

std::vector<Patch> make_patches(std::uint32_t cols, const StemRecord& record,
                                int patch_width) {
  if (patch_width < 1) throw UsageError("patch width must be >= 1");
  const auto w = static_cast<std::uint32_t>(patch_width);
  if (cols < w) {
    throw Error("stem " + record.stem_id + " has " + std::to_string(cols) +
                " columns, fewer than the patch width " +
                std::to_string(patch_width));
  }
  const std::uint32_t count = cols / w;
  std::vector<Patch> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Patch p;
    p.stem_id = record.stem_id;
    p.patch_index = static_cast<int>(i);
    if (record.inoculation_end == InoculationEnd::low_col) {
      p.cols = {i * w, (i + 1) * w};
    } else {
      p.cols = {cols - (i + 1) * w, cols - i * w};
    }
    out.push_back(std::move(p));
  }
  return out;
}

Label label_patch(const Patch& patch, const StemRecord& record,
                  double scale_mm_per_px) {
  if (record.treatment == Treatment::mock) return Label::healthy;
  const double lesion_mm = record.interior_or_zero();
  const double start_mm =
      static_cast<double>(patch.patch_index) * patch.cols.size() *
      scale_mm_per_px;
  return lesion_mm > start_mm ? Label::infected : Label::healthy;
}

std::vector<Patch> labeled_patches(std::uint32_t cols, const StemRecord& record,
                                   int patch_width, double scale_mm_per_px) {
  auto patches = make_patches(cols, record, patch_width);
  for (auto& p : patches) p.label = label_patch(p, record, scale_mm_per_px);
  return patches;
}

std::vector<FeatureVector> extract_features(const DataCube& cube,
                                            std::span<const Patch> patches,
                                            std::span<const int> band_indices,
                                            const FeatureOptions& options) {
  check_bands(band_indices, cube.n_bands);
  PatchTable table(cube.wavelengths);
  table.append(cube, patches, options);
  return table.features(band_indices);
}

void PatchTable::append(const DataCube& cube, std::span<const Patch> patches,
                        const FeatureOptions& options) {
  if (wavelengths_.empty() && patches_.empty()) {
    wavelengths_ = cube.wavelengths;
  } else if (cube.wavelengths != wavelengths_) {
    throw Error("inconsistent wavelength axes across cubes");
  }
  std::vector<ColRange> ranges;
  ranges.reserve(patches.size());
  for (const auto& p : patches) {
    if (p.cols.end > cube.cols || p.cols.begin >= p.cols.end) {
      throw Error("patch " + std::to_string(p.patch_index) + " of stem " +
                  p.stem_id + " lies outside the cube");
    }
    ranges.push_back(p.cols);
  }
  const std::size_t offset = means_.size();
  means_.resize(offset + ranges.size() * n_bands());
  kernels::patch_band_means(options.backend, cube, ranges, options.mask,
                            std::span<double>(means_).subspan(offset),
                            options.threads);
  patches_.insert(patches_.end(), patches.begin(), patches.end());
}

SampleMatrix PatchTable::gather(std::span<const int> band_indices) const {
  check_bands(band_indices, n_bands());
  SampleMatrix x(size(), band_indices.size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto spec = spectrum(i);
    auto row = x.row(i);
    for (std::size_t j = 0; j < band_indices.size(); ++j) {
      row[j] = spec[static_cast<std::size_t>(band_indices[j])];
    }
  }
  return x;
}

std::vector<FeatureVector> PatchTable::features(
    std::span<const int> band_indices) const {
  const SampleMatrix x = gather(band_indices);
  std::vector<FeatureVector> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto row = x.row(i);
    out.push_back({std::vector<double>(row.begin(), row.end()),
                   patches_[i].label, patches_[i].stem_id,
                   patches_[i].patch_index});
  }
  return out;
}

std::vector<Label> PatchTable::labels() const {
  std::vector<Label> out;
  out.reserve(size());
  for (const auto& p : patches_) out.push_back(p.label);
  return out;
}

SpectrumCurves mean_spectrum(const PatchTable& table) {
  if (table.empty()) throw Error("mean spectrum needs at least one patch");
  const std::size_t nb = table.n_bands();
  std::vector<double> sum_h(nb, 0.0), sum_i(nb, 0.0);
  std::size_t n_h = 0, n_i = 0;
  for (std::size_t p = 0; p < table.size(); ++p) {
    const bool inf = table.patches()[p].label == Label::infected;
    auto& sum = inf ? sum_i : sum_h;
    (inf ? n_i : n_h) += 1;
    const auto spec = table.spectrum(p);
    for (std::size_t b = 0; b < nb; ++b) sum[b] += spec[b];
  }
  SpectrumCurves out;
  out.wavelengths = table.wavelengths();
  auto finish = [](std::vector<double>& s, std::size_t n) {
    for (double& v : s) v /= static_cast<double>(n);
    return s;
  };
  if (n_h > 0) out.healthy = finish(sum_h, n_h);
  if (n_i > 0) out.infected = finish(sum_i, n_i);
  return out;
}

SpectrumCurves mean_spectrum(const DataCube& cube,
                             std::span<const Patch> patches,
                             const FeatureOptions& options) {
  PatchTable table(cube.wavelengths);
  table.append(cube, patches, options);
  return mean_spectrum(table);
}

void write_spectrum_csv(const SpectrumCurves& curves, std::ostream& out) {
  out << "wavelength_nm";
  if (curves.healthy) out << ",healthy_mean";
  if (curves.infected) out << ",infected_mean";
  out << '\n';
  for (std::size_t b = 0; b < curves.wavelengths.size(); ++b) {
    out << detail::format_number(curves.wavelengths[b]);
    if (curves.healthy) out << ',' << detail::format_number((*curves.healthy)[b]);
    if (curves.infected) {
      out << ',' << detail::format_number((*curves.infected)[b]);
    }
    out << '\n';
  }
}

}  // namespace bandsel
