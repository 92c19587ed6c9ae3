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

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bandsel/common.hpp"
#include "bandsel/cube_io.hpp"
#include "bandsel/kernels.hpp"

namespace bandsel {

/// Blue, green and red reference wavelengths (nm) of the fixed RGB features.
inline constexpr std::array<double, 3> kRgbTargets{475.56, 548.91, 652.14};

struct BandMap {
  std::vector<double> wavelengths;
  std::array<int, 3> rgb_bands{};
};

/// Index of the wavelength closest to target; ties go to the lower index.
/// Throws UsageError when target lies outside [front, back] of the axis.
int nearest_band(std::span<const double> wavelengths, double target);

BandMap build_band_map(std::span<const double> wavelengths,
                       const std::array<double, 3>& targets = kRgbTargets);

struct Patch {
  std::string stem_id;
  int patch_index = 0;  // 0 adjoins the inoculation point
  ColRange cols;
  Label label = Label::healthy;
};

/// Tiles the longitudinal axis into floor(cols / width) patches starting at
/// the inoculation end; leftover columns at the far end are dropped. Labels
/// are left healthy; see label_patch().
std::vector<Patch> make_patches(std::uint32_t cols, const StemRecord& record,
                                int patch_width);
inline std::vector<Patch> make_patches(const DataCube& cube,
                                       const StemRecord& record,
                                       int patch_width) {
  return make_patches(cube.cols, record, patch_width);
}

/// Infected iff the patch's distance interval from the inoculation point
/// [i*w*s, (i+1)*w*s) mm intersects [0, interior_mm). Mock stems are
/// always healthy.
Label label_patch(const Patch& patch, const StemRecord& record,
                  double scale_mm_per_px);

/// make_patches() followed by label_patch() on each patch.
std::vector<Patch> labeled_patches(std::uint32_t cols, const StemRecord& record,
                                   int patch_width, double scale_mm_per_px);

struct FeatureVector {
  std::vector<double> values;
  Label label = Label::healthy;
  std::string stem_id;
  int patch_index = 0;
};

struct FeatureOptions {
  std::optional<kernels::PixelMask> mask;
  kernels::Backend backend = kernels::Backend::serial;
  int threads = 0;
};

/// values[j] = mean reflectance of the patch at band_indices[j]. Throws
/// UsageError on out-of-range or duplicate bands.
std::vector<FeatureVector> extract_features(const DataCube& cube,
                                            std::span<const Patch> patches,
                                            std::span<const int> band_indices,
                                            const FeatureOptions& options = {});

/// Per-patch mean spectra for many stems, the cached form used by band
/// search: every candidate band set is a column gather from this table.
class PatchTable {
 public:
  PatchTable() = default;
  explicit PatchTable(std::vector<double> wavelengths)
      : wavelengths_(std::move(wavelengths)) {}

  /// Appends every patch of one cube. The cube's wavelength axis must match.
  void append(const DataCube& cube, std::span<const Patch> patches,
              const FeatureOptions& options = {});

  std::size_t size() const { return patches_.size(); }
  bool empty() const { return patches_.empty(); }
  std::size_t n_bands() const { return wavelengths_.size(); }
  const std::vector<double>& wavelengths() const { return wavelengths_; }
  const std::vector<Patch>& patches() const { return patches_; }
  std::span<const double> spectrum(std::size_t i) const {
    return {means_.data() + i * n_bands(), n_bands()};
  }

  /// Feature matrix at the given bands, one row per patch in table order.
  SampleMatrix gather(std::span<const int> band_indices) const;
  std::vector<FeatureVector> features(std::span<const int> band_indices) const;
  std::vector<Label> labels() const;

 private:
  std::vector<double> wavelengths_;
  std::vector<Patch> patches_;
  std::vector<double> means_;
};

struct SpectrumCurves {
  std::vector<double> wavelengths;
  std::optional<std::vector<double>> healthy;
  std::optional<std::vector<double>> infected;
};

/// Per-label average of patch mean spectra. A label with no patches yields
/// no curve. Throws Error on an empty table.
SpectrumCurves mean_spectrum(const PatchTable& table);
SpectrumCurves mean_spectrum(const DataCube& cube,
                             std::span<const Patch> patches,
                             const FeatureOptions& options = {});

/// CSV columns: wavelength_nm, then healthy_mean and/or infected_mean for the
/// curves that exist.
void write_spectrum_csv(const SpectrumCurves& curves, std::ostream& out);

}  // namespace bandsel
