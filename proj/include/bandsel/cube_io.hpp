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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bandsel {

/// Hyperspectral reflectance cube stored (row, col, band) with band fastest.
///
/// Rows run across the stem, columns along it. Instances produced by
/// read_cube() or make_cube() always satisfy validate_cube().
struct DataCube {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t n_bands = 0;
  std::vector<double> wavelengths;
  std::vector<float> reflectance;

  std::size_t index(std::size_t row, std::size_t col, std::size_t band) const {
    return (row * cols + col) * n_bands + band;
  }
  float at(std::size_t row, std::size_t col, std::size_t band) const {
    return reflectance[index(row, col, band)];
  }
  std::span<const float> pixel(std::size_t row, std::size_t col) const {
    return {reflectance.data() + index(row, col, 0), n_bands};
  }

  bool operator==(const DataCube&) const = default;
};

/// Throws Error describing the first violated invariant: non-positive
/// dimensions, wavelength count or ordering, payload size, or a reflectance
/// value that is non-finite or outside [0, 1] (reported with its index).
void validate_cube(const DataCube& cube);

/// Builds and validates a cube.
DataCube make_cube(std::uint32_t rows, std::uint32_t cols,
                   std::vector<double> wavelengths,
                   std::vector<float> reflectance);

/// Evenly spaced axis with both endpoints included.
std::vector<double> linear_wavelengths(double lo, double hi, std::uint32_t n);

// On-disk layout (all little-endian):
//   "HSC1" | u32 version | u32 rows | u32 cols | u32 n_bands
//   | f64 wavelengths[n_bands] | f32 reflectance[rows*cols*n_bands]
inline constexpr char kCubeMagic[4] = {'H', 'S', 'C', '1'};
inline constexpr std::uint32_t kCubeVersion = 1;
inline constexpr std::size_t kCubeFixedHeaderBytes = 20;

std::uint64_t cube_file_size(std::uint32_t rows, std::uint32_t cols,
                             std::uint32_t n_bands);

struct CubeHeader {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t n_bands = 0;
  std::vector<double> wavelengths;
};

/// Reads only the header and wavelength axis.
CubeHeader read_cube_header(const std::filesystem::path& path);

DataCube read_cube(const std::filesystem::path& path);

/// Validates before opening the file, so an invalid cube never leaves a
/// partial file behind.
void write_cube(const DataCube& cube, const std::filesystem::path& path);

enum class Treatment { inoculated, mock };
enum class Split { train, test };
enum class InoculationEnd { low_col, high_col };

struct StemRecord {
  std::string stem_id;
  std::string cube_path;
  std::string genotype;
  Treatment treatment = Treatment::mock;
  int dai = 0;
  std::optional<double> interior_mm;
  std::optional<double> exterior_mm;
  std::optional<double> dead_mm;
  int replication = 0;
  Split split = Split::train;
  InoculationEnd inoculation_end = InoculationEnd::low_col;

  /// Interior lesion extent; absent lengths count as 0 mm.
  double interior_or_zero() const { return interior_mm.value_or(0.0); }

  bool operator==(const StemRecord&) const = default;
};

struct Manifest {
  std::vector<StemRecord> records;
  double scale_mm_per_px = 0.25;
  /// Directory that relative cube paths resolve against.
  std::filesystem::path base_dir;

  std::size_t count(Split split) const;
  std::filesystem::path cube_file(const StemRecord& record) const;
};

inline constexpr std::string_view kManifestHeader =
    "stem_id,cube_path,genotype,treatment,dai,interior_mm,exterior_mm,"
    "dead_mm,replication,split,inoculation_end";

/// Parses the manifest CSV. Records keep file order; base_dir is set to the
/// manifest's parent directory.
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

std::string_view to_string(Treatment t);
std::string_view to_string(Split s);
std::string_view to_string(InoculationEnd e);

}  // namespace bandsel
