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

// Data-parallel inner loops. Each kernel has a serial reference and an
// OpenMP version; both accumulate in the same order per output element, so
// their results are bitwise identical and tests compare them with ==.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bandsel/cube_io.hpp"

namespace bandsel {

/// Half-open column interval [begin, end).
struct ColRange {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  std::uint32_t size() const { return end - begin; }
  bool operator==(const ColRange&) const = default;
};

/// Dense row-major matrix of feature values, one sample per row.
struct SampleMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> data;

  SampleMatrix() = default;
  SampleMatrix(std::size_t r, std::size_t d) : rows(r), dim(d), data(r * d) {}

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }
  std::span<double> row(std::size_t i) { return {data.data() + i * dim, dim}; }
};

namespace kernels {

enum class Backend { serial, openmp };

/// Optional foreground mask: a pixel contributes to patch means only when
/// its reflectance averaged over all bands is >= threshold.
struct PixelMask {
  float threshold = 0.0f;
};

/// out[p * n_bands + b] = mean of cube(row, col, b) over all rows and the
/// columns of ranges[p]. Throws Error if a mask removes every pixel of a
/// patch. out.size() must equal ranges.size() * cube.n_bands.
void patch_band_means_serial(const DataCube& cube,
                             std::span<const ColRange> ranges,
                             std::optional<PixelMask> mask,
                             std::span<double> out);
void patch_band_means_omp(const DataCube& cube,
                          std::span<const ColRange> ranges,
                          std::optional<PixelMask> mask, std::span<double> out,
                          int threads = 0);

inline void patch_band_means(Backend backend, const DataCube& cube,
                             std::span<const ColRange> ranges,
                             std::optional<PixelMask> mask,
                             std::span<double> out, int threads = 0) {
  if (backend == Backend::openmp) {
    patch_band_means_omp(cube, ranges, mask, out, threads);
  } else {
    patch_band_means_serial(cube, ranges, mask, out);
  }
}

/// Squared Euclidean distance, accumulated in index order.
inline double squared_distance(std::span<const double> u,
                               std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    s += d * d;
  }
  return s;
}

/// Full symmetric RBF Gram matrix exp(-gamma * |xi - xj|^2), row-major.
void rbf_gram_serial(const SampleMatrix& x, double gamma,
                     std::span<double> out);
void rbf_gram_omp(const SampleMatrix& x, double gamma, std::span<double> out,
                  int threads = 0);

/// out[q] = sum_s coefs[s] * exp(-gamma * |sv_s - query_q|^2) + bias,
/// summed in support-vector order.
void rbf_expansion_serial(const SampleMatrix& support, std::span<const double> coefs,
                          double bias, double gamma, const SampleMatrix& queries,
                          std::span<double> out);
void rbf_expansion_omp(const SampleMatrix& support, std::span<const double> coefs,
                       double bias, double gamma, const SampleMatrix& queries,
                       std::span<double> out, int threads = 0);

}  // namespace kernels
}  // namespace bandsel
