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

#include <cmath>
#include <string>

#include "bandsel/common.hpp"
#include "bandsel/kernels.hpp"

namespace bandsel::kernels {

namespace detail {

// Shared by both backends so the per-patch accumulation order is identical.
void one_patch_means(const DataCube& cube, ColRange range,
                     std::optional<PixelMask> mask, double* out) {
  const std::size_t nb = cube.n_bands;
  for (std::size_t b = 0; b < nb; ++b) out[b] = 0.0;
  std::size_t kept = 0;
  for (std::size_t r = 0; r < cube.rows; ++r) {
    for (std::size_t c = range.begin; c < range.end; ++c) {
      const float* px = cube.reflectance.data() + cube.index(r, c, 0);
      if (mask) {
        double level = 0.0;
        for (std::size_t b = 0; b < nb; ++b) level += px[b];
        if (level / static_cast<double>(nb) < mask->threshold) continue;
      }
      for (std::size_t b = 0; b < nb; ++b) out[b] += px[b];
      ++kept;
    }
  }
  if (kept == 0) {
    throw Error("pixel mask removed every pixel of columns [" +
                std::to_string(range.begin) + ", " + std::to_string(range.end) +
                ")");
  }
  // Division, not a reciprocal multiply, keeps means of values <= 1 at <= 1.
  const auto n = static_cast<double>(kept);
  for (std::size_t b = 0; b < nb; ++b) out[b] /= n;
}

double expansion_at(const SampleMatrix& support, std::span<const double> coefs,
                    double bias, double gamma, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < support.rows; ++i) {
    s += coefs[i] * std::exp(-gamma * squared_distance(support.row(i), q));
  }
  return s + bias;
}

}  // namespace detail

void patch_band_means_serial(const DataCube& cube,
                             std::span<const ColRange> ranges,
                             std::optional<PixelMask> mask,
                             std::span<double> out) {
  for (std::size_t p = 0; p < ranges.size(); ++p) {
    detail::one_patch_means(cube, ranges[p], mask,
                            out.data() + p * cube.n_bands);
  }
}

void rbf_gram_serial(const SampleMatrix& x, double gamma,
                     std::span<double> out) {
  const std::size_t n = x.rows;
  for (std::size_t i = 0; i < n; ++i) {
    out[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double k = std::exp(-gamma * squared_distance(x.row(i), x.row(j)));
      out[i * n + j] = k;
      out[j * n + i] = k;
    }
  }
}

void rbf_expansion_serial(const SampleMatrix& support,
                          std::span<const double> coefs, double bias,
                          double gamma, const SampleMatrix& queries,
                          std::span<double> out) {
  for (std::size_t q = 0; q < queries.rows; ++q) {
    out[q] = detail::expansion_at(support, coefs, bias, gamma, queries.row(q));
  }
}

}  // namespace bandsel::kernels
