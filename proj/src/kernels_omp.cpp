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

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>

#include "bandsel/kernels.hpp"

namespace bandsel::kernels {

namespace detail {
void one_patch_means(const DataCube& cube, ColRange range,
                     std::optional<PixelMask> mask, double* out);
double expansion_at(const SampleMatrix& support, std::span<const double> coefs,
                    double bias, double gamma, std::span<const double> q);
}  // namespace detail

namespace {
int resolve(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }
}  // namespace

void patch_band_means_omp(const DataCube& cube,
                          std::span<const ColRange> ranges,
                          std::optional<PixelMask> mask, std::span<double> out,
                          int threads) {
  const auto n = static_cast<std::ptrdiff_t>(ranges.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(resolve(threads))
  for (std::ptrdiff_t p = 0; p < n; ++p) {
    try {
      detail::one_patch_means(cube, ranges[p], mask,
                              out.data() + p * cube.n_bands);
    } catch (...) {
#pragma omp critical(bandsel_patch_means_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void rbf_gram_omp(const SampleMatrix& x, double gamma, std::span<double> out,
                  int threads) {
  const auto n = static_cast<std::ptrdiff_t>(x.rows);
  // Each thread writes whole rows; the symmetric entry is recomputed
  // rather than mirrored so no two threads touch the same element.
#pragma omp parallel for schedule(dynamic, 16) num_threads(resolve(threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      if (i == j) {
        out[i * n + j] = 1.0;
      } else {
        // Operands ordered (min, max) to match the serial upper triangle.
        const auto a = static_cast<std::size_t>(std::min(i, j));
        const auto b = static_cast<std::size_t>(std::max(i, j));
        out[i * n + j] =
            std::exp(-gamma * squared_distance(x.row(a), x.row(b)));
      }
    }
  }
}

void rbf_expansion_omp(const SampleMatrix& support,
                       std::span<const double> coefs, double bias,
                       double gamma, const SampleMatrix& queries,
                       std::span<double> out, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(queries.rows);
#pragma omp parallel for schedule(static) num_threads(resolve(threads))
  for (std::ptrdiff_t q = 0; q < n; ++q) {
    out[q] = detail::expansion_at(support, coefs, bias, gamma, queries.row(q));
  }
}

}  // namespace bandsel::kernels
