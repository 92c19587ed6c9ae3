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
#include <random>
#include <span>
#include <utility>

namespace bandsel {

/// Every stochastic component draws from this engine. The helpers below
/// avoid the implementation-defined std distributions so that seeded runs
/// give identical results across standard libraries.
using Rng = std::mt19937_64;

/// SplitMix64 mix of (master, stream); used to derive independent seeds for
/// GA runs, synthetic stems and CV shuffles.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Uniform on [0, 1) with 53 random bits.
double uniform01(Rng& rng);

/// Uniform on (0, 1); safe as a logarithm argument.
double uniform_open01(Rng& rng);

/// Uniform integer in [0, n), unbiased. Requires n > 0.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Standard normal variate (Marsaglia polar method).
double standard_normal(Rng& rng);

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(rng, i)]);
  }
}

}  // namespace bandsel
