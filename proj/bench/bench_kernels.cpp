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


// Serial reference vs OpenMP for each parallel kernel, plus the GA fitness
// fan-out. Run with --benchmark_filter to pick one family.

#include <benchmark/benchmark.h>

#include <vector>

#include "bandsel/features.hpp"
#include "bandsel/ga.hpp"
#include "bandsel/kernels.hpp"
#include "bandsel/pipeline.hpp"
#include "bandsel/rng.hpp"
#include "bandsel/synth.hpp"
#include "support.hpp"

namespace {

using namespace bandsel;

const DataCube& desk_cube() {
  static const DataCube cube = [] {
    const auto spec = testing::desk_spec(1, 1, 1);
    const auto plan = synth::plan_stems(spec);
    return synth::generate_cube(spec, plan.front(), 0);
  }();
  return cube;
}

std::vector<ColRange> ranges(const DataCube& cube, int width) {
  std::vector<ColRange> out;
  for (const auto& p : make_patches(cube, StemRecord{}, width)) out.push_back(p.cols);
  return out;
}

SampleMatrix random_samples(std::size_t n, std::size_t dim) {
  Rng rng(5);
  SampleMatrix x(n, dim);
  for (auto& v : x.data) v = uniform01(rng);
  return x;
}

void BM_PatchMeans(benchmark::State& state) {
  const auto& cube = desk_cube();
  const auto r = ranges(cube, 64);
  std::vector<double> out(r.size() * cube.n_bands);
  const bool omp = state.range(0) != 0;
  for (auto _ : state) {
    if (omp) {
      kernels::patch_band_means_omp(cube, r, std::nullopt, out);
    } else {
      kernels::patch_band_means_serial(cube, r, std::nullopt, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(state.iterations() * cube.reflectance.size() * sizeof(float));
}
BENCHMARK(BM_PatchMeans)->ArgName("omp")->Arg(0)->Arg(1);

void BM_RbfGram(benchmark::State& state) {
  const auto x = random_samples(static_cast<std::size_t>(state.range(1)), 6);
  std::vector<double> out(x.rows * x.rows);
  const bool omp = state.range(0) != 0;
  for (auto _ : state) {
    if (omp) {
      kernels::rbf_gram_omp(x, 1.0, out);
    } else {
      kernels::rbf_gram_serial(x, 1.0, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_RbfGram)->ArgNames({"omp", "n"})->ArgsProduct({{0, 1}, {200, 800}});

void BM_RbfExpansion(benchmark::State& state) {
  const auto sv = random_samples(200, 6);
  const auto q = random_samples(static_cast<std::size_t>(state.range(1)), 6);
  const std::vector<double> coefs(sv.rows, 0.5);
  std::vector<double> out(q.rows);
  const bool omp = state.range(0) != 0;
  for (auto _ : state) {
    if (omp) {
      kernels::rbf_expansion_omp(sv, coefs, 0.1, 1.0, q, out);
    } else {
      kernels::rbf_expansion_serial(sv, coefs, 0.1, 1.0, q, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_RbfExpansion)->ArgNames({"omp", "queries"})->ArgsProduct({{0, 1}, {1000, 10000}});

// One short GA run with real wrapper fitness; threads 1 is the serial path.
void BM_GaFitnessFanOut(benchmark::State& state) {
  static const Dataset data = testing::synth_dataset(testing::small_spec(3));
  const std::vector<int> fixed{8, 15, 25};
  CvOptions cv;
  BandFitness fitness(data.train, fixed, cv, SvmConfig{});
  GaConfig cfg;
  cfg.population = 20;
  cfg.max_generations = 3;
  cfg.runs = 1;
  cfg.threads = static_cast<int>(state.range(0));
  const SearchSpace space{static_cast<int>(data.train.n_bands()), fixed};
  for (auto _ : state) {
    auto run = evolve([&](std::span<const int> b) { return fitness(b); }, cfg, space);
    benchmark::DoNotOptimize(run.best.fitness);
  }
}
BENCHMARK(BM_GaFitnessFanOut)->ArgName("threads")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
