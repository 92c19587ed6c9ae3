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
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "bandsel/rng.hpp"

namespace bandsel {

/// Real-coded GA settings. Defaults follow the band-selection experiment:
/// population 100, 100 generations, crossover 0.8, mutation 0.2, 2 elites,
/// 5 independent runs, stop after 50 generations of < 1e-6 mean change.
struct GaConfig {
  int population = 100;
  int max_generations = 100;
  double crossover_prob = 0.8;
  double mutation_prob = 0.2;
  int elite_count = 2;
  int runs = 5;
  int stall_window = 50;
  double stall_tol = 1e-6;
  double laplace_a = 0.0;   // location of the Laplace crossover
  double laplace_b = 0.5;   // scale of the Laplace crossover
  double power_p = 4.0;     // power mutation index
  int k = 3;
  std::uint64_t seed = 0;
  /// Concurrent fitness evaluations; 0 = OpenMP default, 1 = serial path.
  int threads = 0;

  void validate() const;
};

/// Band-index domain [0, n_bands - 1] minus bands reserved elsewhere (the
/// fixed RGB features).
struct SearchSpace {
  int n_bands = 0;
  std::vector<int> excluded;

  double lo() const { return 0.0; }
  double hi() const { return static_cast<double>(n_bands - 1); }
  bool is_excluded(int band) const;
  /// Throws UsageError unless k distinct non-excluded bands exist.
  void check_feasible(int k) const;
};

struct Chromosome {
  std::vector<double> genes;
  /// Rounded genes after repair, in gene order; always distinct, in range
  /// and disjoint from the excluded bands.
  std::vector<int> decoded;
  std::optional<double> fitness;

  /// decoded, sorted ascending; the identity used by the fitness cache.
  std::vector<int> band_set() const;
};

/// Round half up.
int decode_gene(double gene);

/// Clamps genes to bounds, decodes, and replaces any index that collides
/// with an earlier gene or an excluded band by the nearest free index
/// (searching outward, lower side first). Repaired genes are snapped to
/// their new index so decode(genes) == decoded.
void repair(Chromosome& c, const SearchSpace& space);

std::vector<Chromosome> init_population(const GaConfig& config,
                                        const SearchSpace& space, Rng& rng);

/// Binary tournament with replacement; ties keep the first draw. Throws
/// UsageError on an empty population or unevaluated member.
const Chromosome& tournament_select(std::span<const Chromosome> population,
                                    Rng& rng);

/// beta = a - b ln(u) if r <= 1/2, else a + b ln(u).
double laplace_beta(double u, double r, double a, double b);

/// Per gene y1 = x1 + beta |x1 - x2|, y2 = x2 + beta |x1 - x2|, applied to
/// the pair with probability crossover_prob; otherwise children are copies.
/// Children are clamped, repaired and left unevaluated.
std::pair<Chromosome, Chromosome> laplace_crossover(const Chromosome& p1,
                                                    const Chromosome& p2,
                                                    const GaConfig& config,
                                                    const SearchSpace& space,
                                                    Rng& rng);

/// One power-mutation step: s = u^p, t = (x - lo) / (hi - lo);
/// x - s (x - lo) if r < t, else x + s (hi - x).
double power_step(double x, double lo, double hi, double u, double r, double p);

/// Mutates each gene with probability mutation_prob, then repairs.
Chromosome power_mutation(const Chromosome& c, const GaConfig& config,
                          const SearchSpace& space, Rng& rng);

/// Called with a sorted, duplicate-free band set. Must be pure and safe to
/// call concurrently when threads != 1.
using FitnessFn = std::function<double(std::span<const int>)>;

struct GenerationStats {
  int run = 0;
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  std::vector<int> best_bands;  // sorted
};

struct RunResult {
  Chromosome best;
  std::vector<GenerationStats> history;
  int run = 0;
  /// Distinct band sets evaluated (each at most once per run).
  std::int64_t evaluations = 0;
  bool stalled = false;
};

/// One GA run seeded from config.seed. Generation 0 is the random initial
/// population; each later generation keeps elite_count members and breeds
/// the rest by tournament, Laplace crossover and power mutation. Stops when
/// the mean |change in best fitness| over the last stall_window generations
/// drops below stall_tol, or after max_generations breeding steps.
RunResult evolve(const FitnessFn& fitness, const GaConfig& config,
                 const SearchSpace& space, int run_index = 0);

struct MultiRunResult {
  RunResult best;
  std::vector<RunResult> runs;
};

/// config.runs independent runs; run 0 uses config.seed, run r > 0 uses
/// derive_seed(config.seed, r). Best fitness wins, ties go to the lower run.
MultiRunResult multi_run(const FitnessFn& fitness, const GaConfig& config,
                         const SearchSpace& space);

/// CSV: run,generation,best_f1,mean_f1,best_bands (bands ';'-separated).
void write_history_csv(std::span<const RunResult> runs, std::ostream& out);

}  // namespace bandsel
