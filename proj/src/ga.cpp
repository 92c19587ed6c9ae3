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

#include "bandsel/ga.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <string>

#include "bandsel/common.hpp"
#include "format.hpp"

namespace bandsel {

void GaConfig::validate() const {
  if (population < 2) throw UsageError("GA population must be >= 2");
  if (max_generations < 0) throw UsageError("GA generations must be >= 0");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) {
    throw UsageError("crossover probability must be in [0, 1]");
  }
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
    throw UsageError("mutation probability must be in [0, 1]");
  }
  if (elite_count < 0 || elite_count >= population) {
    throw UsageError("elite count must be in [0, population)");
  }
  if (runs < 1) throw UsageError("GA runs must be >= 1");
  if (stall_window < 1) throw UsageError("stall window must be >= 1");
  if (!(stall_tol >= 0.0)) throw UsageError("stall tolerance must be >= 0");
  if (!(laplace_b > 0.0)) throw UsageError("Laplace scale b must be > 0");
  if (!(power_p > 0.0)) throw UsageError("power mutation index must be > 0");
  if (k < 1) throw UsageError("k must be >= 1");
  if (threads < 0) throw UsageError("threads must be >= 0");
}

bool SearchSpace::is_excluded(int band) const {
  return std::find(excluded.begin(), excluded.end(), band) != excluded.end();
}

void SearchSpace::check_feasible(int k) const {
  int free = 0;
  for (int b = 0; b < n_bands; ++b) free += is_excluded(b) ? 0 : 1;
  if (free < k) {
    throw UsageError("cannot choose " + std::to_string(k) +
                     " distinct bands from " + std::to_string(free) +
                     " available");
  }
}

std::vector<int> Chromosome::band_set() const {
  std::vector<int> s = decoded;
  std::sort(s.begin(), s.end());
  return s;
}

int decode_gene(double gene) { return static_cast<int>(std::floor(gene + 0.5)); }

void repair(Chromosome& c, const SearchSpace& space) {
  const int n = space.n_bands;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (int b : space.excluded) {
    if (b >= 0 && b < n) used[static_cast<std::size_t>(b)] = 1;
  }
  c.decoded.resize(c.genes.size());
  for (std::size_t g = 0; g < c.genes.size(); ++g) {
    double& x = c.genes[g];
    x = std::clamp(x, space.lo(), space.hi());
    int idx = std::clamp(decode_gene(x), 0, n - 1);
    if (used[static_cast<std::size_t>(idx)]) {
      int found = -1;
      for (int d = 1; d < n && found < 0; ++d) {
        if (idx - d >= 0 && !used[static_cast<std::size_t>(idx - d)]) {
          found = idx - d;
        } else if (idx + d < n && !used[static_cast<std::size_t>(idx + d)]) {
          found = idx + d;
        }
      }
      if (found < 0) throw UsageError("no free band left to repair chromosome");
      idx = found;
      x = static_cast<double>(idx);
    }
    used[static_cast<std::size_t>(idx)] = 1;
    c.decoded[g] = idx;
  }
}

std::vector<Chromosome> init_population(const GaConfig& config,
                                        const SearchSpace& space, Rng& rng) {
  space.check_feasible(config.k);
  std::vector<Chromosome> pop(static_cast<std::size_t>(config.population));
  for (auto& c : pop) {
    c.genes.resize(static_cast<std::size_t>(config.k));
    for (double& g : c.genes) {
      g = space.lo() + uniform01(rng) * (space.hi() - space.lo());
    }
    repair(c, space);
  }
  return pop;
}

const Chromosome& tournament_select(std::span<const Chromosome> population,
                                    Rng& rng) {
  if (population.empty()) throw UsageError("tournament on empty population");
  const auto& a = population[uniform_index(rng, population.size())];
  const auto& b = population[uniform_index(rng, population.size())];
  if (!a.fitness || !b.fitness) {
    throw UsageError("tournament on unevaluated chromosome");
  }
  return *b.fitness > *a.fitness ? b : a;
}

double laplace_beta(double u, double r, double a, double b) {
  return r <= 0.5 ? a - b * std::log(u) : a + b * std::log(u);
}

std::pair<Chromosome, Chromosome> laplace_crossover(const Chromosome& p1,
                                                    const Chromosome& p2,
                                                    const GaConfig& config,
                                                    const SearchSpace& space,
                                                    Rng& rng) {
  std::pair<Chromosome, Chromosome> kids{p1, p2};
  if (!(uniform01(rng) < config.crossover_prob)) return kids;
  auto& [c1, c2] = kids;
  for (std::size_t g = 0; g < c1.genes.size(); ++g) {
    const double u = uniform_open01(rng);
    const double r = uniform01(rng);
    const double beta = laplace_beta(u, r, config.laplace_a, config.laplace_b);
    const double spread = std::abs(p1.genes[g] - p2.genes[g]);
    c1.genes[g] = p1.genes[g] + beta * spread;
    c2.genes[g] = p2.genes[g] + beta * spread;
  }
  c1.fitness.reset();
  c2.fitness.reset();
  repair(c1, space);
  repair(c2, space);
  return kids;
}

double power_step(double x, double lo, double hi, double u, double r,
                  double p) {
  const double s = std::pow(u, p);
  const double t = (x - lo) / (hi - lo);
  return r < t ? x - s * (x - lo) : x + s * (hi - x);
}

Chromosome power_mutation(const Chromosome& c, const GaConfig& config,
                          const SearchSpace& space, Rng& rng) {
  Chromosome out = c;
  bool changed = false;
  for (double& x : out.genes) {
    if (!(uniform01(rng) < config.mutation_prob)) continue;
    const double u = uniform01(rng);
    const double r = uniform01(rng);
    x = power_step(x, space.lo(), space.hi(), u, r, config.power_p);
    changed = true;
  }
  if (changed) {
    out.fitness.reset();
    repair(out, space);
  }
  return out;
}

namespace {

class FitnessCache {
 public:
  FitnessCache(const FitnessFn& fn, int threads) : fn_(fn), threads_(threads) {}

  void evaluate(std::vector<Chromosome>& pop, int run, int generation) {
    std::vector<std::vector<int>> keys(pop.size());
    std::vector<std::vector<int>> pending;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (pop[i].fitness) continue;
      keys[i] = pop[i].band_set();
      if (!cache_.contains(keys[i]) &&
          std::find(pending.begin(), pending.end(), keys[i]) == pending.end()) {
        pending.push_back(keys[i]);
      }
    }

    std::vector<double> values(pending.size());
    std::vector<std::exception_ptr> errors(pending.size());
    const auto n = static_cast<std::ptrdiff_t>(pending.size());
    if (threads_ == 1) {
      for (std::ptrdiff_t p = 0; p < n; ++p) {
        try {
          values[p] = fn_(pending[p]);
        } catch (...) {
          errors[p] = std::current_exception();
        }
      }
    } else {
      const int t = threads_ > 0 ? threads_ : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(t)
      for (std::ptrdiff_t p = 0; p < n; ++p) {
        try {
          values[p] = fn_(pending[p]);
        } catch (...) {
          errors[p] = std::current_exception();
        }
      }
    }
    for (std::size_t p = 0; p < pending.size(); ++p) {
      if (!errors[p]) continue;
      std::string what = "unknown error";
      try {
        std::rethrow_exception(errors[p]);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      throw Error("fitness evaluation failed in run " + std::to_string(run) +
                  ", generation " + std::to_string(generation) + " (bands " +
                  detail::join(std::span<const int>(pending[p]), ';') +
                  "): " + what);
    }
    for (std::size_t p = 0; p < pending.size(); ++p) {
      cache_.emplace(std::move(pending[p]), values[p]);
    }
    evaluations_ += static_cast<std::int64_t>(pending.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (!pop[i].fitness) pop[i].fitness = cache_.at(keys[i]);
    }
  }

  std::int64_t evaluations() const { return evaluations_; }

 private:
  const FitnessFn& fn_;
  int threads_;
  std::map<std::vector<int>, double> cache_;
  std::int64_t evaluations_ = 0;
};

// Indices ordered by descending fitness, ties by position.
std::vector<std::size_t> ranking(const std::vector<Chromosome>& pop) {
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *pop[a].fitness > *pop[b].fitness;
  });
  return order;
}

GenerationStats stats_of(const std::vector<Chromosome>& pop, std::size_t best,
                         int run, int generation) {
  GenerationStats s;
  s.run = run;
  s.generation = generation;
  s.best_fitness = *pop[best].fitness;
  double sum = 0.0;
  for (const auto& c : pop) sum += *c.fitness;
  s.mean_fitness = sum / static_cast<double>(pop.size());
  s.best_bands = pop[best].band_set();
  return s;
}

bool stalled(const std::vector<GenerationStats>& history, const GaConfig& cfg) {
  const auto window = static_cast<std::size_t>(cfg.stall_window);
  if (history.size() < window + 1) return false;
  double sum = 0.0;
  for (std::size_t i = history.size() - window; i < history.size(); ++i) {
    sum += std::abs(history[i].best_fitness - history[i - 1].best_fitness);
  }
  return sum / static_cast<double>(window) < cfg.stall_tol;
}

}  // namespace

RunResult evolve(const FitnessFn& fitness, const GaConfig& config,
                 const SearchSpace& space, int run_index) {
  config.validate();
  space.check_feasible(config.k);
  Rng rng(config.seed);
  FitnessCache cache(fitness, config.threads);

  RunResult result;
  result.run = run_index;
  std::vector<Chromosome> pop = init_population(config, space, rng);
  cache.evaluate(pop, run_index, 0);
  auto order = ranking(pop);
  result.best = pop[order.front()];
  result.history.push_back(stats_of(pop, order.front(), run_index, 0));

  for (int gen = 1; gen <= config.max_generations; ++gen) {
    if (stalled(result.history, config)) {
      result.stalled = true;
      break;
    }
    std::vector<Chromosome> next;
    next.reserve(pop.size());
    for (int e = 0; e < config.elite_count; ++e) {
      next.push_back(pop[order[static_cast<std::size_t>(e)]]);
    }
    while (next.size() < pop.size()) {
      const Chromosome& a = tournament_select(pop, rng);
      const Chromosome& b = tournament_select(pop, rng);
      auto [c1, c2] = laplace_crossover(a, b, config, space, rng);
      next.push_back(power_mutation(c1, config, space, rng));
      if (next.size() < pop.size()) {
        next.push_back(power_mutation(c2, config, space, rng));
      }
    }
    pop = std::move(next);
    cache.evaluate(pop, run_index, gen);
    order = ranking(pop);
    if (*pop[order.front()].fitness > *result.best.fitness) {
      result.best = pop[order.front()];
    }
    result.history.push_back(stats_of(pop, order.front(), run_index, gen));
  }
  if (!result.stalled) result.stalled = stalled(result.history, config);
  result.evaluations = cache.evaluations();
  return result;
}

MultiRunResult multi_run(const FitnessFn& fitness, const GaConfig& config,
                         const SearchSpace& space) {
  config.validate();
  MultiRunResult out;
  for (int r = 0; r < config.runs; ++r) {
    GaConfig cfg = config;
    cfg.seed = r == 0 ? config.seed
                      : derive_seed(config.seed, static_cast<std::uint64_t>(r));
    out.runs.push_back(evolve(fitness, cfg, space, r));
    if (r == 0 || *out.runs.back().best.fitness > *out.best.best.fitness) {
      out.best = out.runs.back();
    }
  }
  return out;
}

void write_history_csv(std::span<const RunResult> runs, std::ostream& out) {
  out << "run,generation,best_f1,mean_f1,best_bands\n";
  for (const auto& run : runs) {
    for (const auto& s : run.history) {
      out << s.run << ',' << s.generation << ','
          << detail::format_number(s.best_fitness) << ','
          << detail::format_number(s.mean_fitness) << ','
          << detail::join(std::span<const int>(s.best_bands), ';') << '\n';
    }
  }
}

}  // namespace bandsel
