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
#include <span>
#include <vector>

#include "bandsel/common.hpp"
#include "bandsel/features.hpp"
#include "bandsel/kernels.hpp"

namespace bandsel {

struct SvmConfig {
  double c = 1000.0;
  double gamma = 1.0;
  /// Stop once the maximal KKT violation m(a) - M(a) falls to tol.
  double tol = 1e-3;
  /// Consecutive pair updates that change no multiplier before giving up.
  int max_passes = 10;
  /// Hard cap on pair updates; 0 selects 100 * n_samples.
  std::int64_t max_iters = 0;

  /// Throws UsageError unless c, gamma and tol are positive.
  void validate() const;
};

/// exp(-gamma * |u - v|^2)
double rbf_kernel(std::span<const double> u, std::span<const double> v,
                  double gamma);

/// Result of the dual solve on a precomputed Gram matrix.
struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  /// sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij (maximized)
  double objective = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
};

/// SMO on the soft-margin dual with a second-order working-set choice:
/// the first index is the maximal violator, the second maximizes the
/// predicted objective gain. gram is n x n row-major, y holds +1/-1.
DualSolution solve_dual(std::span<const double> gram, std::span<const int> y,
                        const SvmConfig& config);

/// Dual objective at alpha; used by both the solver report and tests.
double dual_objective(std::span<const double> gram, std::span<const int> y,
                      std::span<const double> alpha);

struct SvmModel {
  SvmConfig config;
  SampleMatrix support_vectors;
  std::vector<double> dual_coefs;  // alpha_i * y_i
  double bias = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;

  std::size_t dim() const { return support_vectors.dim; }
  std::size_t size() const { return support_vectors.rows; }
};

/// Multipliers below this magnitude are dropped from stored models.
inline constexpr double kSupportVectorCutoff = 1e-8;

/// Requires both classes, equal dimensions and finite values; throws
/// UsageError otherwise. Deterministic: no randomness is involved.
SvmModel train(const SampleMatrix& x, std::span<const Label> labels,
               const SvmConfig& config);
SvmModel train(std::span<const FeatureVector> samples, const SvmConfig& config);

/// Builds a model from a dual solution over the rows of x.
SvmModel model_from_dual(const SampleMatrix& x, std::span<const int> y,
                         const DualSolution& sol, const SvmConfig& config);

double decision(const SvmModel& model, std::span<const double> x);

/// Ties (decision exactly 0) go to infected.
inline Label label_for(double decision_value) {
  return decision_value >= 0.0 ? Label::infected : Label::healthy;
}
Label predict(const SvmModel& model, std::span<const double> x);

std::vector<double> decision_batch(
    const SvmModel& model, const SampleMatrix& queries,
    kernels::Backend backend = kernels::Backend::serial, int threads = 0);
std::vector<Label> predict_batch(
    const SvmModel& model, const SampleMatrix& queries,
    kernels::Backend backend = kernels::Backend::serial, int threads = 0);

}  // namespace bandsel
