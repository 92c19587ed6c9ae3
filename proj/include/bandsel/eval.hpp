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
#include <string>
#include <utility>
#include <vector>

#include "bandsel/common.hpp"
#include "bandsel/features.hpp"
#include "bandsel/svm.hpp"

namespace bandsel {

/// Counts with infected as the positive class.
struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  void add(Label truth, Label predicted);
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  bool operator==(const ConfusionMatrix&) const = default;
};

struct EvalReport {
  ConfusionMatrix matrix;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double healthy_acc = 0.0;   // percent
  double infected_acc = 0.0;  // percent
  double overall_acc = 0.0;   // percent

  bool operator==(const EvalReport&) const = default;
};

/// Precision, recall, F1 and accuracies; zero denominators give 0.
/// Throws UsageError for an empty matrix.
EvalReport metrics(const ConfusionMatrix& m);

/// (truth, predicted) pairs into one matrix.
ConfusionMatrix accumulate(std::span<const std::pair<Label, Label>> pairs);
ConfusionMatrix accumulate(std::span<const Label> truth,
                           std::span<const Label> predicted);

enum class FoldUnit { patch, stem };

struct CvOptions {
  int k = 10;
  FoldUnit unit = FoldUnit::patch;
  std::uint64_t seed = 0;
  /// >1 trains folds concurrently; results are identical either way.
  int threads = 1;
};

/// fold[i] for each sample. Units (patches, or stems when grouped) are
/// shuffled within their class with a seeded stream and dealt round-robin,
/// continuing the deal across classes so fold sizes differ by at most one
/// overall and within each class. A stem's class is infected if any of its
/// patches is.
std::vector<int> assign_folds(std::span<const Label> labels,
                              std::span<const std::string> groups,
                              const CvOptions& options);

/// Pooled (micro-averaged) k-fold cross-validation of the RBF SVM. gram is
/// the n x n Gram matrix of all samples; each fold's solve uses its
/// sub-block. Throws UsageError when a training complement is single-class.
EvalReport cross_validate(std::span<const double> gram,
                          std::span<const Label> labels,
                          std::span<const int> folds, int k,
                          const SvmConfig& config, int threads = 1);

EvalReport kfold_cv(std::span<const FeatureVector> samples,
                    const CvOptions& options, const SvmConfig& config);

}  // namespace bandsel
