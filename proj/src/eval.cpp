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

#include "bandsel/eval.hpp"

#include <omp.h>

#include <exception>
#include <map>

#include "bandsel/rng.hpp"

namespace bandsel {

void ConfusionMatrix::add(Label truth, Label predicted) {
  if (truth == Label::infected) {
    (predicted == Label::infected ? tp : fn) += 1;
  } else {
    (predicted == Label::infected ? fp : tn) += 1;
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

EvalReport metrics(const ConfusionMatrix& m) {
  if (m.tp < 0 || m.fp < 0 || m.fn < 0 || m.tn < 0) {
    throw UsageError("confusion counts must be non-negative");
  }
  if (m.total() == 0) throw UsageError("confusion matrix is empty");
  auto ratio = [](std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  EvalReport r;
  r.matrix = m;
  r.precision = ratio(m.tp, m.tp + m.fp);
  r.recall = ratio(m.tp, m.tp + m.fn);
  const double pr = r.precision + r.recall;
  r.f1 = pr == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / pr;
  r.infected_acc = r.recall * 100.0;
  r.healthy_acc = ratio(m.tn, m.tn + m.fp) * 100.0;
  r.overall_acc = ratio(m.tp + m.tn, m.total()) * 100.0;
  return r;
}

ConfusionMatrix accumulate(std::span<const std::pair<Label, Label>> pairs) {
  ConfusionMatrix m;
  for (const auto& [truth, pred] : pairs) m.add(truth, pred);
  return m;
}

ConfusionMatrix accumulate(std::span<const Label> truth,
                           std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) {
    throw UsageError("truth and prediction counts differ");
  }
  ConfusionMatrix m;
  for (std::size_t i = 0; i < truth.size(); ++i) m.add(truth[i], predicted[i]);
  return m;
}

std::vector<int> assign_folds(std::span<const Label> labels,
                              std::span<const std::string> groups,
                              const CvOptions& options) {
  if (options.k < 2) throw UsageError("cross-validation needs k >= 2");
  const std::size_t n = labels.size();
  if (options.unit == FoldUnit::stem && groups.size() != n) {
    throw UsageError("stem grouping needs one group id per sample");
  }

  // unit_of[i] indexes units in first-appearance order.
  std::vector<std::size_t> unit_of(n);
  std::vector<Label> unit_label;
  if (options.unit == FoldUnit::patch) {
    for (std::size_t i = 0; i < n; ++i) unit_of[i] = i;
    unit_label.assign(labels.begin(), labels.end());
  } else {
    std::map<std::string, std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, fresh] = ids.emplace(groups[i], unit_label.size());
      if (fresh) unit_label.push_back(Label::healthy);
      unit_of[i] = it->second;
      if (labels[i] == Label::infected) unit_label[it->second] = Label::infected;
    }
  }
  if (unit_label.size() < static_cast<std::size_t>(options.k)) {
    throw Error("fewer units (" + std::to_string(unit_label.size()) +
                     ") than folds (" + std::to_string(options.k) + ")");
  }

  std::vector<int> unit_fold(unit_label.size());
  std::size_t dealt = 0;
  for (Label cls : {Label::infected, Label::healthy}) {
    std::vector<std::size_t> members;
    for (std::size_t u = 0; u < unit_label.size(); ++u) {
      if (unit_label[u] == cls) members.push_back(u);
    }
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(cls)));
    shuffle(std::span<std::size_t>(members), rng);
    for (std::size_t u : members) {
      unit_fold[u] = static_cast<int>(dealt++ % static_cast<std::size_t>(options.k));
    }
  }
  std::vector<int> folds(n);
  for (std::size_t i = 0; i < n; ++i) folds[i] = unit_fold[unit_of[i]];
  return folds;
}

namespace {

ConfusionMatrix run_fold(std::span<const double> gram,
                         std::span<const Label> labels,
                         std::span<const int> folds, int fold,
                         const SvmConfig& config) {
  const std::size_t n = labels.size();
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < n; ++i) {
    (folds[i] == fold ? test_idx : train_idx).push_back(i);
  }
  if (test_idx.empty()) return {};
  std::vector<int> y;
  y.reserve(train_idx.size());
  bool pos = false, neg = false;
  for (std::size_t i : train_idx) {
    y.push_back(sign_of(labels[i]));
    (labels[i] == Label::infected ? pos : neg) = true;
  }
  if (!pos || !neg) {
    throw Error("fold " + std::to_string(fold) +
                     " has a single-class training complement");
  }
  const std::size_t m = train_idx.size();
  std::vector<double> sub(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    const double* src = gram.data() + train_idx[a] * n;
    for (std::size_t b = 0; b < m; ++b) sub[a * m + b] = src[train_idx[b]];
  }
  const DualSolution sol = solve_dual(sub, y, config);

  ConfusionMatrix cm;
  for (std::size_t t : test_idx) {
    const double* row = gram.data() + t * n;
    double s = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      if (sol.alpha[a] < kSupportVectorCutoff) continue;
      s += sol.alpha[a] * y[a] * row[train_idx[a]];
    }
    cm.add(labels[t], label_for(s + sol.bias));
  }
  return cm;
}

}  // namespace

EvalReport cross_validate(std::span<const double> gram,
                          std::span<const Label> labels,
                          std::span<const int> folds, int k,
                          const SvmConfig& config, int threads) {
  config.validate();
  if (k < 2) throw UsageError("cross-validation needs k >= 2");
  std::vector<ConfusionMatrix> per_fold(static_cast<std::size_t>(k));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : omp_get_max_threads()) if (threads != 1)
  for (int f = 0; f < k; ++f) {
    try {
      per_fold[static_cast<std::size_t>(f)] =
          run_fold(gram, labels, folds, f, config);
    } catch (...) {
#pragma omp critical(bandsel_cv_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  ConfusionMatrix pooled;
  for (const auto& cm : per_fold) pooled += cm;
  return metrics(pooled);
}

EvalReport kfold_cv(std::span<const FeatureVector> samples,
                    const CvOptions& options, const SvmConfig& config) {
  if (samples.empty()) throw UsageError("no samples for cross-validation");
  const std::size_t dim = samples.front().values.size();
  SampleMatrix x(samples.size(), dim);
  std::vector<Label> labels;
  std::vector<std::string> groups;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].values.size() != dim) {
      throw UsageError("inconsistent feature dimensionality at sample " +
                       std::to_string(i));
    }
    std::copy(samples[i].values.begin(), samples[i].values.end(),
              x.row(i).begin());
    labels.push_back(samples[i].label);
    groups.push_back(samples[i].stem_id);
  }
  const auto folds = assign_folds(labels, groups, options);
  std::vector<double> gram(x.rows * x.rows);
  kernels::rbf_gram_serial(x, config.gamma, gram);
  return cross_validate(gram, labels, folds, options.k, config,
                        options.threads);
}

}  // namespace bandsel
