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

#include "bandsel/svm.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace bandsel {
namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Kernel access with the label product folded in: Q_ij = y_i y_j K_ij.
class QMatrix {
 public:
  QMatrix(std::span<const double> gram, std::span<const int> y)
      : gram_(gram), y_(y), n_(y.size()) {}
  double operator()(std::size_t i, std::size_t j) const {
    return y_[i] * y_[j] * gram_[i * n_ + j];
  }
  double diag(std::size_t i) const { return gram_[i * n_ + i]; }

 private:
  std::span<const double> gram_;
  std::span<const int> y_;
  std::size_t n_;
};

}  // namespace

void SvmConfig::validate() const {
  if (!(c > 0.0)) throw UsageError("SVM C must be > 0");
  if (!(gamma > 0.0)) throw UsageError("SVM gamma must be > 0");
  if (!(tol > 0.0)) throw UsageError("SVM tol must be > 0");
  if (max_passes < 1) throw UsageError("SVM max_passes must be >= 1");
  if (max_iters < 0) throw UsageError("SVM max_iters must be >= 0");
}

double rbf_kernel(std::span<const double> u, std::span<const double> v,
                  double gamma) {
  return std::exp(-gamma * kernels::squared_distance(u, v));
}

double dual_objective(std::span<const double> gram, std::span<const int> y,
                      std::span<const double> alpha) {
  const std::size_t n = y.size();
  double linear = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    linear += alpha[i];
    if (alpha[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += alpha[j] * y[j] * gram[i * n + j];
    }
    quad += alpha[i] * y[i] * row;
  }
  return linear - 0.5 * quad;
}

DualSolution solve_dual(std::span<const double> gram, std::span<const int> y,
                        const SvmConfig& config) {
  const std::size_t n = y.size();
  const double c = config.c;
  const QMatrix q(gram, y);
  const std::int64_t max_iters =
      config.max_iters > 0 ? config.max_iters
                           : static_cast<std::int64_t>(100 * n);

  DualSolution sol;
  auto& alpha = sol.alpha;
  alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a

  auto upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  int stalled = 0;
  while (sol.iterations < max_iters) {
    // First index: maximal violator in I_up.
    double gmax = -kInf;
    std::ptrdiff_t i_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (!upper(t) && -grad[t] >= gmax) {
          gmax = -grad[t];
          i_sel = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        i_sel = static_cast<std::ptrdiff_t>(t);
      }
    }
    // Second index: largest second-order gain within I_low.
    double gmax2 = -kInf;
    double best_gain = kInf;
    std::ptrdiff_t j_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      double diff = 0.0;
      if (y[t] == 1) {
        if (lower(t)) continue;
        diff = gmax + grad[t];
        gmax2 = std::max(gmax2, grad[t]);
      } else {
        if (upper(t)) continue;
        diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
      }
      if (i_sel >= 0 && diff > 0.0) {
        const auto i = static_cast<std::size_t>(i_sel);
        double curv = q.diag(i) + q.diag(t) - 2.0 * y[i] * y[t] * q(i, t);
        if (curv <= 0.0) curv = kTau;
        const double gain = -(diff * diff) / curv;
        if (gain <= best_gain) {
          best_gain = gain;
          j_sel = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
    if (gmax + gmax2 < config.tol || i_sel < 0 || j_sel < 0) {
      sol.converged = true;
      break;
    }

    const auto i = static_cast<std::size_t>(i_sel);
    const auto j = static_cast<std::size_t>(j_sel);
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    const double q_ij = q(i, j);
    if (y[i] != y[j]) {
      double curv = q.diag(i) + q.diag(j) + 2.0 * q_ij;
      if (curv <= 0.0) curv = kTau;
      const double delta = (-grad[i] - grad[j]) / curv;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else {
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = -diff;
        }
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = c + diff;
        }
      }
    } else {
      double curv = q.diag(i) + q.diag(j) - 2.0 * q_ij;
      if (curv <= 0.0) curv = kTau;
      const double delta = (grad[i] - grad[j]) / curv;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = sum;
        }
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = sum;
        }
      }
    }
    ++sol.iterations;

    const double d_i = alpha[i] - old_i;
    const double d_j = alpha[j] - old_j;
    if (d_i == 0.0 && d_j == 0.0) {
      if (++stalled >= config.max_passes) break;
      continue;
    }
    stalled = 0;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += q(t, i) * d_i + q(t, j) * d_j;
    }
  }

  // Bias: average over free multipliers, else midpoint of the feasible range.
  double ub = kInf;
  double lb = -kInf;
  double free_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / static_cast<double>(n_free)
                                : 0.5 * (ub + lb);
  sol.bias = -rho;
  sol.objective = dual_objective(gram, y, alpha);
  return sol;
}

SvmModel model_from_dual(const SampleMatrix& x, std::span<const int> y,
                         const DualSolution& sol, const SvmConfig& config) {
  SvmModel model;
  model.config = config;
  model.bias = sol.bias;
  model.iterations = sol.iterations;
  model.converged = sol.converged;
  std::size_t kept = 0;
  for (double a : sol.alpha) kept += a >= kSupportVectorCutoff ? 1 : 0;
  model.support_vectors = SampleMatrix(kept, x.dim);
  model.dual_coefs.reserve(kept);
  std::size_t r = 0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    if (sol.alpha[i] < kSupportVectorCutoff) continue;
    const auto src = x.row(i);
    std::copy(src.begin(), src.end(), model.support_vectors.row(r++).begin());
    model.dual_coefs.push_back(sol.alpha[i] * y[i]);
  }
  return model;
}

SvmModel train(const SampleMatrix& x, std::span<const Label> labels,
               const SvmConfig& config) {
  config.validate();
  if (x.rows != labels.size()) {
    throw UsageError("sample and label counts differ");
  }
  if (x.dim == 0) throw UsageError("feature vectors are empty");
  std::vector<int> y;
  y.reserve(labels.size());
  bool pos = false, neg = false;
  for (Label l : labels) {
    y.push_back(sign_of(l));
    (l == Label::infected ? pos : neg) = true;
  }
  if (!pos || !neg) {
    throw Error("SVM training needs samples of both classes");
  }
  for (double v : x.data) {
    if (!std::isfinite(v)) throw UsageError("non-finite feature value");
  }
  std::vector<double> gram(x.rows * x.rows);
  kernels::rbf_gram_serial(x, config.gamma, gram);
  const DualSolution sol = solve_dual(gram, y, config);
  return model_from_dual(x, y, sol, config);
}

SvmModel train(std::span<const FeatureVector> samples, const SvmConfig& config) {
  if (samples.empty()) throw UsageError("no training samples");
  const std::size_t dim = samples.front().values.size();
  SampleMatrix x(samples.size(), dim);
  std::vector<Label> labels;
  labels.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].values.size() != dim) {
      throw UsageError("inconsistent feature dimensionality at sample " +
                       std::to_string(i));
    }
    std::copy(samples[i].values.begin(), samples[i].values.end(),
              x.row(i).begin());
    labels.push_back(samples[i].label);
  }
  return train(x, labels, config);
}

double decision(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.dim()) {
    throw UsageError("feature dimension " + std::to_string(x.size()) +
                     " does not match model dimension " +
                     std::to_string(model.dim()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    s += model.dual_coefs[i] *
         rbf_kernel(model.support_vectors.row(i), x, model.config.gamma);
  }
  return s + model.bias;
}

Label predict(const SvmModel& model, std::span<const double> x) {
  return label_for(decision(model, x));
}

std::vector<double> decision_batch(const SvmModel& model,
                                   const SampleMatrix& queries,
                                   kernels::Backend backend, int threads) {
  if (queries.rows > 0 && queries.dim != model.dim()) {
    throw UsageError("feature dimension " + std::to_string(queries.dim) +
                     " does not match model dimension " +
                     std::to_string(model.dim()));
  }
  std::vector<double> out(queries.rows);
  if (backend == kernels::Backend::openmp) {
    kernels::rbf_expansion_omp(model.support_vectors, model.dual_coefs,
                               model.bias, model.config.gamma, queries, out,
                               threads);
  } else {
    kernels::rbf_expansion_serial(model.support_vectors, model.dual_coefs,
                                  model.bias, model.config.gamma, queries, out);
  }
  return out;
}

std::vector<Label> predict_batch(const SvmModel& model,
                                 const SampleMatrix& queries,
                                 kernels::Backend backend, int threads) {
  const auto d = decision_batch(model, queries, backend, threads);
  std::vector<Label> out;
  out.reserve(d.size());
  for (double v : d) out.push_back(label_for(v));
  return out;
}

}  // namespace bandsel
