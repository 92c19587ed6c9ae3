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

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bandsel/cube_io.hpp"
#include "bandsel/eval.hpp"
#include "bandsel/features.hpp"
#include "bandsel/ga.hpp"
#include "bandsel/svm.hpp"

namespace bandsel {

/// Stems imaged at this many days after inoculation form the early-detection
/// slice of a test report.
inline constexpr int kEarlyDai = 3;

struct SelectionSpec {
  int k = 3;
  bool include_rgb = true;
  std::array<double, 3> rgb_targets = kRgbTargets;
  GaConfig ga;
  SvmConfig svm;
  int cv_folds = 10;
  FoldUnit fold_unit = FoldUnit::patch;
  int patch_width = 64;
  FeatureOptions features;

  void validate() const;
};

/// Patches of one stem inside a PatchTable: rows [begin, end).
struct StemSlice {
  StemRecord record;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Patch mean spectra for the train and test splits of a manifest. Cubes
/// are loaded one at a time and dropped once their patches are summarized.
struct Dataset {
  double scale_mm_per_px = 0.25;
  int patch_width = 64;
  PatchTable train;
  PatchTable test;
  std::vector<StemSlice> train_stems;
  std::vector<StemSlice> test_stems;

  const std::vector<double>& wavelengths() const { return train.wavelengths(); }
};

using CubeLoader = std::function<DataCube(const StemRecord&)>;

/// Reads each record's cube (via loader, or from disk when loader is empty),
/// patches and labels it, and summarizes the patches. Throws Error when
/// cubes disagree on the wavelength axis.
Dataset load_dataset(const Manifest& manifest, int patch_width,
                     const FeatureOptions& options = {},
                     const CubeLoader& loader = {});

/// Fixed bands (the RGB part, possibly empty) of a spec on an axis.
std::vector<int> fixed_bands(const SelectionSpec& spec,
                             std::span<const double> wavelengths);

/// Wrapper fitness: pooled k-fold CV F1 of the RBF SVM on training patches,
/// using features at fixed_bands followed by the candidate variable bands.
/// Fold assignment is fixed at construction, so equal band sets always
/// score identically. Safe to call concurrently.
class BandFitness {
 public:
  BandFitness(const PatchTable& train, std::vector<int> fixed,
              const CvOptions& cv, const SvmConfig& svm);

  double operator()(std::span<const int> variable_bands) const;
  EvalReport report(std::span<const int> variable_bands) const;
  std::vector<int> feature_bands(std::span<const int> variable_bands) const;

 private:
  const PatchTable& train_;
  std::vector<int> fixed_;
  CvOptions cv_;
  SvmConfig svm_;
  std::vector<Label> labels_;
  std::vector<int> folds_;
};

/// Any infected patch makes the stem infected. Throws on empty input.
Label classify_stem(std::span<const Label> patch_predictions);

/// Distance from the inoculation point to the far edge of the farthest
/// infected patch: (max infected index + 1) * width * scale, 0 if none.
double predict_length(std::span<const Label> patch_predictions, int patch_width,
                      double scale_mm_per_px);

struct StemPrediction {
  std::string stem_id;
  int dai = 0;
  Label truth = Label::healthy;
  Label predicted = Label::healthy;
  double actual_mm = 0.0;
  double predicted_mm = 0.0;
};

struct EvaluationResult {
  std::vector<int> bands;
  std::vector<double> wavelengths;
  EvalReport patch_report;
  EvalReport stem_report;
  std::optional<EvalReport> early_report;  // dai == kEarlyDai stems only
  std::vector<StemPrediction> stems;
};

/// Scores given patch predictions (one per test patch, table order) at
/// patch and stem level. A stem's true label is infected iff any of its
/// patches is labeled infected.
EvaluationResult summarize(const Dataset& data,
                           std::span<const Label> patch_predictions);

/// Predictions of a trained model on the test split.
EvaluationResult evaluate_model(const Dataset& data, const SvmModel& model,
                                std::span<const int> bands,
                                kernels::Backend backend = kernels::Backend::serial);

/// Trains one SVM on every training patch at the given bands and
/// evaluates it on the test split.
EvaluationResult evaluate_bands(const Dataset& data, std::span<const int> bands,
                                const SvmConfig& svm, SvmModel* model_out = nullptr);

struct SelectionResult {
  std::vector<int> band_indices;  // fixed bands first, then variable ascending
  std::vector<double> band_wavelengths;
  std::vector<int> variable_bands;
  EvalReport train_cv_report;
  EvaluationResult test;
  SvmModel model;
  MultiRunResult search;
};

/// Wrapper band selection: GA over variable bands with BandFitness, then a
/// final SVM on all training patches evaluated on the test split.
SelectionResult select_bands(const Dataset& data, const SelectionSpec& spec);

/// Parses "rgb" or a comma-separated list, optionally mixing both
/// ("rgb,40,120"). Indices are validated against n_bands.
std::vector<int> parse_band_list(std::string_view text,
                                 std::span<const double> wavelengths,
                                 const std::array<double, 3>& rgb_targets = kRgbTargets);

/// Pearson correlation; 0 when either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace bandsel
