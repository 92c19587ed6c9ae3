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

#include "bandsel/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace bandsel {

void SelectionSpec::validate() const {
  if (k < 1) throw UsageError("k must be >= 1");
  if (cv_folds < 2) throw UsageError("cv folds must be >= 2");
  if (patch_width < 1) throw UsageError("patch width must be >= 1");
  GaConfig g = ga;
  g.k = k;
  g.validate();
  svm.validate();
}

Dataset load_dataset(const Manifest& manifest, int patch_width,
                     const FeatureOptions& options, const CubeLoader& loader) {
  if (patch_width < 1) throw UsageError("patch width must be >= 1");
  Dataset data;
  data.scale_mm_per_px = manifest.scale_mm_per_px;
  data.patch_width = patch_width;
  bool have_axis = false;
  for (const auto& record : manifest.records) {
    const DataCube cube =
        loader ? loader(record) : read_cube(manifest.cube_file(record));
    if (!have_axis) {
      data.train = PatchTable(cube.wavelengths);
      data.test = PatchTable(cube.wavelengths);
      have_axis = true;
    } else if (cube.wavelengths != data.train.wavelengths()) {
      throw Error("stem " + record.stem_id +
                  ": wavelength axis differs from the first cube's");
    }
    const auto patches = labeled_patches(cube.cols, record, patch_width,
                                         manifest.scale_mm_per_px);
    PatchTable& table = record.split == Split::train ? data.train : data.test;
    auto& slices =
        record.split == Split::train ? data.train_stems : data.test_stems;
    const std::size_t begin = table.size();
    table.append(cube, patches, options);
    slices.push_back({record, begin, table.size()});
  }
  return data;
}

std::vector<int> fixed_bands(const SelectionSpec& spec,
                             std::span<const double> wavelengths) {
  std::vector<int> out;
  if (!spec.include_rgb) return out;
  const BandMap map = build_band_map(wavelengths, spec.rgb_targets);
  for (int b : map.rgb_bands) {
    if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
  }
  return out;
}

BandFitness::BandFitness(const PatchTable& train, std::vector<int> fixed,
                         const CvOptions& cv, const SvmConfig& svm)
    : train_(train), fixed_(std::move(fixed)), cv_(cv), svm_(svm) {
  svm_.validate();
  labels_ = train_.labels();
  const bool pos = std::count(labels_.begin(), labels_.end(), Label::infected) > 0;
  const bool neg = std::count(labels_.begin(), labels_.end(), Label::healthy) > 0;
  if (!pos || !neg) {
    throw Error("degenerate training data: both classes are required");
  }
  std::vector<std::string> groups;
  groups.reserve(train_.size());
  for (const auto& p : train_.patches()) groups.push_back(p.stem_id);
  folds_ = assign_folds(labels_, groups, cv_);
}

std::vector<int> BandFitness::feature_bands(
    std::span<const int> variable_bands) const {
  std::vector<int> bands = fixed_;
  bands.insert(bands.end(), variable_bands.begin(), variable_bands.end());
  return bands;
}

EvalReport BandFitness::report(std::span<const int> variable_bands) const {
  const auto bands = feature_bands(variable_bands);
  const SampleMatrix x = train_.gather(bands);
  std::vector<double> gram(x.rows * x.rows);
  kernels::rbf_gram_serial(x, svm_.gamma, gram);
  return cross_validate(gram, labels_, folds_, cv_.k, svm_, cv_.threads);
}

double BandFitness::operator()(std::span<const int> variable_bands) const {
  return report(variable_bands).f1;
}

Label classify_stem(std::span<const Label> patch_predictions) {
  if (patch_predictions.empty()) {
    throw UsageError("stem classification needs at least one patch");
  }
  return std::find(patch_predictions.begin(), patch_predictions.end(),
                   Label::infected) != patch_predictions.end()
             ? Label::infected
             : Label::healthy;
}

double predict_length(std::span<const Label> patch_predictions, int patch_width,
                      double scale_mm_per_px) {
  for (std::size_t i = patch_predictions.size(); i > 0; --i) {
    if (patch_predictions[i - 1] == Label::infected) {
      return static_cast<double>(i) * patch_width * scale_mm_per_px;
    }
  }
  return 0.0;
}

EvaluationResult summarize(const Dataset& data,
                           std::span<const Label> patch_predictions) {
  if (patch_predictions.size() != data.test.size()) {
    throw UsageError("one prediction per test patch is required");
  }
  if (data.test.empty()) throw Error("test split is empty");
  const auto truth = data.test.labels();
  EvaluationResult out;
  out.patch_report = metrics(accumulate(truth, patch_predictions));

  ConfusionMatrix stems, early;
  for (const auto& slice : data.test_stems) {
    const std::span<const Label> t(truth.data() + slice.begin,
                                   slice.end - slice.begin);
    const auto p = patch_predictions.subspan(slice.begin, slice.end - slice.begin);
    StemPrediction s;
    s.stem_id = slice.record.stem_id;
    s.dai = slice.record.dai;
    s.truth = classify_stem(t);
    s.predicted = classify_stem(p);
    s.actual_mm = slice.record.treatment == Treatment::inoculated
                      ? slice.record.interior_or_zero()
                      : 0.0;
    s.predicted_mm = predict_length(p, data.patch_width, data.scale_mm_per_px);
    stems.add(s.truth, s.predicted);
    if (s.dai == kEarlyDai) early.add(s.truth, s.predicted);
    out.stems.push_back(std::move(s));
  }
  out.stem_report = metrics(stems);
  if (early.total() > 0) out.early_report = metrics(early);
  return out;
}

EvaluationResult evaluate_model(const Dataset& data, const SvmModel& model,
                                std::span<const int> bands,
                                kernels::Backend backend) {
  const SampleMatrix x = data.test.gather(bands);
  const auto preds = predict_batch(model, x, backend);
  EvaluationResult out = summarize(data, preds);
  out.bands.assign(bands.begin(), bands.end());
  for (int b : bands) {
    out.wavelengths.push_back(data.wavelengths()[static_cast<std::size_t>(b)]);
  }
  return out;
}

EvaluationResult evaluate_bands(const Dataset& data, std::span<const int> bands,
                                const SvmConfig& svm, SvmModel* model_out) {
  if (data.train.empty()) throw Error("training split is empty");
  const SampleMatrix x = data.train.gather(bands);
  const SvmModel model = train(x, data.train.labels(), svm);
  EvaluationResult out = evaluate_model(data, model, bands);
  if (model_out) *model_out = model;
  return out;
}

SelectionResult select_bands(const Dataset& data, const SelectionSpec& spec) {
  spec.validate();
  if (data.train.empty() || data.test.empty()) {
    throw Error("band selection needs non-empty train and test splits");
  }
  const auto& axis = data.wavelengths();
  const std::vector<int> fixed = fixed_bands(spec, axis);

  CvOptions cv;
  cv.k = spec.cv_folds;
  cv.unit = spec.fold_unit;
  cv.seed = derive_seed(spec.ga.seed, 0xcf);
  cv.threads = 1;
  const BandFitness fitness(data.train, fixed, cv, spec.svm);

  GaConfig ga = spec.ga;
  ga.k = spec.k;
  const SearchSpace space{static_cast<int>(axis.size()), fixed};

  SelectionResult out;
  out.search = multi_run([&](std::span<const int> b) { return fitness(b); },
                         ga, space);
  out.variable_bands = out.search.best.best.band_set();
  out.band_indices = fitness.feature_bands(out.variable_bands);
  for (int b : out.band_indices) {
    out.band_wavelengths.push_back(axis[static_cast<std::size_t>(b)]);
  }
  out.train_cv_report = fitness.report(out.variable_bands);
  out.test = evaluate_bands(data, out.band_indices, spec.svm, &out.model);
  return out;
}

std::vector<int> parse_band_list(std::string_view text,
                                 std::span<const double> wavelengths,
                                 const std::array<double, 3>& rgb_targets) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto token = text.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start);
    if (token == "rgb") {
      const BandMap map = build_band_map(wavelengths, rgb_targets);
      out.insert(out.end(), map.rgb_bands.begin(), map.rgb_bands.end());
    } else {
      int v = 0;
      auto res = std::from_chars(token.data(), token.data() + token.size(), v);
      if (token.empty() || res.ec != std::errc{} ||
          res.ptr != token.data() + token.size()) {
        throw UsageError("bad band index '" + std::string(token) + "'");
      }
      out.push_back(v);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0 || static_cast<std::size_t>(out[i]) >= wavelengths.size()) {
      throw UsageError("band index " + std::to_string(out[i]) +
                       " out of range [0, " +
                       std::to_string(wavelengths.size()) + ")");
    }
    if (std::find(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(i),
                  out[i]) != out.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw UsageError("duplicate band index " + std::to_string(out[i]));
    }
  }
  if (out.empty()) throw UsageError("empty band list");
  return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n == 0) return 0.0;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace bandsel
