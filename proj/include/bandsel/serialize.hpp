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

#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "bandsel/eval.hpp"
#include "bandsel/pipeline.hpp"
#include "bandsel/svm.hpp"
#include "bandsel/synth.hpp"

namespace bandsel {

using Json = nlohmann::ordered_json;

Json to_json(const ConfusionMatrix& m);
/// Counts plus all six metrics; bands/wavelengths are attached when given.
Json to_json(const EvalReport& r, std::span<const int> bands = {},
             std::span<const double> wavelengths = {});
Json to_json(const SvmConfig& c);
Json to_json(const GaConfig& c);
Json to_json(const SelectionSpec& s);

/// Model document: config, dimension, support vectors, dual coefficients,
/// bias, and the feature bands it was trained on.
Json model_to_json(const SvmModel& model, std::span<const int> bands);
/// Inverse of model_to_json; bands_out receives the stored band list.
SvmModel model_from_json(const Json& doc, std::vector<int>* bands_out = nullptr);

Json to_json(const EvaluationResult& r);
Json to_json(const SelectionResult& r, const SelectionSpec& spec);
Json to_json(const synth::GroundTruth& t);

/// stem_id,actual_interior_mm,predicted_mm
void write_lengths_csv(std::span<const StemPrediction> stems, std::ostream& out);

/// Reads a JSON document; throws Error on I/O or parse failure.
Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace bandsel
