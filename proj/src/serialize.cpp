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

#include "bandsel/serialize.hpp"

#include <fstream>
#include <sstream>

#include "format.hpp"

namespace bandsel {

Json to_json(const ConfusionMatrix& m) {
  return Json{{"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}};
}

Json to_json(const EvalReport& r, std::span<const int> bands,
             std::span<const double> wavelengths) {
  Json j;
  if (!bands.empty()) j["bands"] = std::vector<int>(bands.begin(), bands.end());
  if (!wavelengths.empty()) {
    j["wavelengths_nm"] =
        std::vector<double>(wavelengths.begin(), wavelengths.end());
  }
  j["confusion"] = to_json(r.matrix);
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["healthy_acc"] = r.healthy_acc;
  j["infected_acc"] = r.infected_acc;
  j["overall_acc"] = r.overall_acc;
  return j;
}

Json to_json(const SvmConfig& c) {
  return Json{{"c", c.c},
              {"gamma", c.gamma},
              {"tol", c.tol},
              {"max_passes", c.max_passes},
              {"max_iters", c.max_iters}};
}

Json to_json(const GaConfig& c) {
  return Json{{"population", c.population},
              {"max_generations", c.max_generations},
              {"crossover_prob", c.crossover_prob},
              {"mutation_prob", c.mutation_prob},
              {"elite_count", c.elite_count},
              {"runs", c.runs},
              {"stall_window", c.stall_window},
              {"stall_tol", c.stall_tol},
              {"laplace_a", c.laplace_a},
              {"laplace_b", c.laplace_b},
              {"power_p", c.power_p},
              {"k", c.k},
              {"seed", c.seed}};
}

Json to_json(const SelectionSpec& s) {
  GaConfig ga = s.ga;
  ga.k = s.k;
  return Json{{"k", s.k},
              {"include_rgb", s.include_rgb},
              {"rgb_targets_nm", s.rgb_targets},
              {"cv_folds", s.cv_folds},
              {"fold_unit", s.fold_unit == FoldUnit::patch ? "patch" : "stem"},
              {"patch_width", s.patch_width},
              {"mask_threshold", s.features.mask ? Json(s.features.mask->threshold)
                                                 : Json(nullptr)},
              {"ga", to_json(ga)},
              {"svm", to_json(s.svm)}};
}

Json model_to_json(const SvmModel& model, std::span<const int> bands) {
  Json sv = Json::array();
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto row = model.support_vectors.row(i);
    sv.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return Json{{"kernel", "rbf"},
              {"config", to_json(model.config)},
              {"bands", std::vector<int>(bands.begin(), bands.end())},
              {"dim", model.dim()},
              {"bias", model.bias},
              {"converged", model.converged},
              {"iterations", model.iterations},
              {"dual_coefs", model.dual_coefs},
              {"support_vectors", sv}};
}

SvmModel model_from_json(const Json& doc, std::vector<int>* bands_out) {
  try {
    SvmModel m;
    const auto& c = doc.at("config");
    m.config.c = c.at("c").get<double>();
    m.config.gamma = c.at("gamma").get<double>();
    m.config.tol = c.at("tol").get<double>();
    m.config.max_passes = c.at("max_passes").get<int>();
    m.config.max_iters = c.at("max_iters").get<std::int64_t>();
    m.config.validate();
    m.bias = doc.at("bias").get<double>();
    m.converged = doc.value("converged", true);
    m.iterations = doc.value("iterations", std::int64_t{0});
    m.dual_coefs = doc.at("dual_coefs").get<std::vector<double>>();
    const auto dim = doc.at("dim").get<std::size_t>();
    const auto& sv = doc.at("support_vectors");
    if (sv.size() != m.dual_coefs.size()) {
      throw Error("support vector and coefficient counts differ");
    }
    m.support_vectors = SampleMatrix(sv.size(), dim);
    for (std::size_t i = 0; i < sv.size(); ++i) {
      const auto row = sv[i].get<std::vector<double>>();
      if (row.size() != dim) throw Error("support vector has wrong dimension");
      std::copy(row.begin(), row.end(), m.support_vectors.row(i).begin());
    }
    if (bands_out) *bands_out = doc.at("bands").get<std::vector<int>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed model document: ") + e.what());
  }
}

Json to_json(const EvaluationResult& r) {
  Json j;
  j["bands"] = r.bands;
  j["wavelengths_nm"] = r.wavelengths;
  j["patch_report"] = to_json(r.patch_report, r.bands, r.wavelengths);
  j["stem_report"] = to_json(r.stem_report, r.bands, r.wavelengths);
  if (r.early_report) {
    j["dai3_stem_report"] = to_json(*r.early_report, r.bands, r.wavelengths);
  }
  return j;
}

Json to_json(const SelectionResult& r, const SelectionSpec& spec) {
  Json j;
  j["bands"] = r.band_indices;
  j["wavelengths_nm"] = r.band_wavelengths;
  j["variable_bands"] = r.variable_bands;
  j["best_fitness"] = r.search.best.best.fitness.value_or(0.0);
  j["best_run"] = r.search.best.run;
  j["seed"] = spec.ga.seed;
  j["train_cv_report"] =
      to_json(r.train_cv_report, r.band_indices, r.band_wavelengths);
  j["test_report"] = to_json(r.test.patch_report, r.band_indices,
                             r.band_wavelengths);
  j["stem_report"] = to_json(r.test.stem_report, r.band_indices,
                             r.band_wavelengths);
  if (r.test.early_report) {
    j["dai3_stem_report"] = to_json(*r.test.early_report, r.band_indices,
                                    r.band_wavelengths);
  }
  Json runs = Json::array();
  for (const auto& run : r.search.runs) {
    runs.push_back({{"run", run.run},
                    {"best_fitness", run.best.fitness.value_or(0.0)},
                    {"best_bands", run.best.band_set()},
                    {"generations", run.history.size()},
                    {"evaluations", run.evaluations},
                    {"stalled", run.stalled}});
  }
  j["runs"] = runs;
  j["config"] = to_json(spec);
  return j;
}

Json to_json(const synth::GroundTruth& t) {
  return Json{{"planted_bands", t.planted_bands},
              {"band_halfwidth", t.band_halfwidth},
              {"attenuation", t.attenuation},
              {"mode", synth::to_string(t.mode)},
              {"noise_sd", t.noise_sd},
              {"patch_width", t.patch_width},
              {"patch_mean_sd", t.patch_mean_sd},
              {"wavelengths_nm", t.wavelengths},
              {"healthy_mean", t.healthy_mean},
              {"infected_mean", t.infected_mean}};
}

void write_lengths_csv(std::span<const StemPrediction> stems, std::ostream& out) {
  out << "stem_id,actual_interior_mm,predicted_mm\n";
  for (const auto& s : stems) {
    out << s.stem_id << ',' << detail::format_number(s.actual_mm) << ','
        << detail::format_number(s.predicted_mm) << '\n';
  }
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace bandsel
