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

#include "bandsel/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <iterator>

#include "bandsel/common.hpp"
#include "bandsel/features.hpp"
#include "bandsel/serialize.hpp"
#include "support.hpp"

namespace bandsel {
namespace {

using testing::small_spec;
using testing::TempDir;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(Plan, CountsAndSplits) {
  auto spec = testing::desk_spec(7);
  const auto recs = synth::plan_stems(spec);
  ASSERT_EQ(recs.size(), 36u);
  int train = 0;
  for (const auto& r : recs) train += r.split == Split::train;
  EXPECT_EQ(train, 24);
}

TEST(Plan, TreatmentDaiAndLesionSlices) {
  const auto spec = testing::desk_spec(7);
  const auto recs = synth::plan_stems(spec);
  const double width = (spec.lesion_max_mm - spec.lesion_min_mm) / 3.0;
  bool saw_high = false;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    const std::size_t j = r.split == Split::train ? i : i - 24;
    EXPECT_EQ(r.treatment, j % 2 == 0 ? Treatment::inoculated : Treatment::mock);
    EXPECT_EQ(r.dai, spec.dai_values[(j / 2) % 3]);
    saw_high |= r.inoculation_end == InoculationEnd::high_col;
    if (r.treatment == Treatment::mock) {
      EXPECT_FALSE(r.interior_mm.has_value());
      continue;
    }
    const std::size_t slot = (j / 2) % 3;
    const double lo = spec.lesion_min_mm + width * slot;
    EXPECT_GE(*r.interior_mm, lo - spec.scale_mm_per_px / 2) << r.stem_id;
    EXPECT_LE(*r.interior_mm, lo + width + spec.scale_mm_per_px / 2) << r.stem_id;
    const double px = *r.interior_mm / spec.scale_mm_per_px;
    EXPECT_EQ(px, std::round(px)) << "lesion must be whole pixels";
  }
  EXPECT_TRUE(saw_high);
}

TEST(Plan, ZeroLesionRangeLabelsEverythingHealthy) {
  auto spec = small_spec();
  spec.lesion_min_mm = spec.lesion_max_mm = 0.0;
  for (const auto& r : synth::plan_stems(spec)) {
    for (const auto& p : labeled_patches(spec.cols, r, 64, spec.scale_mm_per_px)) {
      EXPECT_EQ(p.label, Label::healthy);
    }
  }
}

TEST(Validate, RejectsInfeasibleSpecs) {
  auto s = small_spec();
  EXPECT_NO_THROW(s.validate());
  s.planted_bands = {14};  // window reaches RGB band 15
  EXPECT_THROW(s.validate(), UsageError);
  s = small_spec();
  s.planted_bands.clear();
  EXPECT_THROW(s.validate(), UsageError);
  s.mode = synth::Mode::broad;
  EXPECT_NO_THROW(s.validate());
  s = small_spec();
  s.attenuation = 0.0;
  EXPECT_THROW(s.validate(), UsageError);
  s.attenuation = 1.2;
  EXPECT_THROW(s.validate(), UsageError);
  s = small_spec();
  s.noise_sd = -0.1;
  EXPECT_THROW(s.validate(), UsageError);
  s = small_spec();
  s.planted_bands = {60};
  EXPECT_THROW(s.validate(), UsageError);
}

TEST(BaseCurve, VegetationShape) {
  EXPECT_LT(synth::base_reflectance(500), 0.15);
  EXPECT_LT(synth::base_reflectance(650), 0.15);
  EXPECT_GT(synth::base_reflectance(900), 0.45);
  EXPECT_GT(synth::base_reflectance(550), synth::base_reflectance(500));
}

TEST(Factors, LocalizedAndBroad) {
  auto s = small_spec();
  const auto f = synth::infected_factors(s);
  for (int b = 0; b < 60; ++b) {
    const bool planted = std::abs(b - 35) <= 2 || std::abs(b - 45) <= 2 ||
                         std::abs(b - 55) <= 2;
    EXPECT_EQ(f[b], planted ? 0.7 : 1.0) << b;
  }
  s.mode = synth::Mode::broad;
  const auto g = synth::infected_factors(s);
  for (int b = 0; b < 60; ++b) {
    EXPECT_LT(g[b], 1.0);
    if (b == 35) EXPECT_LT(g[b], g[20]);
  }
  s.attenuation = 1.0;
  s.mode = synth::Mode::localized;
  for (double v : synth::infected_factors(s)) EXPECT_EQ(v, 1.0);
}

TEST(Describe, EchoesSpecAndMeans) {
  const auto s = small_spec();
  const auto t = synth::describe(s, 64);
  EXPECT_EQ(t.planted_bands, s.planted_bands);
  EXPECT_EQ(t.attenuation, 0.7);
  for (int p : s.planted_bands) {
    EXPECT_NEAR(t.infected_mean[p], 0.7 * t.healthy_mean[p], 1e-15);
  }
  EXPECT_NEAR(t.patch_mean_sd, 0.02 / std::sqrt(8.0 * 64.0), 1e-15);
}

TEST(Describe, HalfReflectanceAttenuates) {
  // The planted band sits where the base curve is near 0.5.
  auto s = small_spec();
  s.planted_bands = {58};
  const auto t = synth::describe(s, 64);
  EXPECT_NEAR(t.healthy_mean[58], 0.5, 0.03);
  EXPECT_NEAR(t.infected_mean[58], 0.7 * t.healthy_mean[58], 1e-15);
}

TEST(Describe, PatchMeanSdMatchesMonteCarlo) {
  auto s = small_spec(9);
  s.rows = 4;
  s.cols = 1024;
  const auto t = synth::describe(s, 16);
  const auto recs = synth::plan_stems(s);
  std::vector<double> devs;
  for (std::size_t i = 1; i < 8; i += 2) {  // mock stems
    const auto cube = synth::generate_cube(s, recs[i], i);
    PatchTable table;
    table.append(cube, make_patches(cube, recs[i], 16));
    for (std::size_t p = 0; p < table.size(); ++p) {
      for (int b : {2, 30, 50}) devs.push_back(table.spectrum(p)[b] - t.healthy_mean[b]);
    }
  }
  double ss = 0.0;
  for (double d : devs) ss += d * d;
  const double sd = std::sqrt(ss / static_cast<double>(devs.size()));
  EXPECT_NEAR(sd, t.patch_mean_sd, 0.1 * t.patch_mean_sd);
}

TEST(GenerateCube, LesionExtentMatchesPatchLabels) {
  auto s = small_spec(11);
  s.noise_sd = 0.0;
  const auto recs = synth::plan_stems(s);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto cube = synth::generate_cube(s, recs[i], i);
    const auto patches = labeled_patches(cube.cols, recs[i], 64, s.scale_mm_per_px);
    const double healthy35 = synth::base_reflectance(cube.wavelengths[35]);
    for (const auto& p : patches) {
      bool lesioned = false;
      for (std::uint32_t c = p.cols.begin; c < p.cols.end; ++c) {
        lesioned |= cube.at(0, c, 35) < static_cast<float>(healthy35) - 1e-6f;
      }
      EXPECT_EQ(lesioned, p.label == Label::infected)
          << recs[i].stem_id << " patch " << p.patch_index;
    }
  }
}

TEST(GenerateCube, DeterministicAndValid) {
  const auto s = small_spec(12);
  const auto rec = synth::plan_stems(s)[2];
  std::uint64_t clamped = 99;
  const auto a = synth::generate_cube(s, rec, 2, &clamped);
  const auto b = synth::generate_cube(s, rec, 2);
  EXPECT_EQ(a, b);
  EXPECT_NO_THROW(validate_cube(a));
  EXPECT_LT(clamped * 1000, a.reflectance.size());
}

TEST(Generate, WritesDatasetByteIdentically) {
  auto s = small_spec(13);
  s.n_stems_train = 4;
  s.n_stems_test = 2;
  TempDir d1, d2;
  const auto r1 = synth::generate(s, d1.path());
  s.threads = 3;
  synth::generate(s, d2.path());
  EXPECT_EQ(r1.manifest.records.size(), 6u);
  const auto m = read_manifest(r1.manifest_path);
  EXPECT_EQ(m.records, r1.manifest.records);
  for (const auto& rec : m.records) {
    EXPECT_EQ(slurp(d1.path() / rec.cube_path), slurp(d2.path() / rec.cube_path));
  }
  EXPECT_EQ(slurp(d1 / "manifest.csv"), slurp(d2 / "manifest.csv"));
  EXPECT_EQ(slurp(d1 / "truth.json"), slurp(d2 / "truth.json"));
  const auto truth = read_json(d1 / "truth.json");
  EXPECT_EQ(truth.at("planted_bands").get<std::vector<int>>(), s.planted_bands);
}

TEST(Generate, ExcessiveClampingIsAnError) {
  auto s = small_spec(14);
  s.n_stems_train = 1;
  s.n_stems_test = 0;
  s.noise_sd = 0.3;
  TempDir d;
  EXPECT_THROW(synth::generate(s, d.path()), Error);
}

}  // namespace
}  // namespace bandsel
