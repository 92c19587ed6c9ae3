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


// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances are fixed here and must not be loosened.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bandsel/cli.hpp"
#include "bandsel/common.hpp"
#include "bandsel/cube_io.hpp"
#include "bandsel/eval.hpp"
#include "bandsel/features.hpp"
#include "bandsel/ga.hpp"
#include "bandsel/kernels.hpp"
#include "bandsel/pipeline.hpp"
#include "bandsel/rng.hpp"
#include "bandsel/svm.hpp"
#include "bandsel/synth.hpp"
#include "oracles/dual_qp.hpp"
#include "support.hpp"

namespace {

using namespace bandsel;
namespace fs = std::filesystem;

// Collects failed sub-checks of one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s << what << ": got " << got << ", want " << want << " +- " << tol;
    expect(std::abs(got - want) <= tol, s.str());
  }
  void note(const std::string& text) { notes_.push_back(text); }
  bool ok() const { return failures_.empty(); }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(double v, int prec = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(prec);
  s << v;
  return s.str();
}

ConfusionMatrix cm(std::int64_t tp, std::int64_t fp, std::int64_t fn,
                   std::int64_t tn) {
  return ConfusionMatrix{tp, fp, fn, tn};
}

// --- 1, 2: metric oracles ----------------------------------------------------

void criterion1(Check& c) {
  const auto six = metrics(cm(18, 1, 0, 20));
  c.near(six.precision, 0.947, 0.001, "6-band precision");
  c.near(six.recall, 1.0, 1e-12, "6-band recall");
  c.near(six.f1, 0.973, 0.001, "6-band F1");
  c.near(six.overall_acc, 97.4, 0.1, "6-band overall accuracy");
  const auto rgb = metrics(cm(17, 8, 1, 13));
  c.near(rgb.f1, 0.79, 0.005, "RGB F1");
  c.near(rgb.overall_acc, 76.92, 0.01, "RGB overall accuracy");
}

void criterion2(Check& c) {
  const auto r = metrics(cm(5, 1, 0, 5));
  c.near(r.precision, 0.833, 0.001, "precision");
  c.near(r.recall, 1.0, 1e-12, "recall");
  c.near(r.f1, 0.909, 0.001, "F1");
  c.near(r.overall_acc, 90.91, 0.01, "overall accuracy");
}

// --- 3: SVM ------------------------------------------------------------------

void criterion3(Check& c) {
  double worst = 0.0;
  int problems = 0;
  for (std::size_t n : {10u, 25u, 50u, 100u}) {
    for (double pen : {1.0, 10.0, 1000.0}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        Rng rng(seed * 977 + n);
        SampleMatrix x(n, 2);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
          y[i] = i % 2 == 0 ? 1 : -1;
          x.row(i)[0] = standard_normal(rng) + y[i];
          x.row(i)[1] = standard_normal(rng);
        }
        std::vector<double> gram(n * n);
        kernels::rbf_gram_serial(x, 1.0, gram);
        // The default KKT tolerance (1e-3) stops up to ~3e-6 short of the
        // optimum on these problems; compare at a tolerance that implies 1e-6.
        SvmConfig cfg;
        cfg.c = pen;
        cfg.tol = 1e-6;
        const auto sol = solve_dual(gram, y, cfg);
        const auto ref = oracle::solve_dual_ipm(gram, y, pen);
        const double rel = std::abs(dual_objective(gram, y, sol.alpha) - ref.objective) /
                           std::abs(ref.objective);
        worst = std::max(worst, rel);
        ++problems;
      }
    }
  }
  c.expect(worst <= 1e-6, "dual objective relative gap " + std::to_string(worst) +
                              " exceeds 1e-6");
  c.note(std::to_string(problems) + " problems, worst relative gap " + fmt(worst * 1e9, 3) +
         "e-9");

  SampleMatrix xor4(4, 2);
  const double pts[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  for (int i = 0; i < 4; ++i) std::copy(pts[i], pts[i] + 2, xor4.row(i).begin());
  const std::vector<Label> labels{Label::healthy, Label::healthy, Label::infected,
                                  Label::infected};
  SvmConfig cfg;
  cfg.c = 1000.0;
  cfg.gamma = 1.0;
  const auto model = train(xor4, labels, cfg);
  for (int i = 0; i < 4; ++i) {
    c.expect(predict(model, xor4.row(i)) == labels[i],
             "XOR point " + std::to_string(i) + " misclassified");
  }
}

// --- 4, 5: GA ----------------------------------------------------------------

void criterion4(Check& c) {
  const SearchSpace space{240, {34, 61, 99}};
  GaConfig cfg;
  cfg.crossover_prob = 1.0;
  Rng rng(41);
  int moved = 0;
  for (int t = 0; t < 1000; ++t) {
    Chromosome p;
    p.genes = {uniform01(rng) * 239, uniform01(rng) * 239, uniform01(rng) * 239};
    repair(p, space);
    const auto [c1, c2] = laplace_crossover(p, p, cfg, space, rng);
    moved += c1.genes != p.genes || c2.genes != p.genes;
  }
  c.expect(moved == 0, std::to_string(moved) + " identical-parent crossovers changed genes");

  int down = 0;
  for (int t = 0; t < 100000; ++t) {
    down += power_step(0.0, 0.0, 239.0, uniform01(rng), uniform01(rng), 4.0) < 0.0;
  }
  c.expect(down == 0, std::to_string(down) + " mutations moved below the lower bound");

  std::vector<Chromosome> pop(2);
  pop[0].fitness = 0.2;
  pop[1].fitness = 0.8;
  int wins = 0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) wins += &tournament_select(pop, rng) == &pop[1];
  const double rate = static_cast<double>(wins) / trials;
  c.near(rate, 0.75, 0.01, "tournament win rate");
  c.note("tournament win rate " + fmt(rate, 4));
}

void criterion5(Check& c) {
  const SearchSpace space{8, {}};
  const std::vector<int> target{0, 3, 7};
  const FitnessFn needle = [&](std::span<const int> b) {
    return std::equal(b.begin(), b.end(), target.begin(), target.end()) ? 1.0 : 0.0;
  };
  int solved = 0;
  bool monotone = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GaConfig cfg;
    cfg.seed = seed;
    cfg.max_generations = 100;
    cfg.runs = 1;
    const auto run = evolve(needle, cfg, space);
    solved += run.best.band_set() == target && run.history.size() <= 101;
    for (std::size_t g = 1; g < run.history.size(); ++g) {
      monotone &= run.history[g].best_fitness >= run.history[g - 1].best_fitness;
    }
  }
  c.expect(solved >= 4, "needle solved in " + std::to_string(solved) + "/5 seeds");
  c.expect(monotone, "best-fitness trace decreased");

  // A graded objective exercises elitism over full-length runs.
  const SearchSpace wide{240, {34, 61, 99}};
  const FitnessFn graded = [](std::span<const int> b) {
    const int t[3] = {40, 120, 200};
    double s = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) s -= std::abs(b[i] - t[i]);
    return s;
  };
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GaConfig cfg;
    cfg.seed = seed;
    cfg.stall_window = 1000;
    const auto res = multi_run(graded, cfg, wide);
    for (const auto& run : res.runs) {
      for (std::size_t g = 1; g < run.history.size(); ++g) {
        c.expect(run.history[g].best_fitness >= run.history[g - 1].best_fitness,
                 "graded objective best fitness decreased at seed " +
                     std::to_string(seed));
      }
    }
  }
  c.note("needle solved in " + std::to_string(solved) + "/5 seeds");
}

// --- 6, 7, 8: end-to-end on desk-scale synthetic data ------------------------

constexpr std::uint64_t kDataSeed = 7;
const std::vector<int> kPlanted{40, 120, 200};

struct EndToEnd {
  Dataset data;
  std::vector<SelectionResult> runs;  // one per master seed 1..5
  EvaluationResult rgb;
};

EndToEnd& end_to_end() {
  static EndToEnd e = [] {
    EndToEnd out;
    out.data = testing::synth_dataset(testing::desk_spec(kDataSeed));
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SelectionSpec spec;
      spec.ga.seed = seed;
      out.runs.push_back(select_bands(out.data, spec));
    }
    out.rgb = evaluate_bands(out.data, fixed_bands(SelectionSpec{}, out.data.wavelengths()),
                             SvmConfig{});
    return out;
  }();
  return e;
}

int planted_hits(std::span<const int> variable) {
  int hits = 0;
  for (int p : kPlanted) {
    hits += std::any_of(variable.begin(), variable.end(),
                        [p](int v) { return std::abs(v - p) <= 2; });
  }
  return hits;
}

void criterion6(Check& c) {
  const auto& e = end_to_end();
  int recovered = 0, stem_ok = 0;
  for (std::size_t i = 0; i < e.runs.size(); ++i) {
    const auto& r = e.runs[i];
    const int hits = planted_hits(r.variable_bands);
    recovered += hits >= 2;
    stem_ok += r.test.stem_report.f1 >= 0.95;
    std::ostringstream s;
    s << "seed " << i + 1 << ": variable bands";
    for (int b : r.variable_bands) s << ' ' << b;
    s << ", planted hits " << hits << "/3, train CV F1 " << fmt(r.train_cv_report.f1)
      << ", stem F1 " << fmt(r.test.stem_report.f1);
    c.note(s.str());
  }
  c.expect(recovered >= 4, "planted-band recovery in " + std::to_string(recovered) +
                               "/5 seeds (need 4)");
  c.expect(stem_ok >= 4, "stem F1 >= 0.95 in " + std::to_string(stem_ok) +
                             "/5 seeds (need 4)");
}

void criterion7(Check& c) {
  const auto& e = end_to_end();
  for (std::size_t i = 0; i < e.runs.size(); ++i) {
    const double sel = e.runs[i].test.patch_report.f1;
    c.expect(e.rgb.patch_report.f1 <= sel - 0.15,
             "seed " + std::to_string(i + 1) + ": RGB patch F1 " +
                 fmt(e.rgb.patch_report.f1) + " not 0.15 below selected " + fmt(sel));
  }
  c.note("RGB patch F1 " + fmt(e.rgb.patch_report.f1) + ", selected patch F1 seed 1 " +
         fmt(e.runs.front().test.patch_report.f1));
}

void criterion8(Check& c) {
  const auto& e = end_to_end();
  for (std::size_t i = 0; i < e.runs.size(); ++i) {
    const auto& early = e.runs[i].test.early_report;
    c.expect(early.has_value(), "no dai-3 stems in the test split");
    if (!early) return;
    c.expect(early->f1 >= 0.85, "seed " + std::to_string(i + 1) + ": dai-3 stem F1 " +
                                    fmt(early->f1));
    if (i == 0) {
      c.note("dai-3 stems " + std::to_string(early->matrix.total()) + ", F1 " +
             fmt(early->f1));
    }
  }
}

// --- 9: lesion length ---------------------------------------------------------

void criterion9(Check& c) {
  // 24 train / 36 test stems from the same generator.
  const Dataset data = testing::synth_dataset(testing::desk_spec(kDataSeed, 24, 36));
  const double patch_mm = data.patch_width * data.scale_mm_per_px;

  const auto truth = summarize(data, data.test.labels());
  for (const auto& s : truth.stems) {
    const double want = std::ceil(s.actual_mm / patch_mm) * patch_mm;
    const double tiled = (data.test.size() / data.test_stems.size()) * patch_mm;
    c.expect(s.predicted_mm >= std::min(s.actual_mm, tiled) &&
                 s.predicted_mm - std::min(s.actual_mm, tiled) <= patch_mm &&
                 std::abs(s.predicted_mm - std::min(want, tiled)) < 1e-9,
             s.stem_id + ": truth-label length " + fmt(s.predicted_mm) + " vs actual " +
                 fmt(s.actual_mm));
  }

  const auto& sel = end_to_end().runs.front();
  const auto model = evaluate_bands(data, sel.band_indices, SvmConfig{});
  std::vector<double> actual, predicted;
  for (const auto& s : model.stems) {
    actual.push_back(s.actual_mm);
    predicted.push_back(s.predicted_mm);
  }
  const double r = pearson(actual, predicted);
  c.expect(model.stems.size() >= 30, "fewer than 30 stems");
  c.expect(r >= 0.9, "model Pearson r " + fmt(r));
  c.note(std::to_string(model.stems.size()) + " stems, model Pearson r " + fmt(r, 4));

  // One false positive at the far end inflates a short lesion to the full
  // tiled length.
  const auto& stem = *std::min_element(
      data.test_stems.begin(), data.test_stems.end(), [](const auto& a, const auto& b) {
        return a.record.interior_or_zero() < b.record.interior_or_zero();
      });
  auto labels = data.test.labels();
  std::vector<Label> preds(labels.begin() + stem.begin, labels.begin() + stem.end);
  const double before = predict_length(preds, data.patch_width, data.scale_mm_per_px);
  preds.back() = Label::infected;
  const double after = predict_length(preds, data.patch_width, data.scale_mm_per_px);
  c.expect(after == preds.size() * patch_mm, "far-end false positive length " + fmt(after));
  c.expect(after - stem.record.interior_or_zero() > 2 * patch_mm,
           "far-end false positive did not overestimate");
  c.note("far-end false positive: " + fmt(before, 1) + " mm -> " + fmt(after, 1) +
         " mm (actual " + fmt(stem.record.interior_or_zero(), 1) + " mm)");
}

// --- 10: determinism and invariants ------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

// Runs every command twice into out_a and out_b.
void cli_determinism(Check& c, const fs::path& root) {
  for (const char* tag : {"a", "b"}) {
    const fs::path base = root / tag;
    const std::string data = (base / "data").string();
    const std::string manifest = (base / "data" / "manifest.csv").string();
    const std::string sel = (base / "sel" / "selection.json").string();
    c.expect(cli({"--seed", "11", "--out", data, "gen-synth", "--stems-train", "12",
                  "--stems-test", "6", "--rows", "8", "--cols", "256", "--bands", "60",
                  "--planted-bands", "35,45,55"}) == 0,
             "gen-synth failed");
    c.expect(cli({"--seed", "4", "--out", (base / "sel").string(), "select-bands",
                  "--manifest", manifest, "--population", "20", "--generations", "10",
                  "--runs", "2"}) == 0,
             "select-bands failed");
    c.expect(cli({"--out", (base / "eval").string(), "evaluate", "--manifest", manifest,
                  "--selection", sel}) == 0,
             "evaluate failed");
    c.expect(cli({"--out", (base / "len").string(), "predict-length", "--manifest",
                  manifest, "--model", (base / "sel" / "model.json").string()}) == 0,
             "predict-length failed");
    c.expect(cli({"--out", (base / "spec").string(), "spectrum", "--manifest", manifest}) ==
                 0,
             "spectrum failed");
  }
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root / "a");
    c.expect(slurp(e.path()) == slurp(root / "b" / rel), "rerun differs: " + rel.string());
    ++files;
  }
  c.note(std::to_string(files) + " output files byte-identical across reruns");
}

int uniform_int(std::mt19937_64& g, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(g);
}

void invariants(Check& c, const fs::path& root) {
  constexpr int kCases = 1000;
  std::mt19937_64 g(2026);

  int bad = 0;
  for (int t = 0; t < kCases; ++t) {
    const auto rows = static_cast<std::uint32_t>(uniform_int(g, 1, 4));
    const auto cols = static_cast<std::uint32_t>(uniform_int(g, 1, 24));
    const auto bands = static_cast<std::uint32_t>(uniform_int(g, 1, 10));
    std::vector<float> r(std::size_t{rows} * cols * bands);
    for (auto& v : r) v = std::uniform_real_distribution<float>(0.0f, 1.0f)(g);
    const DataCube cube = make_cube(rows, cols, linear_wavelengths(400, 900, bands), r);
    const fs::path p = root / "roundtrip.hsc";
    write_cube(cube, p);
    const DataCube back = read_cube(p);
    bad += !(back.rows == rows && back.cols == cols && back.n_bands == bands &&
             std::memcmp(back.reflectance.data(), r.data(), r.size() * sizeof(float)) == 0 &&
             back.wavelengths == cube.wavelengths);
  }
  c.expect(bad == 0, std::to_string(bad) + " cube round trips not bit-exact");

  bad = 0;
  for (int t = 0; t < kCases; ++t) {
    const auto cols = static_cast<std::uint32_t>(uniform_int(g, 1, 2000));
    const int w = uniform_int(g, 1, static_cast<int>(cols));
    StemRecord rec;
    rec.inoculation_end = uniform_int(g, 0, 1) ? InoculationEnd::high_col
                                               : InoculationEnd::low_col;
    const auto ps = make_patches(cols, rec, w);
    std::vector<int> cover(cols, 0);
    bool ok = ps.size() == cols / w;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      ok &= ps[i].cols.size() == static_cast<std::uint32_t>(w);
      const std::uint32_t off = rec.inoculation_end == InoculationEnd::low_col
                                    ? ps[i].cols.begin
                                    : cols - ps[i].cols.end;
      ok &= off == i * static_cast<std::uint32_t>(w);
      for (auto col = ps[i].cols.begin; col < ps[i].cols.end; ++col) ok &= ++cover[col] == 1;
    }
    bad += !ok;
  }
  c.expect(bad == 0, std::to_string(bad) + " patch tilings violated");

  bad = 0;
  for (int t = 0; t < kCases; ++t) {
    StemRecord rec;
    rec.treatment = Treatment::inoculated;
    rec.interior_mm = std::uniform_real_distribution<double>(0.0, 500.0)(g);
    const double scale = std::uniform_real_distribution<double>(0.05, 1.0)(g);
    const int w = uniform_int(g, 1, 128);
    const auto ps = labeled_patches(static_cast<std::uint32_t>(uniform_int(g, w, 3000)),
                                    rec, w, scale);
    std::size_t k = 0;
    while (k < ps.size() && ps[k].label == Label::infected) ++k;
    bool ok = true;
    for (std::size_t i = k; i < ps.size(); ++i) ok &= ps[i].label == Label::healthy;
    bad += !ok;
  }
  c.expect(bad == 0, std::to_string(bad) + " label prefixes violated");

  bad = 0;
  for (int t = 0; t < kCases; ++t) {
    CvOptions opt;
    opt.k = uniform_int(g, 2, 10);
    opt.seed = g();
    opt.unit = uniform_int(g, 0, 1) ? FoldUnit::stem : FoldUnit::patch;
    std::vector<Label> labels;
    std::vector<std::string> groups;
    const int stems = uniform_int(g, opt.k, 30);
    for (int s = 0; s < stems; ++s) {
      const int n = uniform_int(g, 1, 5), lesion = uniform_int(g, -2, n);
      for (int p = 0; p < n; ++p) {
        labels.push_back(p < lesion ? Label::infected : Label::healthy);
        groups.push_back("s" + std::to_string(s));
      }
    }
    const auto folds = assign_folds(labels, groups, opt);
    std::map<std::string, std::set<int>> unit_folds;
    std::map<std::string, bool> unit_inf;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto u = opt.unit == FoldUnit::stem ? groups[i] : std::to_string(i);
      unit_folds[u].insert(folds[i]);
      unit_inf[u] = unit_inf[u] || labels[i] == Label::infected;
    }
    std::vector<int> inf(opt.k, 0), hea(opt.k, 0);
    bool ok = true;
    for (const auto& [u, fs_] : unit_folds) {
      ok &= fs_.size() == 1 && *fs_.begin() >= 0 && *fs_.begin() < opt.k;
      (unit_inf[u] ? inf : hea)[*fs_.begin()]++;
    }
    const auto spread = [](const std::vector<int>& v) {
      return *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
    };
    std::vector<int> tot(opt.k);
    for (int f = 0; f < opt.k; ++f) tot[f] = inf[f] + hea[f];
    ok &= spread(inf) <= 1 && spread(hea) <= 1 && spread(tot) <= 1;
    bad += !ok;
  }
  c.expect(bad == 0, std::to_string(bad) + " fold partitions violated");

  bad = 0;
  for (int t = 0; t < kCases; ++t) {
    const auto bands = static_cast<std::uint32_t>(uniform_int(g, 1, 12));
    const auto cols = static_cast<std::uint32_t>(uniform_int(g, 2, 40));
    const auto rows = static_cast<std::uint32_t>(uniform_int(g, 1, 5));
    std::vector<float> r(std::size_t{rows} * cols * bands);
    for (auto& v : r) v = std::uniform_real_distribution<float>(0.0f, 1.0f)(g);
    const DataCube cube = make_cube(rows, cols, linear_wavelengths(400, 900, bands), r);
    const auto ps = make_patches(cube, StemRecord{}, uniform_int(g, 1, static_cast<int>(cols)));
    std::vector<int> idx(bands);
    std::iota(idx.begin(), idx.end(), 0);
    for (const auto& f : extract_features(cube, ps, idx)) {
      for (double v : f.values) bad += !(v >= 0.0 && v <= 1.0);
    }
  }
  c.expect(bad == 0, std::to_string(bad) + " features outside [0, 1]");
  c.note("5 invariants x 1000 randomized cases");
}

void criterion10(Check& c) {
  testing::TempDir dir;
  cli_determinism(c, dir.path());
  invariants(c, dir.path());
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "metric oracle, six-band and RGB rows", criterion1},
      {2, "metric oracle, early-detection row", criterion2},
      {3, "SMO matches dual-QP oracle; XOR-4", criterion3},
      {4, "GA operator laws", criterion4},
      {5, "GA needle search and elitism", criterion5},
      {6, "end-to-end planted band recovery", criterion6},
      {7, "RGB-vs-selected patch F1 gap", criterion7},
      {8, "dai-3 stem F1", criterion8},
      {9, "lesion length prediction", criterion9},
      {10, "determinism and invariants", criterion10},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (check.ok() ? "PASS" : "FAIL") << "  criterion " << cr.id << ": "
              << cr.name << " (" << fmt(secs, 1) << " s)\n";
    for (const auto& n : check.notes()) std::cout << "      " << n << '\n';
    for (const auto& f : check.failures()) std::cout << "      failed: " << f << '\n';
    std::cout.flush();
    failed += !check.ok();
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << '\n';
  return failed == 0 ? 0 : 1;
}
