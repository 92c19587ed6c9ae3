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

#include "bandsel/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>

#include "bandsel/common.hpp"
#include "bandsel/pipeline.hpp"
#include "bandsel/serialize.hpp"
#include "bandsel/synth.hpp"
#include "format.hpp"

namespace bandsel {
namespace {

namespace fs = std::filesystem;

struct GlobalFlags {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out = ".";
};

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const std::string token = text.substr(start, comma - start);
    int v = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || res.ec != std::errc{} ||
        res.ptr != token.data() + token.size()) {
      throw UsageError(std::string(flag) + ": bad integer '" + token + "'");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

FeatureOptions feature_options(const GlobalFlags& g,
                               const std::optional<float>& mask) {
  FeatureOptions f;
  if (mask) f.mask = kernels::PixelMask{*mask};
  f.backend = g.threads == 1 ? kernels::Backend::serial : kernels::Backend::openmp;
  f.threads = g.threads;
  return f;
}

fs::path prepare_out(const GlobalFlags& g) {
  const fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + g.out + ": " + ec.message());
  return dir;
}

std::vector<double> manifest_axis(const Manifest& m) {
  return read_cube_header(m.cube_file(m.records.front())).wavelengths;
}

void check_bands_in_range(std::span<const int> bands, std::size_t n_bands) {
  for (int b : bands) {
    if (b < 0 || static_cast<std::size_t>(b) >= n_bands) {
      throw UsageError("band index " + std::to_string(b) + " out of range [0, " +
                       std::to_string(n_bands) + ")");
    }
  }
}

std::string format_wavelengths(std::span<const double> wl) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2);
  for (std::size_t i = 0; i < wl.size(); ++i) s << (i ? ", " : "") << wl[i];
  return s.str();
}

// --- gen-synth --------------------------------------------------------------

struct SynthFlags {
  synth::SynthSpec spec;
  std::string planted;
  std::string mode = "localized";
  std::string dai = "3,6,9";
};

void add_synth_flags(CLI::App* cmd, SynthFlags& f) {
  auto& s = f.spec;
  cmd->add_option("--stems-train", s.n_stems_train, "Training stems")->capture_default_str();
  cmd->add_option("--stems-test", s.n_stems_test, "Test stems")->capture_default_str();
  cmd->add_option("--planted-bands", f.planted,
                  "Comma-separated discriminative band indices");
  cmd->add_option("--mode", f.mode, "localized or broad")
      ->check(CLI::IsMember({"localized", "broad"}))
      ->capture_default_str();
  cmd->add_option("--alpha", s.attenuation, "Lesion reflectance multiplier")->capture_default_str();
  cmd->add_option("--noise-sd", s.noise_sd, "Pixel noise sd")->capture_default_str();
  cmd->add_option("--rows", s.rows, "Cube rows")->capture_default_str();
  cmd->add_option("--cols", s.cols, "Cube columns")->capture_default_str();
  cmd->add_option("--bands", s.n_bands, "Spectral bands")->capture_default_str();
  cmd->add_option("--wavelength-lo", s.wavelength_lo, "First band (nm)")->capture_default_str();
  cmd->add_option("--wavelength-hi", s.wavelength_hi, "Last band (nm)")->capture_default_str();
  cmd->add_option("--halfwidth", s.band_halfwidth, "Planted window half-width (bands)")
      ->capture_default_str();
  cmd->add_option("--lesion-min", s.lesion_min_mm, "Shortest lesion (mm)")->capture_default_str();
  cmd->add_option("--lesion-max", s.lesion_max_mm, "Longest lesion (mm)")->capture_default_str();
  cmd->add_option("--dai", f.dai, "Comma-separated days after inoculation")->capture_default_str();
  cmd->add_option("--scale", s.scale_mm_per_px, "Millimetres per pixel")->capture_default_str();
}

int cmd_gen_synth(SynthFlags& f, const GlobalFlags& g, std::ostream& out) {
  auto& s = f.spec;
  s.planted_bands = parse_int_list(f.planted, "--planted-bands");
  s.dai_values = parse_int_list(f.dai, "--dai");
  s.mode = f.mode == "broad" ? synth::Mode::broad : synth::Mode::localized;
  if (s.mode == synth::Mode::localized && s.planted_bands.empty()) {
    throw UsageError("--planted-bands is required in localized mode");
  }
  s.seed = g.seed;
  s.threads = g.threads;
  s.validate();
  const auto result = synth::generate(s, prepare_out(g));
  out << result.manifest_path.string() << '\n';
  return kExitOk;
}

// --- shared model flags -----------------------------------------------------

struct ModelFlags {
  SvmConfig svm;
  int patch_width = 64;
  std::optional<float> mask;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--c", f.svm.c, "SVM penalty C")->capture_default_str();
  cmd->add_option("--gamma", f.svm.gamma, "RBF gamma")->capture_default_str();
  cmd->add_option("--svm-tol", f.svm.tol, "SMO KKT tolerance")->capture_default_str();
  cmd->add_option("--patch-width", f.patch_width, "Patch width (pixels)")->capture_default_str();
  cmd->add_option("--mask-threshold", f.mask,
                  "Ignore pixels whose mean reflectance is below this value");
}

// --- select-bands -----------------------------------------------------------

struct SelectFlags {
  std::string manifest;
  ModelFlags model;
  SelectionSpec spec;
  bool no_rgb = false;
  std::string fold_unit = "patch";
};

void add_select_flags(CLI::App* cmd, SelectFlags& f) {
  auto& s = f.spec;
  cmd->add_option("--manifest", f.manifest, "Manifest CSV")->required();
  cmd->add_option("--k", s.k, "Variable bands chosen by the GA")->capture_default_str();
  cmd->add_flag("--no-rgb", f.no_rgb, "Do not prepend the fixed RGB bands");
  cmd->add_option("--population", s.ga.population, "GA population")->capture_default_str();
  cmd->add_option("--generations", s.ga.max_generations, "Maximum generations")
      ->capture_default_str();
  cmd->add_option("--runs", s.ga.runs, "Independent GA runs")->capture_default_str();
  cmd->add_option("--crossover", s.ga.crossover_prob, "Crossover probability")
      ->capture_default_str();
  cmd->add_option("--mutation", s.ga.mutation_prob, "Mutation probability")
      ->capture_default_str();
  cmd->add_option("--elite", s.ga.elite_count, "Elite count")->capture_default_str();
  cmd->add_option("--stall-window", s.ga.stall_window, "Stall window (generations)")
      ->capture_default_str();
  cmd->add_option("--stall-tol", s.ga.stall_tol, "Stall tolerance")->capture_default_str();
  cmd->add_option("--laplace-a", s.ga.laplace_a, "Laplace crossover location")
      ->capture_default_str();
  cmd->add_option("--laplace-b", s.ga.laplace_b, "Laplace crossover scale")
      ->capture_default_str();
  cmd->add_option("--power-p", s.ga.power_p, "Power mutation index")->capture_default_str();
  cmd->add_option("--cv-folds", s.cv_folds, "Cross-validation folds")->capture_default_str();
  cmd->add_option("--fold-unit", f.fold_unit, "patch or stem")
      ->check(CLI::IsMember({"patch", "stem"}))
      ->capture_default_str();
  add_model_flags(cmd, f.model);
}

SelectionSpec finish_spec(SelectFlags& f, const GlobalFlags& g) {
  SelectionSpec s = f.spec;
  s.include_rgb = !f.no_rgb;
  s.fold_unit = f.fold_unit == "stem" ? FoldUnit::stem : FoldUnit::patch;
  s.svm = f.model.svm;
  s.patch_width = f.model.patch_width;
  s.features = feature_options(g, f.model.mask);
  s.ga.seed = g.seed;
  s.ga.threads = g.threads;
  s.ga.k = s.k;
  s.validate();
  return s;
}

int cmd_select(SelectFlags& f, const GlobalFlags& g, std::ostream& out) {
  const SelectionSpec spec = finish_spec(f, g);
  const Manifest manifest = read_manifest(f.manifest);
  const fs::path dir = prepare_out(g);
  const Dataset data = load_dataset(manifest, spec.patch_width, spec.features);
  const SelectionResult result = select_bands(data, spec);

  write_text(dir / "selection.json", to_json(result, spec).dump(2) + "\n");
  std::ostringstream history;
  write_history_csv(result.search.runs, history);
  write_text(dir / "history.csv", history.str());
  write_text(dir / "model.json",
             model_to_json(result.model, result.band_indices).dump(2) + "\n");
  out << "selected wavelengths (nm): "
      << format_wavelengths(result.band_wavelengths) << '\n';
  out << "train CV F1: " << detail::format_number(result.train_cv_report.f1)
      << ", test patch F1: " << detail::format_number(result.test.patch_report.f1)
      << ", test stem F1: " << detail::format_number(result.test.stem_report.f1)
      << '\n';
  return kExitOk;
}

// --- evaluate / predict-length ----------------------------------------------

struct EvaluateFlags {
  std::string manifest;
  std::string bands;
  std::string selection;
  std::string model_path;
  bool use_truth = false;
  ModelFlags model;
};

// Bands and model settings from --selection, or bands from --bands.
std::vector<int> resolve_bands(EvaluateFlags& f, const Manifest& manifest) {
  const auto axis = manifest_axis(manifest);
  if (!f.selection.empty()) {
    const Json doc = read_json(f.selection);
    std::vector<int> bands;
    try {
      bands = doc.at("bands").get<std::vector<int>>();
      const auto& cfg = doc.at("config");
      f.model.patch_width = cfg.at("patch_width").get<int>();
      const auto& svm = cfg.at("svm");
      f.model.svm.c = svm.at("c").get<double>();
      f.model.svm.gamma = svm.at("gamma").get<double>();
      f.model.svm.tol = svm.at("tol").get<double>();
      f.model.svm.max_passes = svm.at("max_passes").get<int>();
      f.model.svm.max_iters = svm.at("max_iters").get<std::int64_t>();
      if (cfg.contains("mask_threshold") && !cfg["mask_threshold"].is_null()) {
        f.model.mask = cfg["mask_threshold"].get<float>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(f.selection + ": malformed selection document: " + e.what());
    }
    check_bands_in_range(bands, axis.size());
    return bands;
  }
  return parse_band_list(f.bands, axis);
}

int cmd_evaluate(EvaluateFlags& f, const GlobalFlags& g, std::ostream& out) {
  f.model.svm.validate();
  const Manifest manifest = read_manifest(f.manifest);
  const auto bands = resolve_bands(f, manifest);
  f.model.svm.validate();
  const fs::path dir = prepare_out(g);
  const Dataset data =
      load_dataset(manifest, f.model.patch_width, feature_options(g, f.model.mask));
  const EvaluationResult result = evaluate_bands(data, bands, f.model.svm);
  write_text(dir / "report.json", to_json(result).dump(2) + "\n");
  out << "bands: " << detail::join(std::span<const int>(bands), ',')
      << "\npatch F1: " << detail::format_number(result.patch_report.f1)
      << ", stem F1: " << detail::format_number(result.stem_report.f1) << '\n';
  return kExitOk;
}

int cmd_predict_length(EvaluateFlags& f, const GlobalFlags& g, std::ostream& out) {
  f.model.svm.validate();
  const Manifest manifest = read_manifest(f.manifest);
  std::vector<int> bands;
  std::optional<SvmModel> model;
  if (!f.model_path.empty()) {
    model = model_from_json(read_json(f.model_path), &bands);
    check_bands_in_range(bands, manifest_axis(manifest).size());
  } else if (!f.use_truth) {
    bands = resolve_bands(f, manifest);
  }
  const fs::path dir = prepare_out(g);
  const Dataset data =
      load_dataset(manifest, f.model.patch_width, feature_options(g, f.model.mask));
  EvaluationResult result;
  if (f.use_truth) {
    const auto truth = data.test.labels();
    result = summarize(data, truth);
  } else if (model) {
    result = evaluate_model(data, *model, bands);
  } else {
    result = evaluate_bands(data, bands, f.model.svm);
  }
  std::ostringstream csv;
  write_lengths_csv(result.stems, csv);
  write_text(dir / "lengths.csv", csv.str());
  std::vector<double> actual, predicted;
  double abs_err = 0.0;
  for (const auto& s : result.stems) {
    actual.push_back(s.actual_mm);
    predicted.push_back(s.predicted_mm);
    abs_err += std::abs(s.actual_mm - s.predicted_mm);
  }
  const double mae = result.stems.empty() ? 0.0 : abs_err / result.stems.size();
  out << "mean absolute error (mm): " << detail::format_number(mae) << '\n';
  out << "pearson r: " << detail::format_number(pearson(actual, predicted)) << '\n';
  return kExitOk;
}

// --- spectrum ---------------------------------------------------------------

struct SpectrumFlags {
  std::string manifest;
  std::string split = "all";
  int patch_width = 64;
  std::optional<float> mask;
};

int cmd_spectrum(SpectrumFlags& f, const GlobalFlags& g, std::ostream& out) {
  if (f.patch_width < 1) throw UsageError("--patch-width must be >= 1");
  Manifest manifest = read_manifest(f.manifest);
  std::vector<StemRecord> kept;
  for (auto r : manifest.records) {
    if (f.split == "all" || to_string(r.split) == f.split) {
      r.split = Split::train;
      kept.push_back(std::move(r));
    }
  }
  if (kept.empty()) throw Error("no stems in split '" + f.split + "'");
  manifest.records = std::move(kept);
  const fs::path dir = prepare_out(g);
  const Dataset data =
      load_dataset(manifest, f.patch_width, feature_options(g, f.mask));
  const SpectrumCurves curves = mean_spectrum(data.train);
  std::ostringstream csv;
  write_spectrum_csv(curves, csv);
  write_text(dir / "spectrum.csv", csv.str());
  out << (dir / "spectrum.csv").string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Hyperspectral band selection with a GA-wrapped RBF SVM",
               "bandsel"};
  app.fallthrough();
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
  app.add_option("--threads", g.threads,
                 "Concurrent fitness evaluations (0 = auto, 1 = serial)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  SynthFlags synth_flags;
  auto* gen = app.add_subcommand("gen-synth", "Write a synthetic dataset");
  add_synth_flags(gen, synth_flags);

  SelectFlags select_flags;
  auto* sel = app.add_subcommand("select-bands", "Run GA band selection");
  add_select_flags(sel, select_flags);

  EvaluateFlags eval_flags;
  auto* ev = app.add_subcommand("evaluate", "Evaluate a fixed band set");
  ev->add_option("--manifest", eval_flags.manifest, "Manifest CSV")->required();
  auto* ev_bands = ev->add_option("--bands", eval_flags.bands,
                                  "'rgb' and/or comma-separated band indices");
  auto* ev_sel = ev->add_option("--selection", eval_flags.selection,
                                "selection.json from select-bands");
  ev_bands->excludes(ev_sel);
  add_model_flags(ev, eval_flags.model);

  EvaluateFlags length_flags;
  auto* pl = app.add_subcommand("predict-length", "Predict lesion lengths");
  pl->add_option("--manifest", length_flags.manifest, "Manifest CSV")->required();
  auto* pl_model = pl->add_option("--model", length_flags.model_path,
                                  "model.json from select-bands");
  auto* pl_bands = pl->add_option("--bands", length_flags.bands,
                                  "'rgb' and/or comma-separated band indices");
  auto* pl_sel = pl->add_option("--selection", length_flags.selection,
                                "selection.json from select-bands");
  auto* pl_truth = pl->add_flag("--use-truth", length_flags.use_truth,
                                "Use ground-truth patch labels as predictions");
  pl_model->excludes(pl_bands)->excludes(pl_sel)->excludes(pl_truth);
  pl_bands->excludes(pl_sel)->excludes(pl_truth);
  pl_sel->excludes(pl_truth);
  add_model_flags(pl, length_flags.model);

  SpectrumFlags spectrum_flags;
  auto* sp = app.add_subcommand("spectrum", "Mean healthy/infected spectra");
  sp->add_option("--manifest", spectrum_flags.manifest, "Manifest CSV")->required();
  sp->add_option("--split", spectrum_flags.split, "all, train or test")
      ->check(CLI::IsMember({"all", "train", "test"}))
      ->capture_default_str();
  sp->add_option("--patch-width", spectrum_flags.patch_width, "Patch width (pixels)")
      ->capture_default_str();
  sp->add_option("--mask-threshold", spectrum_flags.mask,
                 "Ignore pixels whose mean reflectance is below this value");

  std::vector<std::string> argv_store{"bandsel"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << " (see --help)\n";
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_gen_synth(synth_flags, g, out);
    if (*sel) return cmd_select(select_flags, g, out);
    if (*ev) {
      if (eval_flags.bands.empty() && eval_flags.selection.empty()) {
        throw UsageError("evaluate needs --bands or --selection");
      }
      return cmd_evaluate(eval_flags, g, out);
    }
    if (*pl) {
      if (length_flags.bands.empty() && length_flags.selection.empty() &&
          length_flags.model_path.empty() && !length_flags.use_truth) {
        throw UsageError(
            "predict-length needs --model, --bands, --selection or --use-truth");
      }
      return cmd_predict_length(length_flags, g, out);
    }
    if (*sp) return cmd_spectrum(spectrum_flags, g, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << " (see --help)\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace bandsel
