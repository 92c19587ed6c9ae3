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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bandsel/common.hpp"
#include "bandsel/cube_io.hpp"
#include "format.hpp"

namespace bandsel {
namespace {

using detail::format_number;

constexpr std::string_view kScalePrefix = "# scale_mm_per_px=";

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct RowContext {
  std::size_t line_no;
  std::string stem_id;

  [[noreturn]] void fail(const std::string& what) const {
    std::string msg = "manifest line " + std::to_string(line_no);
    if (!stem_id.empty()) msg += " (stem " + stem_id + ")";
    throw Error(msg + ": " + what);
  }
};

double parse_double(const std::string& s, const char* field,
                    const RowContext& ctx) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
    ctx.fail(std::string("non-numeric ") + field + " '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, const char* field, const RowContext& ctx) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    ctx.fail(std::string("non-integer ") + field + " '" + s + "'");
  }
  return v;
}

std::optional<double> parse_length(const std::string& s, const char* field,
                                   const RowContext& ctx) {
  if (s.empty()) return std::nullopt;
  const double v = parse_double(s, field, ctx);
  if (v < 0.0) ctx.fail(std::string(field) + " must be >= 0");
  return v;
}

}  // namespace

std::string_view to_string(Treatment t) {
  return t == Treatment::inoculated ? "inoculated" : "mock";
}
std::string_view to_string(Split s) {
  return s == Split::train ? "train" : "test";
}
std::string_view to_string(InoculationEnd e) {
  return e == InoculationEnd::low_col ? "low_col" : "high_col";
}

std::size_t Manifest::count(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(),
                    [split](const StemRecord& r) { return r.split == split; }));
}

std::filesystem::path Manifest::cube_file(const StemRecord& record) const {
  const std::filesystem::path p(record.cube_path);
  return p.is_absolute() ? p : base_dir / p;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());

  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.emplace_back(n, line);
  }
  if (lines.empty()) throw Error(path.string() + ": no records");

  Manifest m;
  m.base_dir = path.parent_path();
  std::size_t next = 0;
  if (!lines[0].second.starts_with(kScalePrefix)) {
    throw Error(path.string() + ": first line must be '" +
                std::string(kScalePrefix) + "<value>'");
  }
  {
    const RowContext ctx{lines[0].first, {}};
    m.scale_mm_per_px = parse_double(
        lines[0].second.substr(kScalePrefix.size()), "scale_mm_per_px", ctx);
    if (!(m.scale_mm_per_px > 0.0)) ctx.fail("scale_mm_per_px must be > 0");
    ++next;
  }
  if (next >= lines.size() || lines[next].second != kManifestHeader) {
    throw Error(path.string() + ": missing or unexpected CSV header; expected '" +
                std::string(kManifestHeader) + "'");
  }
  ++next;

  std::set<std::string> seen;
  for (; next < lines.size(); ++next) {
    RowContext ctx{lines[next].first, {}};
    const auto f = split_csv(lines[next].second);
    if (f.size() != 11) {
      ctx.fail("expected 11 fields, found " + std::to_string(f.size()));
    }
    StemRecord r;
    r.stem_id = f[0];
    ctx.stem_id = r.stem_id;
    if (r.stem_id.empty()) ctx.fail("empty stem_id");
    if (!seen.insert(r.stem_id).second) ctx.fail("duplicate stem_id");
    r.cube_path = f[1];
    if (r.cube_path.empty()) ctx.fail("empty cube_path");
    r.genotype = f[2];
    if (f[3] == "inoculated") {
      r.treatment = Treatment::inoculated;
    } else if (f[3] == "mock") {
      r.treatment = Treatment::mock;
    } else {
      ctx.fail("unknown treatment '" + f[3] + "'");
    }
    r.dai = parse_int(f[4], "dai", ctx);
    if (r.dai < 0) ctx.fail("dai must be >= 0");
    r.interior_mm = parse_length(f[5], "interior_mm", ctx);
    r.exterior_mm = parse_length(f[6], "exterior_mm", ctx);
    r.dead_mm = parse_length(f[7], "dead_mm", ctx);
    if (r.treatment == Treatment::inoculated && !r.interior_mm) {
      ctx.fail("inoculated stem is missing interior_mm");
    }
    r.replication = parse_int(f[8], "replication", ctx);
    if (f[9] == "train") {
      r.split = Split::train;
    } else if (f[9] == "test") {
      r.split = Split::test;
    } else {
      ctx.fail("unknown split '" + f[9] + "'");
    }
    if (f[10] == "low_col") {
      r.inoculation_end = InoculationEnd::low_col;
    } else if (f[10] == "high_col") {
      r.inoculation_end = InoculationEnd::high_col;
    } else {
      ctx.fail("unknown inoculation_end '" + f[10] + "'");
    }
    m.records.push_back(std::move(r));
  }
  if (m.records.empty()) throw Error(path.string() + ": no records");
  return m;
}

void write_manifest(const Manifest& manifest,
                    const std::filesystem::path& path) {
  auto opt = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
  };
  std::ostringstream out;
  out << kScalePrefix << format_number(manifest.scale_mm_per_px) << '\n';
  out << kManifestHeader << '\n';
  for (const auto& r : manifest.records) {
    out << r.stem_id << ',' << r.cube_path << ',' << r.genotype << ','
        << to_string(r.treatment) << ',' << r.dai << ',' << opt(r.interior_mm)
        << ',' << opt(r.exterior_mm) << ',' << opt(r.dead_mm) << ','
        << r.replication << ',' << to_string(r.split) << ','
        << to_string(r.inoculation_end) << '\n';
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot write manifest " + path.string());
  f << out.str();
  if (!f) throw Error("write failed for " + path.string());
}

}  // namespace bandsel
