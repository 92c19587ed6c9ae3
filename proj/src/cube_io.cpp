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

#include "bandsel/cube_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "bandsel/common.hpp"

namespace bandsel {
namespace {

template <typename T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::little) {
    return value;
  } else {
    T out{};
    auto* src = reinterpret_cast<const unsigned char*>(&value);
    auto* dst = reinterpret_cast<unsigned char*>(&out);
    for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = src[sizeof(T) - 1 - i];
    return out;
  }
}

template <typename T>
void put(std::string& buf, T value) {
  const T le = to_little(value);
  buf.append(reinterpret_cast<const char*>(&le), sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& bytes, const std::filesystem::path& path)
      : bytes_(bytes), path_(path) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) {
      throw Error(path_.string() + ": truncated cube file");
    }
    T raw{};
    std::memcpy(&raw, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(raw);
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::string& bytes_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

CubeHeader parse_header(Reader& r, const std::filesystem::path& path) {
  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.get<std::uint8_t>());
  if (std::memcmp(magic, kCubeMagic, 4) != 0) {
    throw Error(path.string() + ": bad magic, not an HSC1 cube file");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCubeVersion) {
    throw Error(path.string() + ": unsupported cube version " +
                std::to_string(version));
  }
  CubeHeader h;
  h.rows = r.get<std::uint32_t>();
  h.cols = r.get<std::uint32_t>();
  h.n_bands = r.get<std::uint32_t>();
  if (h.rows == 0 || h.cols == 0 || h.n_bands == 0) {
    throw Error(path.string() + ": cube dimensions must be positive");
  }
  return h;
}

}  // namespace

void validate_cube(const DataCube& cube) {
  if (cube.rows == 0 || cube.cols == 0 || cube.n_bands == 0) {
    throw Error("cube dimensions must be positive");
  }
  if (cube.wavelengths.size() != cube.n_bands) {
    throw Error("dimension mismatch: header declares " +
                std::to_string(cube.n_bands) + " bands but " +
                std::to_string(cube.wavelengths.size()) +
                " wavelengths are present");
  }
  for (std::size_t i = 0; i < cube.wavelengths.size(); ++i) {
    if (!std::isfinite(cube.wavelengths[i])) {
      throw Error("wavelength " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(cube.wavelengths[i] > cube.wavelengths[i - 1])) {
      throw Error("wavelengths not strictly increasing at index " +
                  std::to_string(i));
    }
  }
  const std::uint64_t expected =
      std::uint64_t{cube.rows} * cube.cols * cube.n_bands;
  if (cube.reflectance.size() != expected) {
    throw Error("dimension mismatch: expected " + std::to_string(expected) +
                " reflectance samples, found " +
                std::to_string(cube.reflectance.size()));
  }
  for (std::size_t i = 0; i < cube.reflectance.size(); ++i) {
    const float v = cube.reflectance[i];
    if (!(v >= 0.0f && v <= 1.0f)) {
      const std::size_t band = i % cube.n_bands;
      const std::size_t col = (i / cube.n_bands) % cube.cols;
      const std::size_t row = i / (std::size_t{cube.n_bands} * cube.cols);
      std::ostringstream msg;
      msg << "reflectance " << v << " outside [0, 1] at (row " << row
          << ", col " << col << ", band " << band << ")";
      throw Error(msg.str());
    }
  }
}

DataCube make_cube(std::uint32_t rows, std::uint32_t cols,
                   std::vector<double> wavelengths,
                   std::vector<float> reflectance) {
  DataCube cube;
  cube.rows = rows;
  cube.cols = cols;
  cube.n_bands = static_cast<std::uint32_t>(wavelengths.size());
  cube.wavelengths = std::move(wavelengths);
  cube.reflectance = std::move(reflectance);
  validate_cube(cube);
  return cube;
}

std::vector<double> linear_wavelengths(double lo, double hi, std::uint32_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::uint32_t i = 0; i < n; ++i) out[i] = lo + step * i;
  out[n - 1] = hi;
  return out;
}

std::uint64_t cube_file_size(std::uint32_t rows, std::uint32_t cols,
                             std::uint32_t n_bands) {
  return kCubeFixedHeaderBytes + std::uint64_t{n_bands} * sizeof(double) +
         std::uint64_t{rows} * cols * n_bands * sizeof(float);
}

CubeHeader read_cube_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string head(kCubeFixedHeaderBytes, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  Reader r(head, path);
  CubeHeader h = parse_header(r, path);
  std::string axis(std::size_t{h.n_bands} * sizeof(double), '\0');
  in.read(axis.data(), static_cast<std::streamsize>(axis.size()));
  axis.resize(static_cast<std::size_t>(in.gcount()));
  Reader ar(axis, path);
  h.wavelengths.reserve(h.n_bands);
  for (std::uint32_t i = 0; i < h.n_bands; ++i) {
    h.wavelengths.push_back(std::bit_cast<double>(ar.get<std::uint64_t>()));
  }
  return h;
}

DataCube read_cube(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  Reader r(bytes, path);
  CubeHeader h = parse_header(r, path);
  if (bytes.size() != cube_file_size(h.rows, h.cols, h.n_bands)) {
    throw Error(path.string() + ": dimension mismatch: header declares " +
                std::to_string(h.rows) + "x" + std::to_string(h.cols) + "x" +
                std::to_string(h.n_bands) + " (" +
                std::to_string(cube_file_size(h.rows, h.cols, h.n_bands)) +
                " bytes) but file has " + std::to_string(bytes.size()) +
                " bytes");
  }
  DataCube cube;
  cube.rows = h.rows;
  cube.cols = h.cols;
  cube.n_bands = h.n_bands;
  cube.wavelengths.resize(h.n_bands);
  for (auto& w : cube.wavelengths) {
    w = std::bit_cast<double>(r.get<std::uint64_t>());
  }
  cube.reflectance.resize(std::size_t{h.rows} * h.cols * h.n_bands);
  for (auto& v : cube.reflectance) {
    v = std::bit_cast<float>(r.get<std::uint32_t>());
  }
  try {
    validate_cube(cube);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return cube;
}

void write_cube(const DataCube& cube, const std::filesystem::path& path) {
  validate_cube(cube);
  std::string buf;
  buf.reserve(cube_file_size(cube.rows, cube.cols, cube.n_bands));
  buf.append(kCubeMagic, 4);
  put(buf, kCubeVersion);
  put(buf, cube.rows);
  put(buf, cube.cols);
  put(buf, cube.n_bands);
  for (double w : cube.wavelengths) put(buf, std::bit_cast<std::uint64_t>(w));
  for (float v : cube.reflectance) put(buf, std::bit_cast<std::uint32_t>(v));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace bandsel
