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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bandsel {

/// Binary class used everywhere in the library. `infected` is the positive
/// class for every metric and for the SVM sign convention (+1).
enum class Label : std::uint8_t { healthy = 0, infected = 1 };

inline constexpr int sign_of(Label l) { return l == Label::infected ? 1 : -1; }

inline constexpr std::string_view to_string(Label l) {
  return l == Label::infected ? "infected" : "healthy";
}

/// Malformed or inconsistent data: bad files, violated invariants, I/O.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user-supplied arguments (flags, band lists, configuration values).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace bandsel
