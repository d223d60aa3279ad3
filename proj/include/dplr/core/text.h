// Copyright 2026 The dplr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPLR_CORE_TEXT_H_
#define DPLR_CORE_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dplr {

// Locale-independent number parsing; the whole token must be consumed.
absl::StatusOr<double> ParseDouble(std::string_view text);
absl::StatusOr<std::uint64_t> ParseUint(std::string_view text);
absl::StatusOr<bool> ParseBool(std::string_view text);
// Comma-separated list; surrounding whitespace is ignored.
absl::StatusOr<std::vector<double>> ParseDoubleList(std::string_view text);
absl::StatusOr<std::vector<std::uint64_t>> ParseUintList(std::string_view text);

std::string_view StripWhitespace(std::string_view text);

// Writes to `path + ".tmp"` and renames over `path`.
absl::Status WriteFileAtomically(const std::string& path,
                                 std::string_view content);
absl::StatusOr<std::string> ReadFile(const std::string& path);

}  // namespace dplr

#endif  // DPLR_CORE_TEXT_H_
