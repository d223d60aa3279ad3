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

#include "dplr/core/text.h"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"

namespace dplr {

std::string_view StripWhitespace(std::string_view text) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

absl::StatusOr<double> ParseDouble(std::string_view text) {
  text = StripWhitespace(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("'%s' is not a number", std::string(text)));
  }
  return value;
}

absl::StatusOr<std::uint64_t> ParseUint(std::string_view text) {
  text = StripWhitespace(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    // Accept integral values written in floating form such as 1e5.
    absl::StatusOr<double> as_double = ParseDouble(text);
    if (as_double.ok() && *as_double >= 0.0 && *as_double < 0x1.0p64 &&
        static_cast<double>(static_cast<std::uint64_t>(*as_double)) ==
            *as_double) {
      return static_cast<std::uint64_t>(*as_double);
    }
    return absl::InvalidArgumentError(
        absl::StrFormat("'%s' is not a non-negative integer", std::string(text)));
  }
  return value;
}

absl::StatusOr<bool> ParseBool(std::string_view text) {
  text = StripWhitespace(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  return absl::InvalidArgumentError(
      absl::StrFormat("'%s' is not a boolean", std::string(text)));
}

absl::StatusOr<std::vector<double>> ParseDoubleList(std::string_view text) {
  std::vector<double> out;
  for (absl::string_view token : absl::StrSplit(absl::string_view(text.data(), text.size()), ',')) {
    absl::StatusOr<double> value = ParseDouble(std::string_view(token.data(), token.size()));
    if (!value.ok()) return value.status();
    out.push_back(*value);
  }
  return out;
}

absl::StatusOr<std::vector<std::uint64_t>> ParseUintList(
    std::string_view text) {
  std::vector<std::uint64_t> out;
  for (absl::string_view token : absl::StrSplit(absl::string_view(text.data(), text.size()), ',')) {
    absl::StatusOr<std::uint64_t> value = ParseUint(std::string_view(token.data(), token.size()));
    if (!value.ok()) return value.status();
    out.push_back(*value);
  }
  return out;
}

absl::Status WriteFileAtomically(const std::string& path,
                                 std::string_view content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      return absl::UnavailableError(
          absl::StrFormat("cannot open '%s' for writing", tmp));
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      return absl::UnavailableError(absl::StrFormat("write to '%s' failed", tmp));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    return absl::UnavailableError(absl::StrFormat(
        "cannot move '%s' to '%s': %s", tmp, path, ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrFormat("cannot open '%s'", path));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace dplr
