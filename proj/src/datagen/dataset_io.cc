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

#include "dplr/datagen/dataset_io.h"

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "dplr/core/status.h"
#include "dplr/core/text.h"

namespace dplr {
namespace {

constexpr std::string_view kMagic = "# dplr-dataset 1";

std::string JoinDoubles(std::span<const double> values) {
  return absl::StrJoin(values, ",", [](std::string* out, double v) {
    out->append(FormatDouble(v));
  });
}

absl::Status ParseError(std::size_t line, const std::string& what) {
  return absl::InvalidArgumentError(
      absl::StrFormat("dataset line %d: %s", line, what));
}

absl::StatusOr<DistributionSpec> SpecFromHeader(
    const std::map<std::string, std::string>& header) {
  static constexpr std::string_view kKeys[] = {
      "spec.family", "spec.eigenvalues", "spec.w_star",
      "spec.sigma",  "spec.tail_a",      "spec.k2"};
  for (std::string_view key : kKeys) {
    if (!header.count(std::string(key))) {
      return absl::InvalidArgumentError(
          absl::StrFormat("incomplete spec block: missing '%s'", std::string(key)));
    }
  }
  DistributionSpec spec;
  DPLR_ASSIGN_OR_RETURN(spec.family, ParseFamily(header.at("spec.family")));
  DPLR_ASSIGN_OR_RETURN(std::vector<double> eigenvalues,
                        ParseDoubleList(header.at("spec.eigenvalues")));
  DPLR_ASSIGN_OR_RETURN(spec.h, DiagonalPSD::Create(std::move(eigenvalues)));
  DPLR_ASSIGN_OR_RETURN(std::vector<double> w_star,
                        ParseDoubleList(header.at("spec.w_star")));
  spec.w_star = Vector(std::move(w_star));
  DPLR_ASSIGN_OR_RETURN(spec.sigma, ParseDouble(header.at("spec.sigma")));
  DPLR_ASSIGN_OR_RETURN(spec.tail_a, ParseDouble(header.at("spec.tail_a")));
  DPLR_ASSIGN_OR_RETURN(spec.k2, ParseDouble(header.at("spec.k2")));
  DPLR_RETURN_IF_ERROR(spec.Validate());
  return spec;
}

}  // namespace

std::string FormatDouble(double value) {
  return absl::StrFormat("%.17g", value);
}

absl::Status WriteDataset(std::ostream& out, const DatasetFile& file) {
  const Dataset& data = file.data;
  if (file.spec.has_value()) {
    DPLR_RETURN_IF_ERROR(file.spec->Validate());
    if (file.spec->dim() != data.dim()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "spec dimension %d does not match data dimension %d",
          file.spec->dim(), data.dim()));
    }
  }
  out << kMagic << '\n';
  out << "# d=" << data.dim() << '\n';
  out << "# n=" << data.size() << '\n';
  if (file.seed.has_value()) out << "# seed=" << *file.seed << '\n';
  if (file.spec.has_value()) {
    const DistributionSpec& spec = *file.spec;
    out << "# spec.family=" << FamilyName(spec.family) << '\n';
    out << "# spec.eigenvalues=" << JoinDoubles(spec.h.eigenvalues()) << '\n';
    out << "# spec.w_star=" << JoinDoubles(spec.w_star.span()) << '\n';
    out << "# spec.sigma=" << FormatDouble(spec.sigma) << '\n';
    out << "# spec.tail_a=" << FormatDouble(spec.tail_a) << '\n';
    out << "# spec.k2=" << FormatDouble(spec.k2) << '\n';
  }
  std::string row;
  for (std::size_t i = 0; i < data.size(); ++i) {
    row = JoinDoubles(data.x(i));
    row += ',';
    row += FormatDouble(data.y(i));
    out << row << '\n';
  }
  if (!out) return absl::UnavailableError("dataset write failed");
  return absl::OkStatus();
}

absl::Status WriteDatasetFile(const std::string& path,
                              const DatasetFile& file) {
  std::ostringstream buffer;
  DPLR_RETURN_IF_ERROR(WriteDataset(buffer, file));
  return WriteFileAtomically(path, buffer.str());
}

absl::StatusOr<DatasetFile> ReadDataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || StripWhitespace(line) != kMagic) {
    return ParseError(1, "missing '# dplr-dataset 1' header");
  }
  ++line_no;

  std::map<std::string, std::string> header;
  std::optional<std::size_t> dim;
  std::optional<std::size_t> rows;
  DatasetFile file;
  bool in_header = true;
  std::vector<double> x;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = StripWhitespace(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      if (!in_header) return ParseError(line_no, "header after data rows");
      text.remove_prefix(1);
      text = StripWhitespace(text);
      const std::size_t eq = text.find('=');
      if (eq == std::string_view::npos) {
        return ParseError(line_no, "header line without '='");
      }
      std::string key(StripWhitespace(text.substr(0, eq)));
      std::string value(StripWhitespace(text.substr(eq + 1)));
      if (header.count(key)) {
        return ParseError(line_no, absl::StrCat("duplicate key '", key, "'"));
      }
      header.emplace(std::move(key), std::move(value));
      continue;
    }
    if (in_header) {
      in_header = false;
      if (!header.count("d") || !header.count("n")) {
        return ParseError(line_no, "header must declare d and n");
      }
      DPLR_ASSIGN_OR_RETURN(const std::uint64_t d, ParseUint(header.at("d")));
      DPLR_ASSIGN_OR_RETURN(const std::uint64_t n, ParseUint(header.at("n")));
      if (d == 0) return ParseError(line_no, "d must be >= 1");
      dim = d;
      rows = n;
      file.data = Dataset(d);
      file.data.Reserve(n);
      x.resize(d);
    }
    std::size_t column = 0;
    double y = 0.0;
    for (absl::string_view token :
         absl::StrSplit(absl::string_view(text.data(), text.size()), ',')) {
      absl::StatusOr<double> value =
          ParseDouble(std::string_view(token.data(), token.size()));
      if (!value.ok()) return ParseError(line_no, std::string(value.status().message()));
      if (column < *dim) {
        x[column] = *value;
      } else if (column == *dim) {
        y = *value;
      }
      ++column;
    }
    if (column != *dim + 1) {
      return ParseError(line_no, absl::StrFormat("expected %d fields, got %d",
                                                 *dim + 1, column));
    }
    absl::Status appended = file.data.Append(x, y);
    if (!appended.ok()) return ParseError(line_no, std::string(appended.message()));
  }

  if (in_header) {
    // A file with no rows is only legal when it says so.
    if (!header.count("d") || !header.count("n")) {
      return ParseError(line_no, "header must declare d and n");
    }
    DPLR_ASSIGN_OR_RETURN(const std::uint64_t d, ParseUint(header.at("d")));
    DPLR_ASSIGN_OR_RETURN(const std::uint64_t n, ParseUint(header.at("n")));
    if (d == 0) return ParseError(line_no, "d must be >= 1");
    dim = d;
    rows = n;
    file.data = Dataset(d);
  }
  if (file.data.size() != *rows) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "header declares n=%d but file has %d rows", *rows, file.data.size()));
  }

  if (auto it = header.find("seed"); it != header.end()) {
    DPLR_ASSIGN_OR_RETURN(file.seed, ParseUint(it->second));
  }
  bool any_spec = false;
  for (const auto& [key, value] : header) {
    if (key.rfind("spec.", 0) == 0) any_spec = true;
  }
  if (any_spec) {
    DPLR_ASSIGN_OR_RETURN(file.spec, SpecFromHeader(header));
    if (file.spec->dim() != *dim) {
      return absl::InvalidArgumentError(
          absl::StrFormat("spec dimension %d does not match d=%d",
                          file.spec->dim(), *dim));
    }
  }
  return file;
}

absl::StatusOr<DatasetFile> ReadDatasetFile(const std::string& path) {
  DPLR_ASSIGN_OR_RETURN(const std::string content, ReadFile(path));
  std::istringstream in(content);
  absl::StatusOr<DatasetFile> file = ReadDataset(in);
  if (!file.ok()) {
    return absl::Status(file.status().code(),
                        absl::StrCat(path, ": ", file.status().message()));
  }
  return file;
}

}  // namespace dplr
