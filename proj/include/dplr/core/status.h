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

#ifndef DPLR_CORE_STATUS_H_
#define DPLR_CORE_STATUS_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

// Error categories used across the library, mapped onto absl status codes:
//   invalid argument      -> kInvalidArgument
//   unsupported operation -> kUnimplemented
//   numeric failure       -> kInternal
//   budget out of range   -> kOutOfRange
//   infeasible config     -> kFailedPrecondition

namespace dplr {

inline absl::Status NumericFailureError(std::string_view message) {
  return absl::InternalError(absl::StrCat("numeric failure: ", std::string(message)));
}

inline absl::Status BudgetOutOfRangeError(std::string_view message) {
  return absl::OutOfRangeError(absl::StrCat("privacy budget: ", std::string(message)));
}

inline absl::Status ConfigInfeasibleError(std::string_view message) {
  return absl::FailedPreconditionError(
      absl::StrCat("infeasible configuration: ", std::string(message)));
}

}  // namespace dplr

// Propagates a non-OK status from an expression returning absl::Status.
#define DPLR_RETURN_IF_ERROR(expr)            \
  do {                                        \
    const absl::Status dplr_status_ = (expr); \
    if (!dplr_status_.ok()) return dplr_status_; \
  } while (0)

#define DPLR_CONCAT_INNER_(a, b) a##b
#define DPLR_CONCAT_(a, b) DPLR_CONCAT_INNER_(a, b)

// Assigns the value of an absl::StatusOr expression or returns its status.
#define DPLR_ASSIGN_OR_RETURN(lhs, expr) \
  DPLR_ASSIGN_OR_RETURN_IMPL_(DPLR_CONCAT_(dplr_statusor_, __LINE__), lhs, expr)

#define DPLR_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                \
  if (!tmp.ok()) return tmp.status();               \
  lhs = std::move(tmp).value()

#endif  // DPLR_CORE_STATUS_H_
