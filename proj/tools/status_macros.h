/*
 * Copyright 2026 The PIE Lab Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef PIE_TOOLS_STATUS_MACROS_H_
#define PIE_TOOLS_STATUS_MACROS_H_

#include "absl/status/status.h"

#define PIE_RETURN_IF_ERROR(expr)                    \
  do {                                               \
    if (absl::Status pie_status_ = (expr);           \
        !pie_status_.ok()) {                         \
      return pie_status_;                            \
    }                                                \
  } while (0)

#define PIE_CONCAT_INNER_(a, b) a##b
#define PIE_CONCAT_(a, b) PIE_CONCAT_INNER_(a, b)

#define PIE_ASSIGN_OR_RETURN(lhs, expr) \
  PIE_ASSIGN_OR_RETURN_IMPL_(PIE_CONCAT_(pie_statusor_, __LINE__), lhs, expr)

#define PIE_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                               \
  if (!tmp.ok()) return tmp.status();              \
  lhs = *std::move(tmp)

#endif  // PIE_TOOLS_STATUS_MACROS_H_
