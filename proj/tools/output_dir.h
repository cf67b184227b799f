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
#ifndef PIE_TOOLS_OUTPUT_DIR_H_
#define PIE_TOOLS_OUTPUT_DIR_H_

#include <memory>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "nlohmann/json.hpp"

namespace pie::cli {

inline constexpr int kManifestVersion = 1;
inline constexpr char kManifestName[] = "manifest.json";

// Lowercase hex SHA-256 of the file's bytes.
absl::StatusOr<std::string> Sha256File(const std::string& path);

// Output directory of one subcommand run. Files are written into a staging
// area and moved into place by Commit, so a failed run leaves no partial
// outputs. The directory stays locked against other pie processes until the
// object is destroyed.
class OutputDir {
 public:
  static absl::StatusOr<std::unique_ptr<OutputDir>> Open(const std::string& dir);

  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;
  ~OutputDir();

  const std::string& path() const { return dir_; }

  // Staging path for `relative`, with parent directories created.
  absl::StatusOr<std::string> Stage(const std::string& relative);
  absl::Status WriteText(const std::string& relative, absl::string_view text);

  // Existing contents of `relative` are deleted at commit time.
  void ReplaceDirectory(const std::string& relative);

  // Moves staged files into place and records `run`, extended with the
  // artifact list, under runs.<subcommand> in manifest.json. Entries for
  // other subcommands are kept.
  absl::Status Commit(const std::string& subcommand, nlohmann::json run);

 private:
  OutputDir(std::string dir, int lock_fd);

  std::string dir_;
  std::string staging_;
  int lock_fd_ = -1;
  bool created_ = false;
  bool committed_ = false;
  std::vector<std::string> staged_;
  std::vector<std::string> replaced_dirs_;
};

// {"path": ..., "sha256": ...} for a file read by the run.
absl::StatusOr<nlohmann::json> InputRecord(const std::string& path);

}  // namespace pie::cli

#endif  // PIE_TOOLS_OUTPUT_DIR_H_
