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
#include "output_dir.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <system_error>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "openssl/evp.h"

namespace pie::cli {
namespace fs = std::filesystem;

namespace {

constexpr char kLockName[] = ".pie.lock";
constexpr char kStagingName[] = ".pie-staging";

absl::Status FsError(const std::string& what, const std::error_code& ec) {
  return absl::UnavailableError(absl::StrCat(what, ": ", ec.message()));
}

}  // namespace

absl::StatusOr<std::string> Sha256File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (ctx == nullptr || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    return absl::InternalError("SHA-256 initialization failed");
  }
  std::array<char, 1 << 16> buffer;
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0 &&
        EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<size_t>(in.gcount())) != 1) {
      return absl::InternalError("SHA-256 update failed");
    }
  }
  if (in.bad()) return absl::DataLossError(absl::StrCat("error reading ", path));
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int length = 0;
  if (EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    return absl::InternalError("SHA-256 finalization failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) absl::StrAppendFormat(&hex, "%02x", digest[i]);
  return hex;
}

absl::StatusOr<nlohmann::json> InputRecord(const std::string& path) {
  auto sha = Sha256File(path);
  if (!sha.ok()) return sha.status();
  return nlohmann::json{{"path", path}, {"sha256", *sha}};
}

absl::StatusOr<std::unique_ptr<OutputDir>> OutputDir::Open(const std::string& dir) {
  std::error_code ec;
  const bool created = fs::create_directories(dir, ec);
  if (ec) return FsError(absl::StrCat("cannot create ", dir), ec);
  const std::string lock_path = (fs::path(dir) / kLockName).string();
  const int fd = ::open(lock_path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
  if (fd < 0) return absl::UnavailableError(absl::StrCat("cannot open ", lock_path));
  if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd);
    return absl::UnavailableError(
        absl::StrCat(dir, " is in use by another pie process"));
  }
  std::unique_ptr<OutputDir> out(new OutputDir(dir, fd));
  out->created_ = created;
  fs::remove_all(out->staging_, ec);
  fs::create_directories(out->staging_, ec);
  if (ec) return FsError(absl::StrCat("cannot create ", out->staging_), ec);
  return out;
}

OutputDir::OutputDir(std::string dir, int lock_fd)
    : dir_(std::move(dir)),
      staging_((fs::path(dir_) / kStagingName).string()),
      lock_fd_(lock_fd) {}

OutputDir::~OutputDir() {
  std::error_code ec;
  fs::remove_all(staging_, ec);
  // A failed run into a directory it created leaves nothing behind.
  if (created_ && !committed_) fs::remove((fs::path(dir_) / kLockName), ec);
  if (lock_fd_ >= 0) ::close(lock_fd_);
  if (created_ && !committed_) fs::remove(dir_, ec);
}

absl::StatusOr<std::string> OutputDir::Stage(const std::string& relative) {
  const fs::path target = fs::path(staging_) / relative;
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) return FsError(absl::StrCat("cannot create ", target.parent_path().string()), ec);
  if (std::find(staged_.begin(), staged_.end(), relative) == staged_.end()) {
    staged_.push_back(relative);
  }
  return target.string();
}

absl::Status OutputDir::WriteText(const std::string& relative, absl::string_view text) {
  auto path = Stage(relative);
  if (!path.ok()) return path.status();
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("cannot write ", *path));
  return absl::OkStatus();
}

void OutputDir::ReplaceDirectory(const std::string& relative) {
  replaced_dirs_.push_back(relative);
}

absl::Status OutputDir::Commit(const std::string& subcommand, nlohmann::json run) {
  std::vector<std::string> order = staged_;
  std::sort(order.begin(), order.end());
  nlohmann::json artifacts = nlohmann::json::array();
  for (const std::string& rel : order) {
    const std::string staged = (fs::path(staging_) / rel).string();
    auto sha = Sha256File(staged);
    if (!sha.ok()) return sha.status();
    std::error_code ec;
    const auto bytes = fs::file_size(staged, ec);
    if (ec) return FsError(staged, ec);
    artifacts.push_back({{"path", rel}, {"sha256", *sha}, {"bytes", bytes}});
  }
  run["artifacts"] = std::move(artifacts);

  const fs::path manifest_path = fs::path(dir_) / std::string(kManifestName);
  nlohmann::json manifest = nlohmann::json::object();
  if (std::ifstream in(manifest_path); in) {
    manifest = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (!manifest.is_object() || manifest.value("manifest_version", 0) != kManifestVersion) {
      manifest = nlohmann::json::object();
    }
  }
  manifest["manifest_version"] = kManifestVersion;
  manifest["runs"][subcommand] = std::move(run);
  if (auto st = WriteText(std::string(kManifestName), manifest.dump(2) + "\n"); !st.ok()) {
    return st;
  }

  committed_ = true;
  std::error_code ec;
  for (const std::string& rel : replaced_dirs_) {
    fs::remove_all(fs::path(dir_) / rel, ec);
    if (ec) return FsError(absl::StrCat("cannot clear ", rel), ec);
  }
  order.push_back(std::string(kManifestName));
  for (const std::string& rel : order) {
    const fs::path target = fs::path(dir_) / rel;
    fs::create_directories(target.parent_path(), ec);
    if (ec) return FsError(absl::StrCat("cannot create ", target.parent_path().string()), ec);
    fs::rename(fs::path(staging_) / rel, target, ec);
    if (ec) return FsError(absl::StrCat("cannot move ", rel, " into place"), ec);
  }
  return absl::OkStatus();
}

}  // namespace pie::cli
