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
#include "pie/event_log.h"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <map>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "pie/csv.h"

namespace pie {

void EventLog::AddUser(int64_t user_id, bool assigned_test, bool exposed,
                       std::span<const Seconds> impression_times,
                       std::span<const Seconds> click_times,
                       std::span<const Seconds> conversion_times,
                       std::optional<bool> converted_counterfactual) {
  user_id_.push_back(user_id);
  assigned_test_.push_back(assigned_test ? 1 : 0);
  exposed_.push_back(exposed ? 1 : 0);
  if (has_counterfactual_) {
    converted_counterfactual_.push_back(
        converted_counterfactual.value_or(false) ? 1 : 0);
  }
  impression_times_.insert(impression_times_.end(), impression_times.begin(),
                           impression_times.end());
  impression_offsets_.push_back(impression_times_.size());
  click_times_.insert(click_times_.end(), click_times.begin(), click_times.end());
  click_offsets_.push_back(click_times_.size());
  conversion_times_.insert(conversion_times_.end(), conversion_times.begin(),
                           conversion_times.end());
  conversion_offsets_.push_back(conversion_times_.size());
}

void EventLog::Reserve(size_t users) {
  user_id_.reserve(users);
  assigned_test_.reserve(users);
  exposed_.reserve(users);
  if (has_counterfactual_) converted_counterfactual_.reserve(users);
  impression_offsets_.reserve(users + 1);
  click_offsets_.reserve(users + 1);
  conversion_offsets_.reserve(users + 1);
}

UserEvents EventLog::user(size_t i) const {
  UserEvents u;
  u.user_id = user_id_[i];
  u.assigned_test = assigned_test_[i] != 0;
  u.exposed = exposed_[i] != 0;
  auto slice = [i](const std::vector<uint64_t>& offsets,
                   const std::vector<Seconds>& values) {
    return std::span<const Seconds>(values.data() + offsets[i],
                                    offsets[i + 1] - offsets[i]);
  };
  u.impression_times = slice(impression_offsets_, impression_times_);
  u.click_times = slice(click_offsets_, click_times_);
  u.conversion_times = slice(conversion_offsets_, conversion_times_);
  if (has_counterfactual_) u.converted_counterfactual = converted_counterfactual_[i] != 0;
  return u;
}

std::optional<Seconds> LastClickDelay(const UserEvents& user) {
  if (user.conversion_times.empty()) return std::nullopt;
  const Seconds converted_at = user.conversion_times.front();
  auto it = std::upper_bound(user.click_times.begin(), user.click_times.end(),
                             converted_at);
  if (it == user.click_times.begin()) return std::nullopt;
  return converted_at - *std::prev(it);
}

absl::Status EventLog::Validate() const {
  for (size_t i = 0; i < size(); ++i) {
    const UserEvents u = user(i);
    auto fail = [&](absl::string_view what) {
      return absl::FailedPreconditionError(
          absl::StrFormat("user %d: %s", u.user_id, what));
    };
    if (!u.assigned_test && u.exposed) return fail("control user is exposed");
    if (!u.click_times.empty() && !u.exposed) return fail("unexposed user clicked");
    if (u.impression_times.empty() == u.exposed) {
      return fail("impressions present iff exposed violated");
    }
    for (auto times : {u.impression_times, u.click_times, u.conversion_times}) {
      if (!std::is_sorted(times.begin(), times.end())) {
        return fail("event times not sorted");
      }
    }
  }
  return absl::OkStatus();
}

class EventLogCodec {
 public:
  static std::string Encode(const EventLogFile& file) {
    const EventLog& log = file.log;
    const CampaignCharacteristics& c = file.characteristics;
    std::string out = "#pie-eventlog v1\n";
    auto meta = [&out](absl::string_view key, absl::string_view value) {
      absl::StrAppend(&out, key, "=", value, "\n");
    };
    meta("rct_id", file.rct_id);
    meta("experiment_id", file.experiment_id);
    meta("funnel", FunnelName(c.funnel));
    meta("vertical", VerticalName(c.vertical));
    meta("targeting_descriptor", c.targeting_descriptor);
    meta("bidding_strategy", c.bidding_strategy);
    meta("optimization_setting", c.optimization_setting);
    meta("advertiser_experience", FormatDouble(c.advertiser_experience));
    meta("campaign_objective", c.campaign_objective);
    meta("audience_retargeting_share", FormatDouble(c.audience_retargeting_share));
    meta("n_test_users", absl::StrCat(c.n_test_users));
    meta("budget", FormatDouble(c.budget));
    meta("length_days", absl::StrCat(c.length_days));
    meta("cost", FormatDouble(file.cost));
    meta("planned_test_share", FormatDouble(file.planned_test_share));
    meta("has_counterfactual", log.has_counterfactual_ ? "1" : "0");

    auto column = [&out](absl::string_view name, const auto& values) {
      absl::StrAppend(&out, name, ":");
      for (const auto& v : values) absl::StrAppend(&out, " ", v);
      out.push_back('\n');
    };
    auto counts = [](const std::vector<uint64_t>& offsets) {
      std::vector<uint64_t> n(offsets.size() - 1);
      for (size_t i = 0; i + 1 < offsets.size(); ++i) {
        n[i] = offsets[i + 1] - offsets[i];
      }
      return n;
    };
    column("user_id", log.user_id_);
    column("z", log.assigned_test_);
    column("w", log.exposed_);
    if (log.has_counterfactual_) column("y0", log.converted_counterfactual_);
    column("n_impressions", counts(log.impression_offsets_));
    column("impression_times", log.impression_times_);
    column("n_clicks", counts(log.click_offsets_));
    column("click_times", log.click_times_);
    column("n_conversions", counts(log.conversion_offsets_));
    column("conversion_times", log.conversion_times_);
    return out;
  }

  static absl::StatusOr<EventLogFile> Decode(absl::string_view text) {
    std::vector<absl::string_view> lines = absl::StrSplit(text, '\n');
    if (lines.empty() || lines[0] != "#pie-eventlog v1") {
      return absl::InvalidArgumentError("not a pie event log (bad magic line)");
    }
    std::map<std::string, absl::string_view, std::less<>> meta;
    std::map<std::string, absl::string_view, std::less<>> columns;
    for (size_t i = 1; i < lines.size(); ++i) {
      absl::string_view line = lines[i];
      if (line.empty()) continue;
      const size_t colon = line.find(':');
      const size_t eq = line.find('=');
      if (eq != absl::string_view::npos && (colon == absl::string_view::npos || eq < colon)) {
        meta[std::string(line.substr(0, eq))] = line.substr(eq + 1);
      } else if (colon != absl::string_view::npos) {
        columns[std::string(line.substr(0, colon))] = line.substr(colon + 1);
      } else {
        return absl::InvalidArgumentError(
            absl::StrCat("event log line ", i + 1, ": unrecognized"));
      }
    }
    auto get_meta = [&](const char* key) -> absl::StatusOr<absl::string_view> {
      auto it = meta.find(key);
      if (it == meta.end()) {
        return absl::InvalidArgumentError(
            absl::StrCat("event log: missing metadata '", key, "'"));
      }
      return it->second;
    };
    auto meta_double = [&](const char* key) -> absl::StatusOr<double> {
      auto text = get_meta(key);
      if (!text.ok()) return text.status();
      double v = 0;
      auto [p, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
      if (ec != std::errc() || p != text->data() + text->size()) {
        return absl::InvalidArgumentError(
            absl::StrCat("event log: bad number for '", key, "'"));
      }
      return v;
    };

    EventLogFile file;
    CampaignCharacteristics& c = file.characteristics;
    auto take_string = [&](const char* key, std::string& out) -> absl::Status {
      auto v = get_meta(key);
      if (!v.ok()) return v.status();
      out = std::string(*v);
      return absl::OkStatus();
    };
    auto take_double = [&](const char* key, double& out) -> absl::Status {
      auto v = meta_double(key);
      if (!v.ok()) return v.status();
      out = *v;
      return absl::OkStatus();
    };
    double n_test_users = 0, length_days = 0, has_cf = 0;
    for (absl::Status st :
         {take_string("rct_id", file.rct_id),
          take_string("experiment_id", file.experiment_id),
          take_string("targeting_descriptor", c.targeting_descriptor),
          take_string("bidding_strategy", c.bidding_strategy),
          take_string("optimization_setting", c.optimization_setting),
          take_string("campaign_objective", c.campaign_objective),
          take_double("advertiser_experience", c.advertiser_experience),
          take_double("audience_retargeting_share", c.audience_retargeting_share),
          take_double("n_test_users", n_test_users),
          take_double("budget", c.budget),
          take_double("length_days", length_days),
          take_double("cost", file.cost),
          take_double("planned_test_share", file.planned_test_share),
          take_double("has_counterfactual", has_cf)}) {
      if (!st.ok()) return st;
    }
    c.n_test_users = static_cast<int64_t>(n_test_users);
    c.length_days = static_cast<int64_t>(length_days);
    auto funnel_text = get_meta("funnel");
    if (!funnel_text.ok()) return funnel_text.status();
    auto funnel = ParseFunnel(*funnel_text);
    if (!funnel.ok()) return funnel.status();
    c.funnel = *funnel;
    auto vertical_text = get_meta("vertical");
    if (!vertical_text.ok()) return vertical_text.status();
    auto vertical = ParseVertical(*vertical_text);
    if (!vertical.ok()) return vertical.status();
    c.vertical = *vertical;

    auto parse_column = [&](const char* name) -> absl::StatusOr<std::vector<int64_t>> {
      auto it = columns.find(name);
      if (it == columns.end()) {
        return absl::InvalidArgumentError(
            absl::StrCat("event log: missing column '", name, "'"));
      }
      std::vector<int64_t> values;
      for (absl::string_view token :
           absl::StrSplit(it->second, ' ', absl::SkipEmpty())) {
        int64_t v = 0;
        auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || p != token.data() + token.size()) {
          return absl::InvalidArgumentError(
              absl::StrCat("event log: bad value in column '", name, "'"));
        }
        values.push_back(v);
      }
      return values;
    };

    const bool with_cf = has_cf != 0.0;
    auto ids = parse_column("user_id");
    auto z = parse_column("z");
    auto w = parse_column("w");
    auto n_imp = parse_column("n_impressions");
    auto imp = parse_column("impression_times");
    auto n_clk = parse_column("n_clicks");
    auto clk = parse_column("click_times");
    auto n_conv = parse_column("n_conversions");
    auto conv = parse_column("conversion_times");
    for (const auto* col : {&ids, &z, &w, &n_imp, &imp, &n_clk, &clk, &n_conv, &conv}) {
      if (!col->ok()) return col->status();
    }
    absl::StatusOr<std::vector<int64_t>> y0 = std::vector<int64_t>{};
    if (with_cf) {
      y0 = parse_column("y0");
      if (!y0.ok()) return y0.status();
    }
    const size_t n = ids->size();
    for (const auto* col : {&z, &w, &n_imp, &n_clk, &n_conv}) {
      if ((*col)->size() != n) {
        return absl::InvalidArgumentError("event log: column length mismatch");
      }
    }
    if (with_cf && y0->size() != n) {
      return absl::InvalidArgumentError("event log: column length mismatch");
    }
    file.log = EventLog(with_cf);
    file.log.Reserve(n);
    size_t pi = 0, pc = 0, pv = 0;
    for (size_t i = 0; i < n; ++i) {
      const auto ni = static_cast<size_t>((*n_imp)[i]);
      const auto nc = static_cast<size_t>((*n_clk)[i]);
      const auto nv = static_cast<size_t>((*n_conv)[i]);
      if (pi + ni > imp->size() || pc + nc > clk->size() || pv + nv > conv->size()) {
        return absl::InvalidArgumentError("event log: list counts exceed values");
      }
      std::optional<bool> cf;
      if (with_cf) cf = (*y0)[i] != 0;
      file.log.AddUser((*ids)[i], (*z)[i] != 0, (*w)[i] != 0,
                       std::span<const Seconds>(imp->data() + pi, ni),
                       std::span<const Seconds>(clk->data() + pc, nc),
                       std::span<const Seconds>(conv->data() + pv, nv), cf);
      pi += ni;
      pc += nc;
      pv += nv;
    }
    if (pi != imp->size() || pc != clk->size() || pv != conv->size()) {
      return absl::InvalidArgumentError("event log: trailing list values");
    }
    if (auto st = file.log.Validate(); !st.ok()) return st;
    return file;
  }
};

absl::Status WriteEventLogFile(const std::string& path, const EventLogFile& file) {
  const std::string text = EventLogCodec::Encode(file);
  gzFile gz = gzopen(path.c_str(), "wb6");
  if (gz == nullptr) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  size_t written = 0;
  while (written < text.size()) {
    const unsigned chunk =
        static_cast<unsigned>(std::min<size_t>(text.size() - written, 1 << 20));
    const int n = gzwrite(gz, text.data() + written, chunk);
    if (n <= 0) {
      gzclose(gz);
      return absl::DataLossError(absl::StrCat("gzwrite failed for ", path));
    }
    written += static_cast<size_t>(n);
  }
  if (gzclose(gz) != Z_OK) {
    return absl::DataLossError(absl::StrCat("gzclose failed for ", path));
  }
  return absl::OkStatus();
}

absl::StatusOr<EventLogFile> ReadEventLogFile(const std::string& path) {
  gzFile gz = gzopen(path.c_str(), "rb");
  if (gz == nullptr) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::string text;
  char buffer[1 << 16];
  int n = 0;
  while ((n = gzread(gz, buffer, sizeof(buffer))) > 0) text.append(buffer, n);
  const bool failed = n < 0;
  gzclose(gz);
  if (failed) return absl::DataLossError(absl::StrCat("gzread failed for ", path));
  auto decoded = EventLogCodec::Decode(text);
  if (!decoded.ok()) {
    return absl::Status(decoded.status().code(),
                        absl::StrCat(path, ": ", decoded.status().message()));
  }
  return decoded;
}

}  // namespace pie
