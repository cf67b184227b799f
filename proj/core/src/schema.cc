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
#include "pie/schema.h"

#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"

namespace pie {
namespace {

using nlohmann::json;

absl::StatusOr<std::vector<std::string>> ReadVocabulary(const json& doc,
                                                        const char* field) {
  if (!doc.contains(field) || !doc[field].is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat("schema: missing vocabulary '", field, "'"));
  }
  std::vector<std::string> vocab;
  for (const auto& item : doc[field]) {
    if (!item.is_string()) {
      return absl::InvalidArgumentError(
          absl::StrCat("schema: non-string code in '", field, "'"));
    }
    vocab.push_back(item.get<std::string>());
  }
  if (vocab.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("schema: empty vocabulary '", field, "'"));
  }
  return vocab;
}

}  // namespace

const CategorySchema& CategorySchema::Default() {
  static const CategorySchema* const kDefault = new CategorySchema{
      .version = "pie-categories-v1",
      .targeting_descriptor = {"broad", "lookalike", "custom_audience",
                               "interest"},
      .bidding_strategy = {"lowest_cost", "cost_cap", "bid_cap",
                           "target_cost"},
      .optimization_setting = {"conversions", "link_clicks",
                               "landing_page_views", "impressions"},
      .campaign_objective = {"sales", "leads", "traffic", "awareness"},
  };
  return *kDefault;
}

absl::StatusOr<CategorySchema> CategorySchema::FromJson(
    absl::string_view json_text) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("schema: not a JSON object");
  }
  if (!doc.contains("version") || !doc["version"].is_string()) {
    return absl::InvalidArgumentError("schema: missing 'version'");
  }
  CategorySchema schema;
  schema.version = doc["version"].get<std::string>();
  auto read = [&](const char* field, std::vector<std::string>& out) {
    auto vocab = ReadVocabulary(doc, field);
    if (!vocab.ok()) return vocab.status();
    out = *std::move(vocab);
    return absl::OkStatus();
  };
  for (auto [field, out] :
       {std::pair{"targeting_descriptor", &schema.targeting_descriptor},
        std::pair{"bidding_strategy", &schema.bidding_strategy},
        std::pair{"optimization_setting", &schema.optimization_setting},
        std::pair{"campaign_objective", &schema.campaign_objective}}) {
    if (auto s = read(field, *out); !s.ok()) return s;
  }
  return schema;
}

absl::StatusOr<CategorySchema> CategorySchema::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJson(buffer.str());
}

std::string CategorySchema::ToJson() const {
  json doc = {{"version", version},
              {"targeting_descriptor", targeting_descriptor},
              {"bidding_strategy", bidding_strategy},
              {"optimization_setting", optimization_setting},
              {"campaign_objective", campaign_objective}};
  return doc.dump(2);
}

absl::StatusOr<int> CategorySchema::CodeIndex(
    const std::vector<std::string>& vocabulary, absl::string_view code,
    absl::string_view field) {
  for (size_t i = 0; i < vocabulary.size(); ++i) {
    if (vocabulary[i] == code) return static_cast<int>(i);
  }
  return absl::InvalidArgumentError(
      absl::StrCat(field, " code '", code, "' not in vocabulary"));
}

}  // namespace pie
