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
#ifndef PIE_TESTS_TEST_UTIL_H_
#define PIE_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pie/schema.h"
#include "pie/types.h"

namespace pie::testing {

// Valid summaries with icpd roughly proportional to lcpd_1h, cycling through
// funnels and verticals so every subset is populated.
inline std::vector<RctSummary> SyntheticSummaries(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const CategorySchema& schema = CategorySchema::Default();
  auto pick = [&](const std::vector<std::string>& v) {
    return v[static_cast<size_t>(u(rng) * static_cast<double>(v.size()))];
  };
  std::vector<RctSummary> out;
  for (size_t i = 0; i < n; ++i) {
    RctSummary s;
    s.rct_id = "rct" + std::to_string(i);
    s.experiment_id = "exp" + std::to_string(i / 2);
    CampaignCharacteristics& c = s.characteristics;
    c.funnel = kAllFunnels[i % 3];
    c.vertical = kAllVerticals[(i / 3) % kAllVerticals.size()];
    c.targeting_descriptor = pick(schema.targeting_descriptor);
    c.bidding_strategy = pick(schema.bidding_strategy);
    c.optimization_setting = pick(schema.optimization_setting);
    c.campaign_objective = pick(schema.campaign_objective);
    c.advertiser_experience = 10.0 * u(rng);
    c.audience_retargeting_share = u(rng);
    c.n_test_users = 1000 + static_cast<int64_t>(9000 * u(rng));
    c.budget = 500.0 + 5000.0 * u(rng);
    c.length_days = 7 + static_cast<int64_t>(21 * u(rng));
    const double scale = 1.0 + 2.0 * static_cast<double>(i % 3);
    s.lcpd[0] = 0.02 * scale * (0.5 + u(rng));
    s.lcpd[1] = s.lcpd[0] * (1.2 + 0.5 * u(rng));
    s.lcpd[2] = s.lcpd[1] * (1.1 + 0.3 * u(rng));
    s.lcpd[3] = s.lcpd[2] * (1.0 + 0.2 * u(rng));
    s.cost = c.budget;
    s.n_exposed = 800 + static_cast<int64_t>(4000 * u(rng));
    const double icpd = 1.5 * s.lcpd[0] * (0.7 + 0.6 * u(rng));
    s.att = icpd * s.cost / static_cast<double>(s.n_exposed);
    s.att_se = s.att * (0.1 + 0.4 * u(rng));
    s.icpd = s.att * static_cast<double>(s.n_exposed) / s.cost;
    s.icpd_se = s.att_se * static_cast<double>(s.n_exposed) / s.cost;
    s.randomization_p = u(rng);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace pie::testing

#endif  // PIE_TESTS_TEST_UTIL_H_
