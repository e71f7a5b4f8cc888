/*
 * Copyright 2026 The racgrid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include "racgrid/scenario_io.hpp"
#include "support.hpp"

namespace racgrid {
namespace {

const std::string kDir = std::string(RACGRID_SOURCE_DIR) + "/scenarios/";

const char* kMinimal = R"(
name: tiny
topology:
  stations:
    - {id: C, kind: CAC, disk: 1TB, tape: 10TB, cpu: 4}
    - {id: R, kind: RAC, region: r, parent: C, disk: 500GB, tape: 1TB, cpu: 2}
  regions:
    - {id: r, rac: R}
  links:
    - {between: [C, R], bandwidth: 100MB/s, latency: 0.01}
datasets:
  - {id: t, tier: TMB, events: 1e6}
)";

TEST(ScenarioIo, MinimalDefaults) {
  const Scenario s = parse_scenario(kMinimal);
  EXPECT_EQ(s.name, "tiny");
  ASSERT_EQ(s.topology.stations.size(), 2u);
  EXPECT_EQ(s.topology.stations[0].disk_capacity, kTB);
  EXPECT_EQ(s.topology.stations[1].disk_capacity, 500 * kGB);
  EXPECT_DOUBLE_EQ(s.topology.links[0].bandwidth, 100e6);
  EXPECT_EQ(s.datasets.at(0).events, 1'000'000u);
  EXPECT_EQ(s.policy, default_policy());
  EXPECT_EQ(s.duration, 86400.0);
  EXPECT_EQ(s.target_file_size, kGB);
  EXPECT_TRUE(s.topology.regions[0].members.contains("R"));
  EXPECT_TRUE(validate_scenario(s).empty());
}

TEST(ScenarioIo, LargeIntegersStayExact) {
  std::string text = kMinimal;
  text.replace(text.find("disk: 1TB"), 9, "disk: 12345678901234567");
  EXPECT_EQ(parse_scenario(text).topology.stations[0].disk_capacity, 12'345'678'901'234'567ULL);
}

TEST(ScenarioIo, PolicyOverrides) {
  const std::string text = std::string(kMinimal) + R"(
policy_overrides:
  few_percent: 0.02
  foreign_rac_before_cac: true
  tiers:
    RAW: {rac_tape: 0.05}
    MC_ROOTTUPLE: {rac_disk: few}
)";
  const Scenario s = parse_scenario(text);
  EXPECT_EQ(s.policy.few_percent.ppm(), 20'000);
  EXPECT_TRUE(s.policy.foreign_rac_before_cac);
  EXPECT_EQ(s.policy.fraction(DataTier::RAW, PlacementColumn::RacTape).ppm(), 50'000);
  EXPECT_TRUE(s.policy.is_few(DataTier::MC_ROOTTUPLE, PlacementColumn::RacDisk));
  EXPECT_EQ(parse_scenario(serialize_scenario(s)), s);
}

TEST(ScenarioIo, ErrorsCarryPosition) {
  try {
    parse_scenario(std::string(kMinimal) + "bogus: 1\n");
    FAIL() << "expected a parse error";
  } catch (const ScenarioParseError& e) {
    EXPECT_EQ(e.line(), 13);
    EXPECT_NE(std::string(e.what()).find("unknown field 'bogus'"), std::string::npos);
  }
  try {
    std::string text = kMinimal;
    text.replace(text.find("kind: RAC"), 9, "kind: XYZ");
    parse_scenario(text);
    FAIL() << "expected a parse error";
  } catch (const ScenarioParseError& e) {
    EXPECT_EQ(e.line(), 6);
    EXPECT_NE(std::string(e.what()).find("line 6"), std::string::npos);
  }
}

TEST(ScenarioIo, MalformedInputs) {
  EXPECT_THROW(parse_scenario("topology: [unclosed"), ScenarioParseError);
  EXPECT_THROW(parse_scenario("- just\n- a list\n"), ScenarioParseError);
  EXPECT_THROW(parse_scenario("name: x\n"), ScenarioParseError);  // no topology
  std::string bad_units = kMinimal;
  bad_units.replace(bad_units.find("1TB"), 3, "1XB");
  EXPECT_THROW(parse_scenario(bad_units), ScenarioParseError);
  std::string bad_count = kMinimal;
  bad_count.replace(bad_count.find("1e6"), 3, "1.5");
  EXPECT_THROW(parse_scenario(bad_count), ScenarioParseError);
  EXPECT_THROW(load_scenario("/nonexistent/file.yaml"), ScenarioParseError);
}

TEST(ScenarioIo, BundledScenariosRoundTrip) {
  for (const char* name : {"run2a", "gridka", "toy2region"}) {
    const Scenario s = load_scenario(kDir + name + ".yaml");
    EXPECT_TRUE(validate_scenario(s).empty()) << name;
    const std::string once = serialize_scenario(s);
    const Scenario back = parse_scenario(once);
    EXPECT_EQ(back, s) << name;
    EXPECT_EQ(serialize_scenario(back), once) << name;
  }
}

TEST(ScenarioIo, RandomScenariosRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Scenario s = testing::random_scenario(seed);
    s.workload.streams.at(0).max_jobs = seed;
    s.topology.stations[0].tape.stream_rate = 12345.678901234567;
    s.topology.links[0].latency = 1.0 / 3.0;
    EXPECT_EQ(parse_scenario(serialize_scenario(s)), s) << seed;
  }
}

TEST(ScenarioIo, Run2aContents) {
  const Scenario s = load_scenario(kDir + "run2a.yaml");
  const TierCounts c = scenario_event_counts(s);
  for (DataTier t : {DataTier::RAW, DataTier::RECO, DataTier::DST, DataTier::TMB, DataTier::DERIVED}) {
    EXPECT_EQ(c[tier_index(t)], 1'500'000'000u);
  }
  for (DataTier t : {DataTier::MC_D0STAR, DataTier::MC_D0SIM, DataTier::MC_DST, DataTier::MC_TMB,
                     DataTier::MC_PMCS, DataTier::MC_ROOTTUPLE}) {
    EXPECT_EQ(c[tier_index(t)], 0u);
  }
  EXPECT_EQ(rac_count(s.topology), 4u);
  EXPECT_EQ(s.resources.size(), 5u);
  EXPECT_EQ(cpu_summary(s.resources, s.cpu_requirement).allocated_remote, 358.0);
}

TEST(ScenarioIo, ValidationFindsSemanticProblems) {
  Scenario s = parse_scenario(kMinimal);
  s.duration = 0;
  s.datasets.push_back({"t", DataTier::TMB, 5, -1.0, 1});
  WorkloadStream w;
  w.region_id = "nowhere";
  s.workload.streams.push_back(w);
  const auto v = validate_scenario(s);
  auto has = [&](std::string_view needle) {
    return std::any_of(v.begin(), v.end(), [&](const auto& m) { return m.find(needle) != std::string::npos; });
  };
  EXPECT_TRUE(has("duration"));
  EXPECT_TRUE(has("duplicate dataset id: t"));
  EXPECT_TRUE(has("negative popularity"));
  EXPECT_TRUE(has("unknown region nowhere"));
}

}  // namespace
}  // namespace racgrid
