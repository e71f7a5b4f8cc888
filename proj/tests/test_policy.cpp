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

#include <random>
#include <set>

#include "racgrid/policy.hpp"
#include "support.hpp"

namespace racgrid {
namespace {

using testing::make_files;
using testing::star_topology;

constexpr double kFew = -1.0;  // marks a "few %" cell

// Placement matrix, one row per tier in declaration order:
// CAC tape, CAC disk, RAC tape, RAC disk.
const double kTable[kTierCount][4] = {
    {1.0, 0.1, 0, 0},       {1.0, 0.1, 0.01, 0},   {1.0, 1.0, 0.1, 0.1},
    {4.0, 1.0, 1.0, 1.0},   {4.0, 1.0, 1.0, 1.0},  {0, 0, 0, 0},
    {0, 0, 0, 0},           {1.0, kFew, kFew, kFew}, {1.0, 1.0, 0, 0.1},
    {1.0, 1.0, 0, 0.1},     {1.0, 0, 0.1, 0},
};

TEST(Policy, DefaultMatchesMatrix) {
  const PolicyTable p = default_policy();
  for (std::size_t i = 0; i < kTierCount; ++i) {
    for (std::size_t c = 0; c < 4; ++c) {
      const DataTier t = kAllTiers[i];
      const PlacementColumn col = kAllColumns[c];
      if (kTable[i][c] == kFew) {
        EXPECT_TRUE(p.is_few(t, col));
        EXPECT_EQ(p.fraction(t, col).ppm(), 50'000);
      } else {
        EXPECT_FALSE(p.is_few(t, col));
        EXPECT_EQ(p.fraction(t, col).ppm(), std::llround(kTable[i][c] * 1e6))
            << tier_name(t) << " " << column_name(col);
      }
    }
  }
  EXPECT_EQ(p.on_demand_min_fraction.ppm(), 100'000);
  EXPECT_TRUE(validate_policy(p).empty());
}

TEST(Policy, NamedExamples) {
  const PolicyTable p = default_policy();
  EXPECT_DOUBLE_EQ(p.fraction(DataTier::TMB, PlacementColumn::CacTape).value(), 4.0);
  EXPECT_DOUBLE_EQ(p.fraction(DataTier::RECO, PlacementColumn::RacTape).value(), 0.01);
  EXPECT_DOUBLE_EQ(p.fraction(DataTier::MC_DST, PlacementColumn::RacDisk).value(), 0.05);
}

TEST(Policy, FewFollowsConstant) {
  PolicyTable p = default_policy();
  p.few_percent = Fraction::from_double(0.02);
  EXPECT_EQ(p.fraction(DataTier::MC_DST, PlacementColumn::CacDisk).ppm(), 20'000);
  p.set(DataTier::MC_DST, PlacementColumn::CacDisk, Fraction::from_double(0.3));
  EXPECT_FALSE(p.is_few(DataTier::MC_DST, PlacementColumn::CacDisk));
  EXPECT_EQ(p.fraction(DataTier::MC_DST, PlacementColumn::CacDisk).ppm(), 300'000);
}

TEST(Policy, DiskFractionAboveOneRejected) {
  PolicyTable p = default_policy();
  p.set(DataTier::RAW, PlacementColumn::RacDisk, Fraction::from_double(2.0));
  EXPECT_FALSE(validate_policy(p).empty());
  p = default_policy();
  p.set(DataTier::RAW, PlacementColumn::RacTape, Fraction::from_double(2.0));
  EXPECT_TRUE(validate_policy(p).empty());
}

TEST(Fraction, CopiesAndScaling) {
  EXPECT_EQ(Fraction::from_double(4.0).copies(), 4u);
  EXPECT_EQ(Fraction::from_double(1.5).copies(), 2u);
  EXPECT_EQ(Fraction::from_double(0.0).copies(), 0u);
  EXPECT_EQ(scale_bytes(150 * kTB, Fraction::from_double(0.1)), 15 * kTB);
  EXPECT_EQ(scale_bytes(3, Fraction::from_double(0.5)), 1u);
  const Bytes big = 18'000'000'000'000'000'000ULL;
  EXPECT_EQ(scale_bytes(big, Fraction::from_double(0.5)), big / 2);
}

TEST(StableHash, KnownVectors) {
  EXPECT_EQ(stable_hash(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(stable_hash("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(stable_hash("foobar"), 0x85944171f73967e8ULL);
}

std::vector<std::string> rac_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("R" + std::to_string(i));
  return out;
}

void expect_partition_invariants(const DstPartition& p, std::size_t n_files, std::size_t expected) {
  std::set<std::string> seen;
  std::size_t lo = SIZE_MAX, hi = 0, sum = 0;
  for (const auto& [rac, share] : p.shares) {
    for (const auto& id : share) {
      EXPECT_TRUE(seen.insert(id).second) << "file in two shares: " << id;
      ASSERT_NE(p.owner_of(id), nullptr);
      EXPECT_EQ(*p.owner_of(id), rac);
    }
    lo = std::min(lo, share.size());
    hi = std::max(hi, share.size());
    sum += share.size();
  }
  EXPECT_LE(hi - lo, 1u);
  EXPECT_EQ(sum, expected);
  EXPECT_LE(sum, n_files);
  EXPECT_EQ(p.covered(), sum);
}

TEST(Partition, TenRacsTenPercent) {
  const auto files = make_files("dst", DataTier::DST, 100);
  const auto p = partition_tier(files, rac_names(10), Fraction::from_double(0.1));
  expect_partition_invariants(p, 100, 100);
  for (const auto& [_, share] : p.shares) EXPECT_EQ(share.size(), 10u);
}

TEST(Partition, SingleRacTakesAll) {
  const auto files = make_files("dst", DataTier::DST, 100);
  const auto p = partition_tier(files, {"only"}, Fraction::from_double(1.0));
  EXPECT_EQ(p.shares.at("only").size(), 100u);
}

TEST(Partition, UnevenCount) {
  const auto files = make_files("dst", DataTier::DST, 101);
  const auto p = partition_tier(files, rac_names(10), Fraction::from_double(0.1));
  expect_partition_invariants(p, 101, 101);
  std::size_t elevens = 0;
  for (const auto& [_, share] : p.shares) {
    EXPECT_TRUE(share.size() == 10 || share.size() == 11);
    elevens += share.size() == 11;
  }
  EXPECT_EQ(elevens, 1u);
}

// Independent oracle: sort by FNV-1a, deal in order.
TEST(Partition, MatchesHashRankOracle) {
  const auto files = make_files("x", DataTier::DST, 37);
  const auto racs = rac_names(4);
  const auto p = partition_tier(files, racs, Fraction::from_double(0.25));
  std::vector<std::pair<std::uint64_t, std::string>> ranked;
  for (const auto& f : files) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : f.file_id) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    ranked.emplace_back(h, f.file_id);
  }
  std::sort(ranked.begin(), ranked.end());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    EXPECT_EQ(*p.owner_of(ranked[i].second), racs[i % racs.size()]);
  }
}

TEST(Partition, EmptyRacListThrows) {
  const auto files = make_files("x", DataTier::DST, 3);
  EXPECT_THROW(partition_tier(files, {}, Fraction::from_double(0.5)), EmptyRacList);
}

TEST(Partition, DeterministicAndOrderIndependent) {
  auto files = make_files("d", DataTier::DST, 500);
  const auto racs = rac_names(3);
  const auto a = partition_tier(files, racs, Fraction::from_double(0.4));
  std::reverse(files.begin(), files.end());
  const auto b = partition_tier(files, racs, Fraction::from_double(0.4));
  EXPECT_EQ(a.shares, b.shares);
}

TEST(Partition, RandomProperties) {
  std::mt19937_64 g(11);
  for (int round = 0; round < 300; ++round) {
    const std::size_t n_files = std::uniform_int_distribution<std::size_t>(0, 400)(g);
    const std::size_t n_racs = std::uniform_int_distribution<std::size_t>(1, 12)(g);
    const std::int64_t ppm = std::uniform_int_distribution<std::int64_t>(0, 1'000'000)(g);
    const auto files = make_files("f" + std::to_string(round), DataTier::DST, n_files);
    const auto p = partition_tier(files, rac_names(n_racs), Fraction::from_ppm(ppm));
    const std::uint64_t cov = std::min<std::uint64_t>(1'000'000, n_racs * static_cast<std::uint64_t>(ppm));
    const std::size_t expected = (n_files * cov + 500'000) / 1'000'000;
    expect_partition_invariants(p, n_files, expected);
    if (static_cast<double>(n_racs) * static_cast<double>(ppm) >= 1e6) {
      EXPECT_EQ(p.covered(), n_files);
    }
  }
}

TEST(PinnedSet, RacHoldsAllTmb) {
  const Topology topo = star_topology(3);
  const auto files = make_files("tmb", DataTier::TMB, 50);
  const PolicyTable pol = default_policy();
  const auto plan = plan_placement(files, pol, topo);
  EXPECT_EQ(pinned_set(topo.station("R1"), files, pol, plan).size(), 50u);
}

TEST(PinnedSet, DesktopAndInstitutePinNothing) {
  const Topology topo = star_topology(1, 1, true);
  auto files = make_files("tmb", DataTier::TMB, 5);
  const auto dst = make_files("dst", DataTier::DST, 5);
  files.insert(files.end(), dst.begin(), dst.end());
  const PolicyTable pol = default_policy();
  const auto plan = plan_placement(files, pol, topo);
  EXPECT_TRUE(pinned_set(topo.station("R0-I0-D"), files, pol, plan).empty());
  EXPECT_TRUE(pinned_set(topo.station("R0-I0"), files, pol, plan).empty());
}

TEST(PinnedSet, RacShareEqualsRecomputedPartition) {
  const Topology topo = star_topology(10);
  const auto files = make_files("dst", DataTier::DST, 100);
  const PolicyTable pol = default_policy();
  const auto plan = plan_placement(files, pol, topo);
  const auto direct = partition_tier(files, topo.rac_ids(), Fraction::from_double(0.1));
  const auto pinned = pinned_set(topo.station("R3"), files, pol, plan);
  EXPECT_EQ(pinned, direct.shares.at("R3"));
  EXPECT_EQ(pinned.size(), 10u);
}

TEST(PinnedSet, CacHoldsFullTiersAndItsRawSample) {
  const Topology topo = star_topology(2);
  auto files = make_files("raw", DataTier::RAW, 200);
  const auto tmb = make_files("tmb", DataTier::TMB, 7);
  files.insert(files.end(), tmb.begin(), tmb.end());
  const PolicyTable pol = default_policy();
  const auto plan = plan_placement(files, pol, topo);
  const auto pinned = pinned_set(*topo.cac(), files, pol, plan);
  std::size_t raw = 0, thumb = 0;
  for (const auto& id : pinned) (id.rfind("raw", 0) == 0 ? raw : thumb)++;
  EXPECT_EQ(thumb, 7u);
  EXPECT_EQ(raw, 20u);
}

TEST(ArchivalTargets, ThumbnailRow) {
  const Topology topo = star_topology(3);
  const auto files = make_files("tmb", DataTier::TMB, 1);
  const PolicyTable pol = default_policy();
  const auto plan = plan_placement(files, pol, topo);
  const std::vector<PlacementTarget> expected = {
      {"C", Medium::Tape, 4},  {"R0", Medium::Disk, 1}, {"R1", Medium::Disk, 1},
      {"R2", Medium::Disk, 1}, {"R0", Medium::Tape, 1}, {"R1", Medium::Tape, 1},
      {"R2", Medium::Tape, 1}, {"C", Medium::Disk, 1}};
  EXPECT_EQ(archival_targets(files[0], pol, topo, plan), expected);
}

TEST(ArchivalTargets, ZeroRow) {
  const Topology topo = star_topology(2);
  const auto files = make_files("mc", DataTier::MC_D0STAR, 3);
  const PolicyTable pol = default_policy();
  const auto plan = plan_placement(files, pol, topo);
  for (const auto& f : files) EXPECT_TRUE(archival_targets(f, pol, topo, plan).empty());
}

TEST(ArchivalTargets, RecoOnePercentOnOneRac) {
  const Topology topo = star_topology(1);
  const auto files = make_files("reco", DataTier::RECO, 200);
  const PolicyTable pol = default_policy();
  const auto plan = plan_placement(files, pol, topo);
  std::size_t rac_tape = 0;
  for (const auto& f : files) {
    for (const auto& t : archival_targets(f, pol, topo, plan)) {
      rac_tape += t.station_id == "R0" && t.medium == Medium::Tape;
    }
  }
  EXPECT_EQ(rac_tape, 2u);
}

// Coverage of each fractional column matches its fraction within one
// file over random populations.
TEST(ArchivalTargets, CoverageProperty) {
  std::mt19937_64 g(5);
  const PolicyTable pol = default_policy();
  for (int round = 0; round < 40; ++round) {
    const std::size_t n_racs = std::uniform_int_distribution<std::size_t>(1, 5)(g);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 600)(g);
    const Topology topo = star_topology(n_racs);
    const DataTier tier = std::array{DataTier::RAW, DataTier::RECO, DataTier::DST,
                                     DataTier::MC_TMB, DataTier::MC_DST}[round % 5];
    const auto files = make_files("p" + std::to_string(round), tier, n);
    const auto plan = plan_placement(files, pol, topo);
    std::map<std::pair<bool, Medium>, std::size_t> count;  // (at RAC, medium)
    for (const auto& f : files) {
      for (const auto& t : archival_targets(f, pol, topo, plan)) {
        count[{t.station_id != "C", t.medium}] += 1;
      }
    }
    auto check = [&](PlacementColumn c, bool rac, Medium m) {
      const double f = pol.fraction(tier, c).value();
      if (f >= 1.0 || f == 0.0) return;
      const double cov = rac ? std::min(1.0, f * static_cast<double>(n_racs)) : f;
      EXPECT_LE(std::abs(static_cast<double>(count[{rac, m}]) / n - cov), 1.0 / n + 1e-12)
          << tier_name(tier) << " " << column_name(c);
    };
    check(PlacementColumn::CacDisk, false, Medium::Disk);
    check(PlacementColumn::RacTape, true, Medium::Tape);
    check(PlacementColumn::RacDisk, true, Medium::Disk);
  }
}

TEST(OnDemandBudget, Examples) {
  PolicyTable pol = default_policy();
  Station s;
  s.station_id = "R";
  s.disk_capacity = 100 * kTB;
  EXPECT_EQ(on_demand_budget(s, 52'500 * kGB, pol), 47'500 * kGB);
  EXPECT_EQ(on_demand_budget(s, 0, pol), 100 * kTB);
  s.disk_capacity = 50 * kTB;
  EXPECT_THROW(on_demand_budget(s, 48 * kTB, pol), PinnedOverflow);
  EXPECT_EQ(on_demand_budget(s, 45 * kTB, pol), 5 * kTB);
  EXPECT_THROW(on_demand_budget(s, 45 * kTB + 1, pol), PinnedOverflow);
}

TEST(OnDemandBudget, RequiredDiskIsTight) {
  const Fraction minf = Fraction::from_ppm(100'000);
  for (Bytes pinned : {Bytes{0}, Bytes{1}, Bytes{9}, 52'500 * kGB, 367'500 * kGB + 7}) {
    const Bytes d = required_disk(pinned, minf);
    EXPECT_TRUE(pin_fits(d, pinned, minf));
    if (d > 0) {
      EXPECT_FALSE(pin_fits(d - 1, pinned, minf));
    }
  }
}

}  // namespace
}  // namespace racgrid
