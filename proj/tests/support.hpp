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

// Shared fixtures and reference implementations for the test suites.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "racgrid/model.hpp"
#include "racgrid/scenario.hpp"

namespace racgrid::testing {

inline Station make_station(std::string id, StationKind kind, std::string region,
                            std::optional<std::string> parent, Bytes disk, Bytes tape = 0,
                            double cpu = 0.0) {
  Station s;
  s.station_id = std::move(id);
  s.kind = kind;
  s.region_id = std::move(region);
  s.parent_id = std::move(parent);
  s.disk_capacity = disk;
  s.tape_capacity = tape;
  s.cpu_power = cpu;
  return s;
}

inline NetworkLink make_link(std::string a, std::string b, double bw, double latency = 0.0) {
  return NetworkLink{std::move(a), std::move(b), bw, latency};
}

/// CAC "C" plus RACs "R0".."R{n-1}" in regions "r0".., each with
/// `iacs` institutes "R{i}-I{j}" and optionally one desktop per institute.
inline Topology star_topology(std::size_t n_racs, std::size_t iacs = 0, bool das = false,
                              Bytes rac_disk = 10 * kTB, Bytes cac_disk = 100 * kTB) {
  Topology t;
  t.stations.push_back(make_station("C", StationKind::CAC, "central", std::nullopt, cac_disk,
                                    10 * kPB, 100));
  for (std::size_t i = 0; i < n_racs; ++i) {
    const std::string rac = "R" + std::to_string(i);
    const std::string region = "r" + std::to_string(i);
    t.stations.push_back(make_station(rac, StationKind::RAC, region, "C", rac_disk, 10 * kPB, 10));
    t.regions.push_back(Region{region, region, rac, {}});
    t.links.push_back(make_link("C", rac, 1e9, 0.01));
    for (std::size_t j = 0; j < iacs; ++j) {
      const std::string iac = rac + "-I" + std::to_string(j);
      t.stations.push_back(make_station(iac, StationKind::IAC, region, rac, kTB, 0, 4));
      t.links.push_back(make_link(rac, iac, 1e8, 0.001));
      if (das) {
        const std::string d = iac + "-D";
        t.stations.push_back(make_station(d, StationKind::DAS, region, iac, 100 * kGB, 0, 1));
        t.links.push_back(make_link(iac, d, 1e8, 0.001));
      }
    }
  }
  t.refresh_members();
  return t;
}

inline std::vector<FileRecord> make_files(const std::string& prefix, DataTier tier, std::size_t n,
                                          Bytes size = kGB) {
  std::vector<FileRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(FileRecord{prefix + "." + std::to_string(i), tier, prefix, size,
                             size / event_bytes(tier), 0.0});
  }
  return out;
}

/// Reference LRU cache: every entry carries a last-use timestamp and the
/// victim is found by scanning for the minimum. Pinned entries are stored
/// separately and never scanned.
class NaiveLru {
 public:
  NaiveLru(Bytes capacity) : capacity_(capacity) {}

  bool request(const std::string& id) {
    ++clock_;
    if (pinned_.contains(id)) return true;
    auto it = entries_.find(id);
    if (it == entries_.end()) return false;
    it->second.stamp = clock_;
    return true;
  }

  std::vector<std::string> admit(const std::string& id, Bytes size) {
    ++clock_;
    std::vector<std::string> evicted;
    if (pinned_.contains(id)) return evicted;
    if (auto it = entries_.find(id); it != entries_.end()) {
      it->second.stamp = clock_;
      return evicted;
    }
    while (used() + size > capacity_) evicted.push_back(evict());
    entries_[id] = {size, clock_};
    return evicted;
  }

  std::vector<std::string> pin(const std::string& id, Bytes size) {
    ++clock_;
    entries_.erase(id);
    pinned_[id] = size;
    std::vector<std::string> evicted;
    while (used() > capacity_) evicted.push_back(evict());
    return evicted;
  }

  Bytes used() const {
    Bytes b = 0;
    for (const auto& [_, s] : pinned_) b += s;
    for (const auto& [_, e] : entries_) b += e.size;
    return b;
  }

  std::vector<std::string> resident() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : entries_) out.push_back(id);
    return out;
  }

 private:
  struct Entry {
    Bytes size = 0;
    std::uint64_t stamp = 0;
  };

  std::string evict() {
    auto victim = entries_.begin();
    for (auto it = entries_.begin(); it != entries_.end(); ++it) {
      if (it->second.stamp < victim->second.stamp) victim = it;
    }
    std::string id = victim->first;
    entries_.erase(victim);
    return id;
  }

  Bytes capacity_;
  std::uint64_t clock_ = 0;
  std::map<std::string, Bytes> pinned_;
  std::map<std::string, Entry> entries_;
};

/// Small random but always valid scenario: 1-3 regions with optional
/// institutes, a handful of datasets over several tiers, and a light mix of
/// analysis and MC streams. Disks are sized from the exact requirements.
inline Scenario random_scenario(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(g);
  };
  Scenario s;
  s.name = "random-" + std::to_string(seed);
  s.rng_seed = seed * 7919 + 1;
  s.target_file_size = 100 * kMB;
  s.duration = 3600.0 * static_cast<double>(pick(1, 4));
  const std::size_t n_racs = pick(1, 3);
  s.topology = star_topology(n_racs, pick(0, 2), pick(0, 1) == 1, kTB, kTB);
  for (std::size_t i = 0; i + 1 < n_racs; ++i) {
    s.topology.links.push_back(make_link("R" + std::to_string(i), "R" + std::to_string(i + 1),
                                         5e8, 0.02));
  }
  for (auto& l : s.topology.links) l.bandwidth = static_cast<double>(pick(50, 1000)) * 1e6;

  const DataTier tiers[] = {DataTier::RAW, DataTier::RECO, DataTier::DST, DataTier::TMB,
                            DataTier::DERIVED, DataTier::MC_TMB, DataTier::MC_DST};
  for (DataTier t : tiers) {
    if (pick(0, 3) == 0) continue;
    DatasetSpec d;
    d.id = std::string(tier_name(t)) + "-ds";
    d.tier = t;
    d.events = pick(1, 40) * (100 * kMB / event_bytes(t)) + pick(0, 500);
    d.split = static_cast<std::uint32_t>(pick(1, 4));
    d.popularity = static_cast<double>(pick(1, 5));
    s.datasets.push_back(d);
  }
  if (s.datasets.empty()) s.datasets.push_back({"tmb", DataTier::TMB, 200'000, 1.0, 2});

  for (std::size_t i = 0; i < n_racs; ++i) {
    const std::string region = "r" + std::to_string(i);
    for (const auto& d : s.datasets) {
      if (pick(0, 1) == 0) continue;
      WorkloadStream w;
      w.region_id = region;
      w.tier = d.tier;
      w.kind = d.tier == DataTier::RAW ? JobKind::Reprocessing : JobKind::Analysis;
      w.rate = static_cast<double>(pick(1, 20)) / 1000.0;
      w.cpu_seconds_per_event = 1e-4;
      w.db_queries = static_cast<std::uint32_t>(pick(0, 3));
      s.workload.streams.push_back(w);
    }
    if (pick(0, 2) == 0) {
      WorkloadStream mc;
      mc.region_id = region;
      mc.kind = JobKind::McProduction;
      mc.tier = DataTier::MC_TMB;
      mc.rate = 0.002;
      mc.cpu_seconds_per_event = 0.01;
      mc.mc_events_per_job = pick(100, 5000);
      s.workload.streams.push_back(mc);
    }
  }
  s.workload.opportunistic_overflow = pick(0, 1) == 1;
  s.workload.dan.cache_capacity = pick(1, 50);
  s.workload.dan.key_space = pick(1, 200);

  // Size every CAC/RAC disk to exactly its pin requirement plus slack so
  // the on-demand area sees evictions.
  const auto files = scenario_files(s);
  const auto plan = plan_placement(files, s.policy, s.topology);
  const auto req = station_requirements(s, files, plan);
  for (auto& st : s.topology.stations) {
    const auto& r = req.at(st.station_id);
    if (st.kind == StationKind::CAC || st.kind == StationKind::RAC) {
      st.disk_capacity = required_disk(r.pinned, s.policy.on_demand_min_fraction) +
                         pick(1, 20) * 100 * kMB;
      st.tape_capacity = r.tape + 100 * kGB;
    } else {
      st.disk_capacity = pick(2, 30) * 100 * kMB;
    }
  }
  return s;
}

}  // namespace racgrid::testing
