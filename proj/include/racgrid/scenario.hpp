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

// Simulation scenario: topology, policy, datasets, workload and run
// parameters, with structural and capacity validation.

#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "racgrid/errors.hpp"
#include "racgrid/model.hpp"
#include "racgrid/planner.hpp"
#include "racgrid/policy.hpp"

namespace racgrid {

enum class JobKind : std::uint8_t { Analysis, Reprocessing, McProduction };

constexpr std::string_view job_kind_name(JobKind k) noexcept {
  switch (k) {
    case JobKind::Analysis: return "analysis";
    case JobKind::Reprocessing: return "reprocessing";
    case JobKind::McProduction: return "mc_production";
  }
  return "?";
}

inline std::optional<JobKind> parse_job_kind(std::string_view s) noexcept {
  for (auto k : {JobKind::Analysis, JobKind::Reprocessing, JobKind::McProduction}) {
    if (job_kind_name(k) == s) return k;
  }
  return std::nullopt;
}

/// A dataset declaration; `split` > 1 expands into that many equal parts.
struct DatasetSpec {
  std::string id;
  DataTier tier = DataTier::RAW;
  std::uint64_t events = 0;
  double popularity = 1.0;
  std::uint32_t split = 1;

  bool operator==(const DatasetSpec&) const = default;
};

struct Dataset {
  std::string id;
  DataTier tier = DataTier::RAW;
  std::uint64_t events = 0;
  double popularity = 1.0;
};

/// Poisson job arrivals for one region.
struct WorkloadStream {
  std::string region_id;
  JobKind kind = JobKind::Analysis;
  DataTier tier = DataTier::TMB;
  double rate = 0.0;  // jobs per second
  double cpu_seconds_per_event = 0.0;
  std::uint32_t db_queries = 0;
  std::optional<std::uint64_t> max_jobs;
  std::uint64_t mc_events_per_job = 0;

  bool operator==(const WorkloadStream&) const = default;
};

struct DanConfig {
  std::size_t cache_capacity = 1000;
  double proxy_latency = 0.01;
  double central_latency = 0.5;
  std::uint64_t key_space = 5000;

  bool operator==(const DanConfig&) const = default;
};

struct WorkloadSpec {
  bool opportunistic_overflow = false;
  std::vector<WorkloadStream> streams;
  DanConfig dan;

  bool operator==(const WorkloadSpec&) const = default;
};

struct Scenario {
  std::string name;
  Topology topology;
  PolicyTable policy = default_policy();
  std::vector<DatasetSpec> datasets;
  WorkloadSpec workload;
  double duration = 86400.0;  // workload window, seconds
  std::uint64_t rng_seed = 1;
  Bytes target_file_size = kGB;
  std::vector<ResourceEntry> resources;
  double cpu_requirement = reference::kCpuRequirementGhz;

  bool operator==(const Scenario&) const = default;
};

inline std::vector<Dataset> expand_datasets(const std::vector<DatasetSpec>& specs) {
  std::vector<Dataset> out;
  for (const auto& d : specs) {
    if (d.split <= 1) {
      out.push_back({d.id, d.tier, d.events, d.popularity});
      continue;
    }
    const std::uint64_t base = d.events / d.split;
    const std::uint64_t extra = d.events % d.split;
    const std::size_t width = std::to_string(d.split - 1).size();
    for (std::uint32_t i = 0; i < d.split; ++i) {
      std::string idx = std::to_string(i);
      if (idx.size() < width) idx.insert(0, width - idx.size(), '0');
      out.push_back({d.id + "-" + idx, d.tier, base + (i < extra ? 1 : 0), d.popularity});
    }
  }
  return out;
}

/// Files of every dataset, in declaration order.
inline std::vector<FileRecord> scenario_files(const Scenario& s) {
  std::vector<FileRecord> out;
  for (const auto& d : expand_datasets(s.datasets)) {
    auto files = generate_dataset_files(d.id, d.tier, d.events, s.target_file_size);
    out.insert(out.end(), std::make_move_iterator(files.begin()),
               std::make_move_iterator(files.end()));
  }
  return out;
}

inline TierCounts scenario_event_counts(const Scenario& s) {
  TierCounts c{};
  for (const auto& d : s.datasets) c[tier_index(d.tier)] += d.events;
  return c;
}

inline std::uint32_t rac_count(const Topology& t) {
  return static_cast<std::uint32_t>(t.rac_ids().size());
}

/// Planner prediction for the scenario's own datasets and topology.
inline StorageReport scenario_storage(const Scenario& s) {
  return storage_totals(scenario_event_counts(s), s.policy, std::max<std::uint32_t>(1, rac_count(s.topology)));
}

/// Structural problems; an empty result means the scenario parses into
/// something the simulator can run.
inline std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> out = validate_topology(s.topology);
  for (auto& v : validate_policy(s.policy)) out.push_back(std::move(v));
  for (auto& v : validate_resources(s.resources)) out.push_back(std::move(v));
  if (!(s.duration > 0.0)) out.push_back("simulation duration must be positive");
  if (s.target_file_size == 0) out.push_back("target_file_size must be positive");

  std::set<std::string> ids;
  std::map<DataTier, double> tier_weight;
  for (const auto& d : expand_datasets(s.datasets)) {
    if (!ids.insert(d.id).second) out.push_back("duplicate dataset id: " + d.id);
    if (!(d.popularity >= 0.0)) out.push_back("negative popularity: " + d.id);
    tier_weight[d.tier] += d.popularity;
  }
  for (const auto& d : s.datasets) {
    if (d.split == 0) out.push_back("dataset split must be at least 1: " + d.id);
  }

  const auto& w = s.workload;
  if (w.dan.cache_capacity == 0) out.push_back("dan cache_capacity must be at least 1");
  if (!(w.dan.proxy_latency >= 0.0) || !(w.dan.central_latency >= 0.0)) {
    out.push_back("dan latencies must be non-negative");
  }
  if (w.dan.key_space == 0) out.push_back("dan key_space must be at least 1");
  bool any_cpu = false;
  for (const auto& st : s.topology.stations) any_cpu = any_cpu || st.cpu_power > 0.0;
  for (std::size_t i = 0; i < w.streams.size(); ++i) {
    const auto& st = w.streams[i];
    const std::string where = "workload stream " + std::to_string(i);
    if (s.topology.find_region(st.region_id) == nullptr) {
      out.push_back(where + ": unknown region " + st.region_id);
      continue;
    }
    if (!(st.rate > 0.0)) out.push_back(where + ": rate must be positive");
    if (!(st.cpu_seconds_per_event > 0.0)) {
      out.push_back(where + ": cpu_seconds_per_event must be positive");
    }
    if (st.kind == JobKind::McProduction) {
      if (st.mc_events_per_job == 0) out.push_back(where + ": mc_events_per_job must be positive");
    } else if (!(tier_weight[st.tier] > 0.0)) {
      out.push_back(where + ": no dataset of tier " + std::string(tier_name(st.tier)) +
                    " with positive popularity");
    }
    bool region_cpu = false;
    for (const auto& sta : s.topology.stations) {
      region_cpu = region_cpu || (sta.region_id == st.region_id && sta.cpu_power > 0.0 &&
                                  sta.kind != StationKind::CAC);
    }
    if (!region_cpu && !(w.opportunistic_overflow && any_cpu)) {
      out.push_back(where + ": no CPU in region " + st.region_id);
    }
  }
  return out;
}

struct CapacityFinding {
  std::string station_id;
  Medium medium = Medium::Disk;
  Bytes required = 0;   // pinned bytes (disk) or archived bytes (tape)
  Bytes capacity = 0;
  Bytes shortfall = 0;  // capacity increase that makes the station fit

  std::string message() const {
    if (medium == Medium::Disk) {
      return "pinned overflow at " + station_id + ": pinned " + std::to_string(required) +
             " bytes, disk " + std::to_string(capacity) + " bytes, shortfall " +
             std::to_string(shortfall) + " bytes";
    }
    return "tape overflow at " + station_id + ": archived " + std::to_string(required) +
           " bytes, tape " + std::to_string(capacity) + " bytes, shortfall " +
           std::to_string(shortfall) + " bytes";
  }
};

/// Exact per-station pinned and tape requirements of the scenario's files.
struct StationRequirement {
  Bytes pinned = 0;
  Bytes tape = 0;
};

inline std::map<std::string, StationRequirement> station_requirements(
    const Scenario& s, const std::vector<FileRecord>& files, const PlacementPlan& plan) {
  std::map<std::string, StationRequirement> req;
  for (const auto& st : s.topology.stations) req[st.station_id];
  for (const auto& f : files) {
    for (const auto& t : archival_targets(f, s.policy, s.topology, plan)) {
      auto& r = req[t.station_id];
      if (t.medium == Medium::Disk) {
        r.pinned += f.size;
      } else {
        r.tape += f.size * t.copy_count;
      }
    }
  }
  return req;
}

inline std::vector<CapacityFinding> capacity_check(const Scenario& s,
                                                   const std::vector<FileRecord>& files,
                                                   const PlacementPlan& plan) {
  std::vector<CapacityFinding> out;
  const auto req = station_requirements(s, files, plan);
  const Fraction minf = s.policy.on_demand_min_fraction;
  for (const auto& st : s.topology.stations) {
    const auto& r = req.at(st.station_id);
    if (!pin_fits(st.disk_capacity, r.pinned, minf)) {
      out.push_back({st.station_id, Medium::Disk, r.pinned, st.disk_capacity,
                     required_disk(r.pinned, minf) - st.disk_capacity});
    }
    if (r.tape > st.tape_capacity) {
      out.push_back({st.station_id, Medium::Tape, r.tape, st.tape_capacity,
                     r.tape - st.tape_capacity});
    }
  }
  return out;
}

inline std::vector<CapacityFinding> capacity_check(const Scenario& s) {
  const auto files = scenario_files(s);
  return capacity_check(s, files, plan_placement(files, s.policy, s.topology));
}

}  // namespace racgrid
