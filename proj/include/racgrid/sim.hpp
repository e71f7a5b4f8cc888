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

// Deterministic discrete-event simulator of the analysis-center grid:
// production at the CAC with policy-driven distribution, regional jobs,
// FIFO link transfers, tape staging, database proxy queries and metrics.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "racgrid/catalog.hpp"
#include "racgrid/errors.hpp"
#include "racgrid/model.hpp"
#include "racgrid/policy.hpp"
#include "racgrid/scenario.hpp"
#include "racgrid/station.hpp"

namespace racgrid {

/// Single seeded stream. Conversions are spelled out so the draw sequence
/// does not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  /// Index into `cumulative` (non-decreasing, last element > 0).
  std::size_t weighted(std::span<const double> cumulative) {
    const double x = uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    if (it == cumulative.end()) --it;
    return static_cast<std::size_t>(it - cumulative.begin());
  }

 private:
  std::mt19937_64 engine_;
};

enum class EventKind : std::uint8_t {
  FileProduced,
  JobSubmitted,
  TransferComplete,
  StageComplete,
  DbQuery,
  JobFinished,
};

struct SimEvent {
  double time = 0.0;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::FileProduced;
  std::uint64_t payload = 0;
};

struct Job {
  std::uint64_t job_id = 0;
  std::string region_id;
  std::string dataset_id;
  DataTier tier = DataTier::TMB;
  double cpu_seconds_per_event = 0.0;
  double submitted_at = 0.0;
  JobKind kind = JobKind::Analysis;
  std::uint64_t event_count = 0;
  std::uint32_t db_queries = 0;
};

struct StationMetrics {
  std::string station_id;
  StationKind kind = StationKind::DAS;
  std::string region_id;
  std::uint64_t requests = 0;
  std::uint64_t disk_hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t tape_stages = 0;
  std::uint64_t evictions = 0;
  std::array<std::uint64_t, kTierCount> tier_hits{};
  std::array<std::uint64_t, kTierCount> tier_misses{};
  std::uint64_t jobs_run = 0;
  Bytes pinned_bytes = 0;
  Bytes occupancy_bytes = 0;
  Bytes tape_bytes = 0;

  bool operator==(const StationMetrics&) const = default;
};

struct LinkMetrics {
  std::string link_id;
  LinkClass link_class = LinkClass::CAC_TO_RAC;
  std::uint64_t transfers = 0;
  Bytes bytes = 0;

  bool operator==(const LinkMetrics&) const = default;
};

struct LinkClassMetrics {
  std::uint64_t transfers = 0;
  Bytes bytes = 0;

  bool operator==(const LinkClassMetrics&) const = default;
};

struct JobRecord {
  std::uint64_t job_id = 0;
  std::string region_id;
  std::string station_id;
  JobKind kind = JobKind::Analysis;
  double wait = 0.0;
  double transfer = 0.0;
  double compute = 0.0;
  double total = 0.0;

  bool operator==(const JobRecord&) const = default;
};

struct Metrics {
  std::vector<StationMetrics> stations;  // sorted by station id
  std::vector<LinkMetrics> links;        // topology order
  std::array<LinkClassMetrics, 3> link_classes{};
  std::vector<JobRecord> jobs;           // completed jobs by id
  std::uint64_t jobs_submitted = 0;
  std::uint64_t jobs_completed = 0;
  std::uint64_t dan_hits = 0;
  std::uint64_t dan_misses = 0;
  std::uint64_t transfers_completed = 0;
  Bytes transfer_payload_bytes = 0;  // sum of completed transfer sizes
  Bytes transfer_hop_bytes = 0;      // sum of size x path length
  std::uint64_t tape_rejections = 0;
  std::uint64_t events_processed = 0;
  double production_end = 0.0;
  double end_time = 0.0;
  std::map<std::string, Bytes> production_pinned;  // CAC and RACs

  const StationMetrics* station(std::string_view id) const {
    for (const auto& s : stations) {
      if (s.station_id == id) return &s;
    }
    return nullptr;
  }

  bool operator==(const Metrics&) const = default;
};

class Simulator;

struct SimObserver {
  std::function<void(const SimEvent&, const Simulator&)> after_event;
  std::function<void(const std::string& station, const std::string& file)> on_evict;
};

class Simulator {
 public:
  /// Validates the scenario. Throws ValidationFailed on structural errors
  /// and CapacityViolations when a pinned set or tape volume does not fit.
  explicit Simulator(Scenario scenario, SimObserver observer = {})
      : scenario_(std::move(scenario)), observer_(std::move(observer)),
        rng_(scenario_.rng_seed) {
    scenario_.topology.refresh_members();
    if (auto v = validate_scenario(scenario_); !v.empty()) throw ValidationFailed(std::move(v));
    build_state();
    initial_files_ = scenario_files(scenario_);
    plan_ = plan_placement(initial_files_, scenario_.policy, scenario_.topology);
    if (auto c = capacity_check(scenario_, initial_files_, plan_); !c.empty()) {
      std::vector<std::string> msgs;
      for (const auto& f : c) msgs.push_back(f.message());
      throw CapacityViolations(std::move(msgs));
    }
  }

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Production phase to completion, then the workload window.
  Metrics run() {
    std::vector<std::size_t> order(initial_files_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return tier_index(initial_files_[a].tier) < tier_index(initial_files_[b].tier);
    });
    for (std::size_t i : order) {
      const std::size_t idx = add_file(initial_files_[i]);
      push(0.0, EventKind::FileProduced, idx);
    }
    drain(std::numeric_limits<double>::infinity());
    production_end_ = now_;
    for (const auto& st : stations_) {
      if (st.station->kind == StationKind::CAC || st.station->kind == StationKind::RAC) {
        production_pinned_[st.station->station_id] = st.disk.pinned_bytes();
      }
    }

    end_time_ = production_end_ + scenario_.duration;
    for (std::size_t i = 0; i < scenario_.workload.streams.size(); ++i) schedule_arrival(i);
    drain(end_time_);
    return metrics();
  }

  // -- Step-level operations -------------------------------------------------

  /// Registers a file, creates its CAC replicas and schedules transfers to
  /// every RAC target. Returns the placement targets.
  std::vector<PlacementTarget> produce_file(const FileRecord& file) {
    const std::size_t idx = add_file(file);
    return produce(idx);
  }

  /// Station chosen for the job.
  std::string schedule_job(const Job& job) { return stations_[pick_station(job)].station->station_id; }

  /// Reserves the path from `source` to `dest` and returns the ETA.
  double start_transfer(const FileRecord& file, const std::string& source, const std::string& dest) {
    const std::size_t idx = add_file(file);
    return transfer(idx, station_index(source), station_index(dest), Purpose::Fetch, false, 0);
  }

  /// Processes events with time <= `until`.
  void process_until(double until) { drain(until); }

  // -- Inspection ------------------------------------------------------------

  double now() const noexcept { return now_; }
  const Scenario& scenario() const noexcept { return scenario_; }
  const ReplicaCatalog& catalog() const noexcept { return catalog_; }
  const PlacementPlan& plan() const noexcept { return plan_; }
  const std::vector<FileRecord>& initial_files() const noexcept { return initial_files_; }
  std::size_t in_flight_transfers() const noexcept { return in_flight_; }

  const DiskCache& disk(const std::string& station_id) const {
    return stations_[station_index(station_id)].disk;
  }
  const TapeStore& tape(const std::string& station_id) const {
    return stations_[station_index(station_id)].tape;
  }
  std::size_t free_slots(const std::string& station_id) const {
    return stations_[station_index(station_id)].slots_free;
  }

  /// Occupies one CPU slot (test hook for saturation scenarios).
  void occupy_slot(const std::string& station_id) {
    auto& st = stations_[station_index(station_id)];
    if (st.slots_free == 0) throw Error("no free slot at " + station_id);
    --st.slots_free;
  }

  Metrics metrics() const {
    Metrics m;
    for (const auto& st : stations_) {
      StationMetrics sm = st.metrics;
      sm.station_id = st.station->station_id;
      sm.kind = st.station->kind;
      sm.region_id = st.station->region_id;
      sm.evictions = st.disk.stats().evictions;
      sm.pinned_bytes = st.disk.pinned_bytes();
      sm.occupancy_bytes = st.disk.occupancy();
      sm.tape_bytes = st.tape.occupancy();
      m.stations.push_back(std::move(sm));
    }
    std::sort(m.stations.begin(), m.stations.end(),
              [](const auto& a, const auto& b) { return a.station_id < b.station_id; });
    for (const auto& l : links_) {
      m.links.push_back({l.link->id(), l.link_class, l.transfers, l.bytes});
    }
    m.link_classes = class_metrics_;
    for (const auto& j : jobs_) {
      if (j.finish < 0) continue;
      m.jobs.push_back({j.job.job_id, j.job.region_id, stations_[j.station].station->station_id,
                        j.job.kind, j.start - j.job.submitted_at, j.compute_start - j.start,
                        j.finish - j.compute_start, j.finish - j.job.submitted_at});
    }
    std::sort(m.jobs.begin(), m.jobs.end(),
              [](const auto& a, const auto& b) { return a.job_id < b.job_id; });
    m.jobs_submitted = jobs_.size();
    m.jobs_completed = m.jobs.size();
    for (const auto& p : proxies_) {
      m.dan_hits += p.hits();
      m.dan_misses += p.misses();
    }
    m.transfers_completed = transfers_completed_;
    m.transfer_payload_bytes = payload_bytes_;
    m.transfer_hop_bytes = hop_bytes_;
    m.tape_rejections = tape_rejections_;
    m.events_processed = events_processed_;
    m.production_end = production_end_;
    m.end_time = end_time_;
    m.production_pinned = production_pinned_;
    return m;
  }

 private:
  enum class Purpose : std::uint8_t { Production, Fetch, McUpload };

  struct StationState {
    const Station* station = nullptr;
    DiskCache disk;
    TapeStore tape;
    std::vector<double> drive_free;
    std::size_t slots_total = 0;
    std::size_t slots_free = 0;
    std::deque<std::size_t> waiting;  // job indices
    std::size_t region = kNone;       // index into proxies_/regions
    std::size_t region_rac = kNone;   // station index of the region's RAC
    StationMetrics metrics;
  };

  struct LinkState {
    const NetworkLink* link = nullptr;
    LinkClass link_class = LinkClass::CAC_TO_RAC;
    double free_at = 0.0;
    std::uint64_t transfers = 0;
    Bytes bytes = 0;
  };

  struct Transfer {
    std::size_t file = 0;
    std::size_t src = 0;
    std::size_t dst = 0;
    std::vector<std::size_t> path;
    Purpose purpose = Purpose::Fetch;
    bool pin = false;
    std::uint32_t tape_copies = 0;
  };

  struct Stage {
    std::size_t file = 0;
    std::size_t src = 0;
    std::size_t dst = 0;
  };

  struct JobState {
    Job job;
    std::size_t stream = 0;
    std::size_t dataset = kNone;
    std::size_t station = kNone;
    std::uint32_t outstanding = 0;
    bool db_done = true;
    bool computing = false;
    double start = -1.0;
    double db_ready = 0.0;
    double compute_start = -1.0;
    double finish = -1.0;
  };

  struct EventOrder {
    bool operator()(const SimEvent& a, const SimEvent& b) const noexcept {
      if (a.time != b.time) return a.time > b.time;
      return a.sequence > b.sequence;
    }
  };

  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  // -- Setup -----------------------------------------------------------------

  void build_state() {
    const auto& topo = scenario_.topology;
    std::map<std::string, std::size_t> region_index;
    for (const auto& r : topo.regions) {
      region_index[r.region_id] = proxies_.size();
      proxies_.emplace_back(r.region_id, scenario_.workload.dan.cache_capacity,
                            scenario_.workload.dan.proxy_latency);
    }
    stations_.reserve(topo.stations.size());
    for (const auto& s : topo.stations) {
      StationState st{&s,
                      DiskCache(s.disk_capacity, scenario_.policy.on_demand_min_fraction),
                      TapeStore(s.tape_capacity, s.tape),
                      std::vector<double>(s.tape.drives, 0.0),
                      0, 0, {}, kNone, kNone, {}};
      if (s.cpu_power > 0.0) {
        st.slots_total = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(s.cpu_power)));
      }
      st.slots_free = st.slots_total;
      if (auto it = region_index.find(s.region_id); it != region_index.end()) st.region = it->second;
      station_index_[s.station_id] = stations_.size();
      stations_.push_back(std::move(st));
    }
    for (auto& st : stations_) {
      if (st.region == kNone) continue;
      st.region_rac = station_index(topo.regions[st.region].rac_id);
    }
    if (const Station* c = topo.cac()) cac_ = station_index(c->station_id);

    adjacency_.assign(stations_.size(), {});
    for (const auto& l : topo.links) {
      const std::size_t li = links_.size();
      links_.push_back({&l, *derive_link_class(topo, l), 0.0, 0, 0});
      const std::size_t a = station_index(l.endpoint_a);
      const std::size_t b = station_index(l.endpoint_b);
      adjacency_[a].push_back({b, li});
      adjacency_[b].push_back({a, li});
    }
    for (auto& adj : adjacency_) {
      std::sort(adj.begin(), adj.end(), [&](const auto& x, const auto& y) {
        const auto& ix = stations_[x.first].station->station_id;
        const auto& iy = stations_[y.first].station->station_id;
        return ix != iy ? ix < iy : x.second < y.second;
      });
    }

    const auto all = expand_datasets(scenario_.datasets);
    for (const auto& d : all) datasets_.push_back({d, {}, 0});
    for (std::size_t i = 0; i < datasets_.size(); ++i) dataset_index_[datasets_[i].spec.id] = i;
    for (const auto& s : scenario_.workload.streams) {
      StreamState ss;
      if (s.kind != JobKind::McProduction) {
        double acc = 0.0;
        for (std::size_t i = 0; i < datasets_.size(); ++i) {
          if (datasets_[i].spec.tier != s.tier || !(datasets_[i].spec.popularity > 0.0)) continue;
          acc += datasets_[i].spec.popularity;
          ss.candidates.push_back(i);
          ss.cumulative.push_back(acc);
        }
      }
      streams_.push_back(std::move(ss));
    }
  }

  std::size_t station_index(const std::string& id) const {
    auto it = station_index_.find(id);
    if (it == station_index_.end()) throw UnknownStation(id);
    return it->second;
  }

  std::size_t add_file(const FileRecord& f) {
    if (auto it = file_index_.find(f.file_id); it != file_index_.end()) return it->second;
    const std::size_t idx = files_.size();
    files_.push_back(f);
    file_index_.emplace(f.file_id, idx);
    catalog_.register_file(f);
    if (auto it = dataset_index_.find(f.dataset_id); it != dataset_index_.end()) {
      datasets_[it->second].files.push_back(idx);
      datasets_[it->second].bytes += f.size;
    }
    return idx;
  }

  // -- Event loop ------------------------------------------------------------

  void push(double time, EventKind kind, std::uint64_t payload) {
    queue_.push({time, next_sequence_++, kind, payload});
  }

  void drain(double until) {
    while (!queue_.empty() && queue_.top().time <= until) {
      const SimEvent ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      dispatch(ev);
      ++events_processed_;
      if (observer_.after_event) observer_.after_event(ev, *this);
    }
  }

  void dispatch(const SimEvent& ev) {
    switch (ev.kind) {
      case EventKind::FileProduced: produce(ev.payload); break;
      case EventKind::JobSubmitted: on_job_submitted(ev.payload); break;
      case EventKind::TransferComplete: on_transfer_complete(ev.payload); break;
      case EventKind::StageComplete: on_stage_complete(ev.payload); break;
      case EventKind::DbQuery: on_db_query(ev.payload); break;
      case EventKind::JobFinished: on_job_finished(ev.payload); break;
    }
  }

  // -- Production ------------------------------------------------------------

  std::vector<PlacementTarget> produce(std::size_t idx) {
    const FileRecord& f = files_[idx];
    auto targets = archival_targets(f, scenario_.policy, scenario_.topology, plan_);
    struct Pending {
      bool pin = false;
      std::uint32_t tape = 0;
    };
    std::map<std::size_t, Pending> remote;
    for (const auto& t : targets) {
      const std::size_t si = station_index(t.station_id);
      if (si == cac_) {
        if (t.medium == Medium::Disk) {
          pin_at(si, idx);
        } else {
          archive_at(si, idx, t.copy_count);
        }
        continue;
      }
      auto& p = remote[si];
      if (t.medium == Medium::Disk) {
        p.pin = true;
      } else {
        p.tape += t.copy_count;
      }
    }
    for (const auto& [si, p] : remote) transfer(idx, cac_, si, Purpose::Production, p.pin, p.tape);
    return targets;
  }

  void pin_at(std::size_t si, std::size_t fi) {
    auto& st = stations_[si];
    const FileRecord& f = files_[fi];
    const bool was_cached = st.disk.is_cached(f.file_id);
    for (const auto& victim : st.disk.pin(f.file_id, f.size)) evicted(si, victim);
    if (was_cached) {
      catalog_.remove_replica({f.file_id, st.station->station_id, Medium::Disk, false, 0});
    }
    catalog_.add_replica({f.file_id, st.station->station_id, Medium::Disk, true, 0});
  }

  void archive_at(std::size_t si, std::size_t fi, std::uint32_t copies) {
    auto& st = stations_[si];
    const FileRecord& f = files_[fi];
    try {
      st.tape.write(f.size * copies);
    } catch (const TapeOverflow&) {
      ++tape_rejections_;
      return;
    }
    std::uint32_t first = 0;
    for (const auto& r : catalog_.replicas(f.file_id)) {
      if (r.station_id == st.station->station_id && r.medium == Medium::Tape) {
        first = std::max(first, r.copy_index + 1);
      }
    }
    for (std::uint32_t c = 0; c < copies; ++c) {
      catalog_.add_replica({f.file_id, st.station->station_id, Medium::Tape, false, first + c});
    }
  }

  void evicted(std::size_t si, const std::string& file_id) {
    const auto& id = stations_[si].station->station_id;
    catalog_.remove_replica({file_id, id, Medium::Disk, false, 0});
    if (observer_.on_evict) observer_.on_evict(id, file_id);
  }

  // -- Network ---------------------------------------------------------------

  /// Fewest-hop path; neighbors visited in station-id order.
  const std::vector<std::size_t>& route(std::size_t src, std::size_t dst) {
    const auto key = std::make_pair(src, dst);
    if (auto it = routes_.find(key); it != routes_.end()) return it->second;
    std::vector<std::pair<std::size_t, std::size_t>> prev(stations_.size(), {kNone, kNone});
    std::vector<bool> seen(stations_.size(), false);
    std::deque<std::size_t> frontier{src};
    seen[src] = true;
    while (!frontier.empty() && !seen[dst]) {
      const std::size_t cur = frontier.front();
      frontier.pop_front();
      for (const auto& [next, li] : adjacency_[cur]) {
        if (seen[next]) continue;
        seen[next] = true;
        prev[next] = {cur, li};
        frontier.push_back(next);
      }
    }
    if (!seen[dst]) {
      throw NoPath(stations_[src].station->station_id, stations_[dst].station->station_id);
    }
    std::vector<std::size_t> path;
    for (std::size_t at = dst; at != src; at = prev[at].first) path.push_back(prev[at].second);
    std::reverse(path.begin(), path.end());
    return routes_.emplace(key, std::move(path)).first->second;
  }

  /// Store-and-forward over each hop; a link is busy for size/bandwidth
  /// and serves transfers in reservation order.
  double transfer(std::size_t fi, std::size_t src, std::size_t dst, Purpose purpose, bool pin,
                  std::uint32_t tape_copies) {
    Transfer tr{fi, src, dst, {}, purpose, pin, tape_copies};
    double t = now_;
    if (src != dst) {
      tr.path = route(src, dst);
      const double size = static_cast<double>(files_[fi].size);
      for (std::size_t li : tr.path) {
        auto& l = links_[li];
        const double begin = std::max(t, l.free_at);
        const double busy = size / l.link->bandwidth;
        l.free_at = begin + busy;
        t = begin + busy + l.link->latency;
      }
    }
    const std::size_t id = transfers_.size();
    transfers_.push_back(std::move(tr));
    ++in_flight_;
    push(t, EventKind::TransferComplete, id);
    return t;
  }

  void on_transfer_complete(std::size_t id) {
    const Transfer& tr = transfers_[id];
    --in_flight_;
    const Bytes size = files_[tr.file].size;
    for (std::size_t li : tr.path) {
      auto& l = links_[li];
      l.bytes += size;
      ++l.transfers;
      auto& cm = class_metrics_[static_cast<std::size_t>(l.link_class)];
      cm.bytes += size;
      ++cm.transfers;
    }
    if (!tr.path.empty()) {
      ++transfers_completed_;
      payload_bytes_ += size;
      hop_bytes_ += size * tr.path.size();
    }
    switch (tr.purpose) {
      case Purpose::Production:
        if (tr.pin) pin_at(tr.dst, tr.file);
        if (tr.tape_copies > 0) archive_at(tr.dst, tr.file, tr.tape_copies);
        break;
      case Purpose::Fetch: deliver(tr.file, tr.dst); break;
      case Purpose::McUpload: archive_at(tr.dst, tr.file, 1); break;
    }
  }

  void on_stage_complete(std::size_t id) {
    const Stage s = stages_[id];
    if (s.src == s.dst) {
      deliver(s.file, s.dst);
    } else {
      transfer(s.file, s.src, s.dst, Purpose::Fetch, false, 0);
    }
  }

  /// Fetched file lands at `si`: cache it and release waiting jobs.
  void deliver(std::size_t fi, std::size_t si) {
    auto& st = stations_[si];
    const FileRecord& f = files_[fi];
    if (!st.disk.contains(f.file_id) && f.size <= st.disk.on_demand_capacity()) {
      for (const auto& victim : st.disk.admit(f.file_id, f.size)) evicted(si, victim);
      catalog_.add_replica({f.file_id, st.station->station_id, Medium::Disk, false, 0});
    }
    auto it = pending_.find({si, fi});
    if (it == pending_.end()) return;
    std::vector<std::size_t> waiting = std::move(it->second);
    pending_.erase(it);
    for (std::size_t j : waiting) {
      --jobs_[j].outstanding;
      maybe_compute(j);
    }
  }

  void fetch(std::size_t fi, std::size_t si, std::size_t job) {
    auto [it, fresh] = pending_.try_emplace({si, fi});
    it->second.push_back(job);
    ++jobs_[job].outstanding;
    if (!fresh) return;
    const auto src = resolve_source(catalog_, scenario_.topology, files_[fi].file_id,
                                    stations_[si].station->station_id,
                                    {scenario_.policy.foreign_rac_before_cac});
    const std::size_t from = station_index(src.station_id);
    if (src.medium == Medium::Disk) {
      transfer(fi, from, si, Purpose::Fetch, false, 0);
      return;
    }
    auto& tape_station = stations_[from];
    auto drive = std::min_element(tape_station.drive_free.begin(), tape_station.drive_free.end());
    const double begin = std::max(now_, *drive);
    *drive = begin + tape_stage_time(tape_station.tape, files_[fi].size);
    ++tape_station.metrics.tape_stages;
    const std::size_t id = stages_.size();
    stages_.push_back({fi, from, si});
    push(*drive, EventKind::StageComplete, id);
  }

  // -- Jobs ------------------------------------------------------------------

  void schedule_arrival(std::size_t stream) {
    const auto& s = scenario_.workload.streams[stream];
    if (s.max_jobs && streams_[stream].emitted >= *s.max_jobs) return;
    const double t = now_ + rng_.exponential(s.rate);
    if (t > end_time_) return;
    ++streams_[stream].emitted;
    push(t, EventKind::JobSubmitted, stream);
  }

  void on_job_submitted(std::size_t stream) {
    const auto& s = scenario_.workload.streams[stream];
    auto& ss = streams_[stream];
    JobState js;
    js.stream = stream;
    js.job.job_id = jobs_.size() + 1;
    js.job.region_id = s.region_id;
    js.job.kind = s.kind;
    js.job.tier = s.tier;
    js.job.cpu_seconds_per_event = s.cpu_seconds_per_event;
    js.job.submitted_at = now_;
    js.job.db_queries = s.db_queries;
    if (s.kind == JobKind::McProduction) {
      js.job.event_count = s.mc_events_per_job;
    } else {
      js.dataset = ss.candidates[rng_.weighted(ss.cumulative)];
      js.job.dataset_id = datasets_[js.dataset].spec.id;
      js.job.event_count = datasets_[js.dataset].spec.events;
    }
    const std::size_t j = jobs_.size();
    jobs_.push_back(std::move(js));
    schedule_arrival(stream);

    const std::size_t si = pick_station(jobs_[j].job, jobs_[j].dataset);
    jobs_[j].station = si;
    auto& st = stations_[si];
    if (st.slots_free > 0) {
      start_job(j);
    } else {
      st.waiting.push_back(j);
    }
  }

  /// Bytes of the dataset on the station's disk, or on its RAC's disk for
  /// institutional and desktop stations.
  Bytes locality(std::size_t si, std::size_t dataset) const {
    if (dataset == kNone) return 0;
    const auto& st = stations_[si];
    const std::string& id = st.station->station_id;
    const bool via_rac = (st.station->kind == StationKind::IAC ||
                          st.station->kind == StationKind::DAS) && st.region_rac != kNone;
    const std::string* rac = via_rac ? &stations_[st.region_rac].station->station_id : nullptr;
    Bytes b = 0;
    for (std::size_t fi : datasets_[dataset].files) {
      const auto& fid = files_[fi].file_id;
      if (catalog_.has_replica(fid, id, Medium::Disk) ||
          (rac != nullptr && catalog_.has_replica(fid, *rac, Medium::Disk))) {
        b += files_[fi].size;
      }
    }
    return b;
  }

  std::size_t pick_station(const Job& job, std::size_t dataset = kNone) {
    if (dataset == kNone && !job.dataset_id.empty()) {
      if (auto it = dataset_index_.find(job.dataset_id); it != dataset_index_.end()) {
        dataset = it->second;
      }
    }
    std::vector<std::size_t> local;
    std::vector<std::size_t> foreign_free;
    bool local_free = false;
    for (std::size_t i = 0; i < stations_.size(); ++i) {
      const auto& st = stations_[i];
      if (st.slots_total == 0) continue;
      if (st.station->region_id == job.region_id && st.station->kind != StationKind::CAC) {
        local.push_back(i);
        local_free = local_free || st.slots_free > 0;
      } else if (st.slots_free > 0) {
        foreign_free.push_back(i);
      }
    }
    const std::vector<std::size_t>* pool = &local;
    if (scenario_.workload.opportunistic_overflow && !local_free && !foreign_free.empty()) {
      pool = &foreign_free;
    }
    if (pool->empty()) throw NoCpuInRegion(job.region_id);
    std::size_t best = kNone;
    Bytes best_loc = 0;
    for (std::size_t i : *pool) {
      const Bytes loc = locality(i, dataset);
      if (best == kNone) {
        best = i;
        best_loc = loc;
        continue;
      }
      const auto& a = stations_[i];
      const auto& b = stations_[best];
      const bool better =
          loc != best_loc ? loc > best_loc
          : a.slots_free != b.slots_free ? a.slots_free > b.slots_free
                                         : a.station->station_id < b.station->station_id;
      if (better) {
        best = i;
        best_loc = loc;
      }
    }
    return best;
  }

  void start_job(std::size_t j) {
    auto& js = jobs_[j];
    auto& st = stations_[js.station];
    --st.slots_free;
    ++st.metrics.jobs_run;
    js.start = now_;
    if (js.dataset != kNone) {
      const auto& files = datasets_[js.dataset].files;
      for (std::size_t fi : files) {
        const FileRecord& f = files_[fi];
        ++st.metrics.requests;
        if (st.disk.request(f.file_id) == CacheOutcome::DiskHit) {
          ++st.metrics.disk_hits;
          ++st.metrics.tier_hits[tier_index(f.tier)];
        } else {
          ++st.metrics.misses;
          ++st.metrics.tier_misses[tier_index(f.tier)];
          fetch(fi, js.station, j);
        }
      }
    }
    if (js.job.db_queries > 0) {
      js.db_done = false;
      push(now_, EventKind::DbQuery, j);
    }
    maybe_compute(j);
  }

  void on_db_query(std::size_t j) {
    auto& js = jobs_[j];
    const auto& dan = scenario_.workload.dan;
    double latency = 0.0;
    // Queries go to the proxy of the region the job runs in.
    std::size_t region = stations_[js.station].region;
    if (region == kNone) region = region_of(js.job.region_id);
    for (std::uint32_t q = 0; q < js.job.db_queries; ++q) {
      const std::string key = "calib-" + std::to_string(rng_.below(dan.key_space));
      latency += proxies_[region].query(key, dan.central_latency).latency;
    }
    js.db_ready = now_ + latency;
    js.db_done = true;
    maybe_compute(j);
  }

  std::size_t region_of(const std::string& region_id) const {
    for (std::size_t i = 0; i < proxies_.size(); ++i) {
      if (proxies_[i].region_id() == region_id) return i;
    }
    throw Error("unknown region " + region_id);
  }

  void maybe_compute(std::size_t j) {
    auto& js = jobs_[j];
    if (js.computing || js.outstanding > 0 || !js.db_done) return;
    js.computing = true;
    js.compute_start = std::max(now_, js.db_ready);
    const double compute = static_cast<double>(js.job.event_count) * js.job.cpu_seconds_per_event;
    push(js.compute_start + compute, EventKind::JobFinished, j);
  }

  void on_job_finished(std::size_t j) {
    auto& js = jobs_[j];
    js.finish = now_;
    auto& st = stations_[js.station];
    ++st.slots_free;
    if (js.job.kind == JobKind::McProduction) {
      FileRecord out{"mc." + std::to_string(js.job.job_id), js.job.tier, "mc-output",
                     js.job.event_count * event_bytes(js.job.tier), js.job.event_count, now_};
      const std::size_t fi = add_file(out);
      if (js.station == cac_) {
        archive_at(cac_, fi, 1);
      } else {
        transfer(fi, js.station, cac_, Purpose::McUpload, false, 0);
      }
    }
    if (!st.waiting.empty()) {
      const std::size_t next = st.waiting.front();
      st.waiting.pop_front();
      start_job(next);
    }
  }

  struct DatasetState {
    Dataset spec;
    std::vector<std::size_t> files;
    Bytes bytes = 0;
  };

  struct StreamState {
    std::vector<std::size_t> candidates;
    std::vector<double> cumulative;
    std::uint64_t emitted = 0;
  };

  Scenario scenario_;
  SimObserver observer_;
  Rng rng_;
  ReplicaCatalog catalog_;
  PlacementPlan plan_;
  std::vector<FileRecord> initial_files_;

  std::vector<StationState> stations_;
  std::unordered_map<std::string, std::size_t> station_index_;
  std::size_t cac_ = kNone;
  std::vector<LinkState> links_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> routes_;
  std::vector<DanProxy> proxies_;

  std::vector<FileRecord> files_;
  std::unordered_map<std::string, std::size_t> file_index_;
  std::vector<DatasetState> datasets_;
  std::unordered_map<std::string, std::size_t> dataset_index_;
  std::vector<StreamState> streams_;
  std::vector<JobState> jobs_;

  std::vector<Transfer> transfers_;
  std::vector<Stage> stages_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> pending_;
  std::size_t in_flight_ = 0;

  std::priority_queue<SimEvent, std::vector<SimEvent>, EventOrder> queue_;
  std::uint64_t next_sequence_ = 0;
  double now_ = 0.0;
  double production_end_ = 0.0;
  double end_time_ = 0.0;

  std::array<LinkClassMetrics, 3> class_metrics_{};
  std::uint64_t transfers_completed_ = 0;
  Bytes payload_bytes_ = 0;
  Bytes hop_bytes_ = 0;
  std::uint64_t tape_rejections_ = 0;
  std::uint64_t events_processed_ = 0;
  std::map<std::string, Bytes> production_pinned_;
};

/// Validates and runs a scenario to completion.
inline Metrics run(const Scenario& scenario) { return Simulator(scenario).run(); }

}  // namespace racgrid
