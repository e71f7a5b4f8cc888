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

// Replica catalog, hierarchical source resolution and the regional
// database proxy.

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "racgrid/errors.hpp"
#include "racgrid/model.hpp"
#include "racgrid/recency_list.hpp"

namespace racgrid {

struct Replica {
  std::string file_id;
  std::string station_id;
  Medium medium = Medium::Disk;
  bool pinned = false;
  std::uint32_t copy_index = 0;

  /// Identity excludes the pin flag.
  bool same_slot(const Replica& o) const noexcept {
    return file_id == o.file_id && station_id == o.station_id && medium == o.medium &&
           copy_index == o.copy_index;
  }

  auto key() const noexcept { return std::tie(file_id, station_id, medium, copy_index); }
  bool operator==(const Replica&) const = default;
};

inline bool operator<(const Replica& a, const Replica& b) noexcept { return a.key() < b.key(); }

/// One replica per line: file, station, medium, pinned flag, copy index.
inline std::string format_replica(const Replica& r) {
  std::string out;
  out.reserve(r.file_id.size() + r.station_id.size() + 16);
  out += r.file_id;
  out += '\t';
  out += r.station_id;
  out += '\t';
  out += medium_name(r.medium);
  out += '\t';
  out += r.pinned ? '1' : '0';
  out += '\t';
  out += std::to_string(r.copy_index);
  return out;
}

inline std::optional<Replica> parse_replica(std::string_view line) {
  std::array<std::string_view, 5> f;
  std::size_t n = 0;
  for (;;) {
    auto tab = line.find('\t');
    if (n == f.size()) return std::nullopt;
    f[n++] = line.substr(0, tab);
    if (tab == std::string_view::npos) break;
    line.remove_prefix(tab + 1);
  }
  if (n != f.size() || f[0].empty() || f[1].empty()) return std::nullopt;
  Replica r;
  r.file_id = std::string(f[0]);
  r.station_id = std::string(f[1]);
  auto m = parse_medium(f[2]);
  if (!m) return std::nullopt;
  r.medium = *m;
  if (f[3] == "1") {
    r.pinned = true;
  } else if (f[3] != "0") {
    return std::nullopt;
  }
  auto [ptr, ec] = std::from_chars(f[4].data(), f[4].data() + f[4].size(), r.copy_index);
  if (ec != std::errc{} || ptr != f[4].data() + f[4].size()) return std::nullopt;
  return r;
}

/// File registry plus forward and reverse replica indices. Single writer;
/// concurrent readers are fine between mutations.
class ReplicaCatalog {
 public:
  void register_file(FileRecord file) {
    std::string id = file.file_id;
    auto [it, inserted] = files_.try_emplace(std::move(id));
    if (!inserted) throw DuplicateFile(it->first);
    it->second.record = std::move(file);
  }

  bool contains(const std::string& file_id) const { return files_.contains(file_id); }
  std::size_t file_count() const noexcept { return files_.size(); }
  std::size_t replica_count() const noexcept { return replica_count_; }

  const FileRecord& file(const std::string& file_id) const { return entry(file_id).record; }

  const std::vector<Replica>& replicas(const std::string& file_id) const {
    return entry(file_id).replicas;
  }

  /// Replicas of a file in key order.
  std::vector<Replica> locate(const std::string& file_id) const {
    std::vector<Replica> out = entry(file_id).replicas;
    std::sort(out.begin(), out.end());
    return out;
  }

  bool has_replica(const std::string& file_id, const std::string& station_id,
                   Medium medium) const {
    auto it = files_.find(file_id);
    if (it == files_.end()) return false;
    return std::any_of(it->second.replicas.begin(), it->second.replicas.end(),
                       [&](const Replica& r) {
                         return r.station_id == station_id && r.medium == medium;
                       });
  }

  void add_replica(Replica r) {
    if (r.pinned && r.medium != Medium::Disk) {
      throw Error("pinned replica must be on disk: " + format_replica(r));
    }
    auto& e = entry(r.file_id);
    for (const auto& existing : e.replicas) {
      if (existing.same_slot(r)) throw Error("replica already present: " + format_replica(r));
    }
    ++reverse_[r.station_id][static_cast<std::size_t>(r.medium)][r.file_id];
    e.replicas.push_back(std::move(r));
    ++replica_count_;
  }

  /// Removing a pinned replica requires `unpin`.
  void remove_replica(const Replica& r, bool unpin = false) {
    auto& e = entry(r.file_id);
    auto it = std::find_if(e.replicas.begin(), e.replicas.end(),
                           [&](const Replica& x) { return x.same_slot(r); });
    if (it == e.replicas.end()) throw UnknownReplica("unknown replica: " + format_replica(r));
    if (it->pinned && !unpin) {
      throw PinnedRemovalRefused("refusing to remove pinned replica: " + format_replica(r));
    }
    auto& per_medium = reverse_[r.station_id][static_cast<std::size_t>(r.medium)];
    auto rit = per_medium.find(r.file_id);
    if (--rit->second == 0) per_medium.erase(rit);
    e.replicas.erase(it);
    --replica_count_;
  }

  /// file_id -> number of replicas of that medium at the station.
  const std::map<std::string, std::uint32_t>& files_at(const std::string& station_id,
                                                       Medium medium) const {
    static const std::map<std::string, std::uint32_t> empty;
    auto it = reverse_.find(station_id);
    if (it == reverse_.end()) return empty;
    return it->second[static_cast<std::size_t>(medium)];
  }

  std::vector<std::string> file_ids() const {
    std::vector<std::string> out;
    out.reserve(files_.size());
    for (const auto& [id, _] : files_) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Every replica, one per line, sorted by (file, station, medium, copy).
  void dump(std::ostream& os) const {
    for (const auto& id : file_ids()) {
      for (const auto& r : locate(id)) os << format_replica(r) << '\n';
    }
  }

  /// Adds every replica of a dump; the files must already be registered.
  void load(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto r = parse_replica(line);
      if (!r) throw ConfigError("catalog line " + std::to_string(lineno) + ": malformed replica");
      add_replica(std::move(*r));
    }
  }

  /// Rebuilds the reverse index from the forward index and compares.
  bool reverse_index_consistent() const {
    std::unordered_map<std::string, std::array<std::map<std::string, std::uint32_t>, 2>> fresh;
    for (const auto& [id, e] : files_) {
      for (const auto& r : e.replicas) {
        ++fresh[r.station_id][static_cast<std::size_t>(r.medium)][r.file_id];
      }
    }
    auto nonempty = [](const auto& m) {
      std::size_t n = 0;
      for (const auto& [_, media] : m) n += (!media[0].empty() || !media[1].empty()) ? 1 : 0;
      return n;
    };
    if (nonempty(fresh) != nonempty(reverse_)) return false;
    for (const auto& [station, media] : fresh) {
      auto it = reverse_.find(station);
      if (it == reverse_.end() || it->second != media) return false;
    }
    return true;
  }

 private:
  struct Entry {
    FileRecord record;
    std::vector<Replica> replicas;
  };

  Entry& entry(const std::string& id) {
    auto it = files_.find(id);
    if (it == files_.end()) throw UnknownFile(id);
    return it->second;
  }
  const Entry& entry(const std::string& id) const {
    auto it = files_.find(id);
    if (it == files_.end()) throw UnknownFile(id);
    return it->second;
  }

  std::unordered_map<std::string, Entry> files_;
  std::unordered_map<std::string, std::array<std::map<std::string, std::uint32_t>, 2>> reverse_;
  std::size_t replica_count_ = 0;
};

// ---------------------------------------------------------------------------
// Source resolution

/// Preference classes, best first. The two foreign-disk classes before any
/// tape class keep "disk anywhere beats tape" total.
enum class SourceRank : std::uint8_t {
  RequesterDisk = 1,
  AncestorDisk = 2,
  CacDisk = 3,
  ForeignRacDisk = 4,
  OtherDisk = 5,
  RegionRacTape = 6,
  CacTape = 7,
  AnyTape = 8,
};

struct SourceChoice {
  std::string station_id;
  Medium medium = Medium::Disk;
  SourceRank rank = SourceRank::AnyTape;

  bool operator==(const SourceChoice&) const = default;
};

struct ResolveOptions {
  bool foreign_rac_before_cac = false;
};

inline SourceChoice resolve_source(const ReplicaCatalog& catalog, const Topology& topology,
                                   const std::string& file_id, const std::string& requester,
                                   ResolveOptions opts = {}) {
  const Station& req = topology.station(requester);
  const auto& reps = catalog.replicas(file_id);
  if (reps.empty()) throw NoReplica(file_id);

  const std::vector<std::string> chain = ancestors(topology, requester);
  const Region* region = topology.find_region(req.region_id);
  const std::string region_rac = region != nullptr ? region->rac_id : std::string();

  auto classify = [&](const Replica& r) -> std::pair<SourceRank, std::size_t> {
    const Station* s = topology.find_station(r.station_id);
    if (r.medium == Medium::Disk) {
      if (r.station_id == requester) return {SourceRank::RequesterDisk, 0};
      if (s != nullptr && s->kind != StationKind::CAC && s->region_id == req.region_id) {
        auto it = std::find(chain.begin(), chain.end(), r.station_id);
        if (it != chain.end()) {
          return {SourceRank::AncestorDisk, static_cast<std::size_t>(it - chain.begin())};
        }
      }
      if (s != nullptr && s->kind == StationKind::CAC) {
        return {opts.foreign_rac_before_cac ? SourceRank::ForeignRacDisk : SourceRank::CacDisk, 0};
      }
      if (s != nullptr && s->kind == StationKind::RAC && s->region_id != req.region_id) {
        return {opts.foreign_rac_before_cac ? SourceRank::CacDisk : SourceRank::ForeignRacDisk, 0};
      }
      return {SourceRank::OtherDisk, 0};
    }
    if (!region_rac.empty() && r.station_id == region_rac) return {SourceRank::RegionRacTape, 0};
    if (s != nullptr && s->kind == StationKind::CAC) return {SourceRank::CacTape, 0};
    return {SourceRank::AnyTape, 0};
  };

  const Replica* best = nullptr;
  std::tuple<SourceRank, std::size_t, std::string_view> best_key{};
  for (const auto& r : reps) {
    auto [rank, sub] = classify(r);
    std::tuple<SourceRank, std::size_t, std::string_view> k{rank, sub, r.station_id};
    if (best == nullptr || k < best_key) {
      best = &r;
      best_key = k;
    }
  }
  return {best->station_id, best->medium, std::get<0>(best_key)};
}

// ---------------------------------------------------------------------------
// Database proxy

enum class DbServer : std::uint8_t { Proxy, Central };

struct DbQueryResult {
  DbServer served_by = DbServer::Central;
  double latency = 0.0;
};

/// Regional read-through proxy for central database queries (calibration
/// and the like), modeled as an LRU over query keys.
class DanProxy {
 public:
  DanProxy(std::string region_id, std::size_t cache_capacity, double proxy_latency = 0.01)
      : region_id_(std::move(region_id)), capacity_(cache_capacity), proxy_latency_(proxy_latency) {
    if (capacity_ == 0) throw ConfigError("DAN proxy cache_capacity must be at least 1");
    if (!(proxy_latency_ >= 0.0)) throw ConfigError("DAN proxy latency must be non-negative");
  }

  DbQueryResult query(const std::string& key, double central_latency) {
    if (cache_.contains(key)) {
      cache_.touch(key);
      ++hits_;
      return {DbServer::Proxy, proxy_latency_};
    }
    ++misses_;
    cache_.touch(key);
    if (cache_.size() > capacity_) cache_.pop_oldest();
    return {DbServer::Central, central_latency};
  }

  const std::string& region_id() const noexcept { return region_id_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return cache_.size(); }
  bool contains(const std::string& key) const { return cache_.contains(key); }
  std::vector<std::string> keys() const { return cache_.snapshot(); }
  std::uint64_t hits() const noexcept { return hits_; }
  std::uint64_t misses() const noexcept { return misses_; }

 private:
  std::string region_id_;
  std::size_t capacity_;
  double proxy_latency_;
  RecencyList<std::string> cache_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

}  // namespace racgrid
