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

// Domain model of the analysis-center hierarchy: data tiers, stations,
// regions, links, files and the topology that ties them together.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "racgrid/errors.hpp"

namespace racgrid {

using Bytes = std::uint64_t;

inline constexpr Bytes kKB = 1000;
inline constexpr Bytes kMB = 1000 * kKB;
inline constexpr Bytes kGB = 1000 * kMB;
inline constexpr Bytes kTB = 1000 * kGB;
inline constexpr Bytes kPB = 1000 * kTB;

// ---------------------------------------------------------------------------
// Data tiers

enum class DataTier : std::uint8_t {
  RAW,
  RECO,
  DST,
  TMB,
  DERIVED,
  MC_D0STAR,
  MC_D0SIM,
  MC_DST,
  MC_TMB,
  MC_PMCS,
  MC_ROOTTUPLE,
};

inline constexpr std::size_t kTierCount = 11;

inline constexpr std::array<DataTier, kTierCount> kAllTiers = {
    DataTier::RAW,       DataTier::RECO,     DataTier::DST,    DataTier::TMB,
    DataTier::DERIVED,   DataTier::MC_D0STAR, DataTier::MC_D0SIM, DataTier::MC_DST,
    DataTier::MC_TMB,    DataTier::MC_PMCS,  DataTier::MC_ROOTTUPLE,
};

constexpr std::size_t tier_index(DataTier t) noexcept { return static_cast<std::size_t>(t); }

constexpr std::string_view tier_name(DataTier t) noexcept {
  constexpr std::array<std::string_view, kTierCount> names = {
      "RAW", "RECO", "DST", "TMB", "DERIVED", "MC_D0STAR",
      "MC_D0SIM", "MC_DST", "MC_TMB", "MC_PMCS", "MC_ROOTTUPLE"};
  return names[tier_index(t)];
}

inline std::optional<DataTier> parse_tier(std::string_view s) noexcept {
  for (DataTier t : kAllTiers) {
    if (tier_name(t) == s) return t;
  }
  return std::nullopt;
}

/// Per-event size in kilobytes for each tier of the data model.
constexpr std::uint32_t default_event_size(DataTier t) noexcept {
  constexpr std::array<std::uint32_t, kTierCount> sizes = {250, 500, 150, 10, 10, 700,
                                                           300, 400, 20,  20, 20};
  return sizes[tier_index(t)];
}

constexpr Bytes event_bytes(DataTier t) noexcept { return Bytes{default_event_size(t)} * kKB; }

// ---------------------------------------------------------------------------
// Stations

/// Hierarchy level. Enumerators are ordered so that CAC > RAC > IAC > DAS.
enum class StationKind : std::uint8_t { DAS = 0, IAC = 1, RAC = 2, CAC = 3 };

constexpr std::string_view kind_name(StationKind k) noexcept {
  switch (k) {
    case StationKind::CAC: return "CAC";
    case StationKind::RAC: return "RAC";
    case StationKind::IAC: return "IAC";
    case StationKind::DAS: return "DAS";
  }
  return "?";
}

inline std::optional<StationKind> parse_kind(std::string_view s) noexcept {
  for (auto k : {StationKind::CAC, StationKind::RAC, StationKind::IAC, StationKind::DAS}) {
    if (kind_name(k) == s) return k;
  }
  return std::nullopt;
}

enum class Medium : std::uint8_t { Disk = 0, Tape = 1 };

constexpr std::string_view medium_name(Medium m) noexcept {
  return m == Medium::Disk ? "disk" : "tape";
}

inline std::optional<Medium> parse_medium(std::string_view s) noexcept {
  if (s == "disk") return Medium::Disk;
  if (s == "tape") return Medium::Tape;
  return std::nullopt;
}

struct TapeParams {
  double mount_latency = 60.0;   // seconds
  double stream_rate = 30e6;     // bytes per second
  std::uint32_t drives = 1;

  bool operator==(const TapeParams&) const = default;
};

struct Station {
  std::string station_id;
  StationKind kind = StationKind::DAS;
  std::string region_id;
  Bytes disk_capacity = 0;
  Bytes tape_capacity = 0;
  double cpu_power = 0.0;  // GHz
  std::optional<std::string> parent_id;
  TapeParams tape;

  bool operator==(const Station&) const = default;
};

struct Region {
  std::string region_id;
  std::string name;
  std::string rac_id;
  std::set<std::string> members;

  bool operator==(const Region&) const = default;
};

enum class LinkClass : std::uint8_t { CAC_TO_RAC = 0, INTER_RAC = 1, INTRA_REGION = 2 };

inline constexpr std::array<LinkClass, 3> kAllLinkClasses = {
    LinkClass::CAC_TO_RAC, LinkClass::INTER_RAC, LinkClass::INTRA_REGION};

constexpr std::string_view link_class_name(LinkClass c) noexcept {
  switch (c) {
    case LinkClass::CAC_TO_RAC: return "CAC_TO_RAC";
    case LinkClass::INTER_RAC: return "INTER_RAC";
    case LinkClass::INTRA_REGION: return "INTRA_REGION";
  }
  return "?";
}

struct NetworkLink {
  std::string endpoint_a;
  std::string endpoint_b;
  double bandwidth = 0.0;  // bytes per second
  double latency = 0.0;    // seconds

  std::string id() const { return endpoint_a + "-" + endpoint_b; }
  bool operator==(const NetworkLink&) const = default;
};

struct FileRecord {
  std::string file_id;
  DataTier tier = DataTier::RAW;
  std::string dataset_id;
  Bytes size = 0;
  std::uint64_t event_count = 0;
  double created_at = 0.0;

  bool operator==(const FileRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Topology

struct Topology {
  std::vector<Station> stations;
  std::vector<Region> regions;
  std::vector<NetworkLink> links;

  const Station* find_station(std::string_view id) const noexcept {
    auto it = std::find_if(stations.begin(), stations.end(),
                           [&](const Station& s) { return s.station_id == id; });
    return it == stations.end() ? nullptr : &*it;
  }

  const Station& station(std::string_view id) const {
    if (const Station* s = find_station(id)) return *s;
    throw UnknownStation(std::string(id));
  }

  const Region* find_region(std::string_view id) const noexcept {
    auto it = std::find_if(regions.begin(), regions.end(),
                           [&](const Region& r) { return r.region_id == id; });
    return it == regions.end() ? nullptr : &*it;
  }

  /// The unique CAC; nullptr if there is none (invalid topology).
  const Station* cac() const noexcept {
    auto it = std::find_if(stations.begin(), stations.end(),
                           [](const Station& s) { return s.kind == StationKind::CAC; });
    return it == stations.end() ? nullptr : &*it;
  }

  /// RAC ids in lexicographic order.
  std::vector<std::string> rac_ids() const {
    std::vector<std::string> out;
    for (const auto& s : stations) {
      if (s.kind == StationKind::RAC) out.push_back(s.station_id);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Recomputes each region's member set from station region ids.
  void refresh_members() {
    for (auto& r : regions) {
      r.members.clear();
      for (const auto& s : stations) {
        if (s.region_id == r.region_id) r.members.insert(s.station_id);
      }
    }
  }

  bool operator==(const Topology&) const = default;
};

/// Class of a link derived from its endpoints, or nullopt when the endpoint
/// pair does not correspond to any class.
inline std::optional<LinkClass> derive_link_class(const Station& a, const Station& b) noexcept {
  auto is = [](const Station& s, StationKind k) { return s.kind == k; };
  if ((is(a, StationKind::CAC) && is(b, StationKind::RAC)) ||
      (is(b, StationKind::CAC) && is(a, StationKind::RAC))) {
    return LinkClass::CAC_TO_RAC;
  }
  if (is(a, StationKind::RAC) && is(b, StationKind::RAC) && a.region_id != b.region_id) {
    return LinkClass::INTER_RAC;
  }
  if (!is(a, StationKind::CAC) && !is(b, StationKind::CAC) && a.region_id == b.region_id) {
    return LinkClass::INTRA_REGION;
  }
  return std::nullopt;
}

inline std::optional<LinkClass> derive_link_class(const Topology& t, const NetworkLink& l) {
  const Station* a = t.find_station(l.endpoint_a);
  const Station* b = t.find_station(l.endpoint_b);
  if (a == nullptr || b == nullptr) return std::nullopt;
  return derive_link_class(*a, *b);
}

/// Every violated topology or station invariant, one message each.
/// An empty result means the topology is valid.
inline std::vector<std::string> validate_topology(const Topology& t) {
  std::vector<std::string> out;
  auto add = [&](std::string msg) { out.push_back(std::move(msg)); };

  std::map<std::string, const Station*> by_id;
  std::vector<std::string> cacs;
  for (const auto& s : t.stations) {
    if (s.station_id.empty()) add("empty station id");
    if (!by_id.emplace(s.station_id, &s).second) add("duplicate station id: " + s.station_id);
    if (s.kind == StationKind::CAC) cacs.push_back(s.station_id);
    if (!(s.cpu_power >= 0.0)) add("negative cpu_power: " + s.station_id);
    if (s.kind == StationKind::DAS && s.tape_capacity != 0) add("DAS has tape: " + s.station_id);
    if (!(s.tape.stream_rate > 0.0) || !(s.tape.mount_latency >= 0.0) || s.tape.drives == 0) {
      add("invalid tape parameters: " + s.station_id);
    }
  }
  if (cacs.empty()) add("no CAC");
  if (cacs.size() > 1) {
    std::string msg = "multiple CAC:";
    for (const auto& id : cacs) msg += " " + id;
    add(msg);
  }

  for (const auto& s : t.stations) {
    if (s.kind == StationKind::CAC) {
      if (s.parent_id) add("CAC has parent: " + s.station_id);
      continue;
    }
    if (!s.parent_id) {
      add("missing parent: " + s.station_id);
      continue;
    }
    auto it = by_id.find(*s.parent_id);
    if (it == by_id.end()) {
      add("unknown parent: " + s.station_id + " -> " + *s.parent_id);
      continue;
    }
    const Station& p = *it->second;
    if (!(p.kind > s.kind)) {
      add("parent kind not greater: " + s.station_id + " (" + std::string(kind_name(s.kind)) +
          ") -> " + p.station_id + " (" + std::string(kind_name(p.kind)) + ")");
      continue;
    }
    bool shape_ok = (s.kind == StationKind::RAC && p.kind == StationKind::CAC) ||
                    (s.kind == StationKind::IAC && p.kind == StationKind::RAC) ||
                    (s.kind == StationKind::DAS &&
                     (p.kind == StationKind::IAC || p.kind == StationKind::RAC));
    if (!shape_ok) {
      add("parent kind skips a level: " + s.station_id + " -> " + p.station_id);
    }
    if (s.kind != StationKind::RAC && p.region_id != s.region_id) {
      add("region differs from parent: " + s.station_id);
    }
  }

  // Parent chains must terminate at the CAC.
  for (const auto& s : t.stations) {
    std::set<std::string> seen{s.station_id};
    const Station* cur = &s;
    while (cur->parent_id) {
      auto it = by_id.find(*cur->parent_id);
      if (it == by_id.end()) break;
      cur = it->second;
      if (!seen.insert(cur->station_id).second) {
        add("parent cycle at: " + s.station_id);
        break;
      }
    }
  }

  // Regions.
  std::set<std::string> region_ids;
  for (const auto& r : t.regions) {
    if (!region_ids.insert(r.region_id).second) add("duplicate region id: " + r.region_id);
    std::vector<std::string> racs;
    for (const auto& s : t.stations) {
      if (s.kind == StationKind::RAC && s.region_id == r.region_id) racs.push_back(s.station_id);
    }
    if (racs.size() != 1) {
      add("region " + r.region_id + ": expected exactly one RAC, found " +
          std::to_string(racs.size()));
    } else if (racs.front() != r.rac_id) {
      add("region " + r.region_id + ": rac_id " + r.rac_id + " is not its RAC " + racs.front());
    }
    for (const auto& m : r.members) {
      auto it = by_id.find(m);
      if (it == by_id.end()) {
        add("region " + r.region_id + ": unknown member " + m);
      } else if (it->second->region_id != r.region_id) {
        add("region " + r.region_id + ": member region mismatch " + m);
      }
    }
  }
  for (const auto& s : t.stations) {
    if (s.kind == StationKind::CAC) continue;
    if (!region_ids.contains(s.region_id)) {
      add("station in undeclared region: " + s.station_id + " (" + s.region_id + ")");
    }
  }

  // Links.
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& l : t.links) {
    const std::string id = l.id();
    auto a = by_id.find(l.endpoint_a);
    auto b = by_id.find(l.endpoint_b);
    if (a == by_id.end() || b == by_id.end()) {
      add("link unknown endpoint: " + id);
      continue;
    }
    if (l.endpoint_a == l.endpoint_b) add("link is a self loop: " + id);
    if (!(l.bandwidth > 0.0)) add("link bandwidth not positive: " + id);
    if (!(l.latency >= 0.0)) add("link latency negative: " + id);
    if (!derive_link_class(*a->second, *b->second)) {
      add("link class inconsistent with endpoints: " + id);
    }
    adj[l.endpoint_a].push_back(l.endpoint_b);
    adj[l.endpoint_b].push_back(l.endpoint_a);
  }
  if (cacs.size() == 1) {
    std::set<std::string> reached{cacs.front()};
    std::vector<std::string> stack{cacs.front()};
    while (!stack.empty()) {
      std::string cur = stack.back();
      stack.pop_back();
      for (const auto& n : adj[cur]) {
        if (reached.insert(n).second) stack.push_back(n);
      }
    }
    for (const auto& s : t.stations) {
      if (!reached.contains(s.station_id)) add("unreachable from CAC: " + s.station_id);
    }
  }
  return out;
}

/// Parent chain of a station, nearest first, ending at the CAC.
inline std::vector<std::string> ancestors(const Topology& t, std::string_view station_id) {
  std::vector<std::string> out;
  const Station* cur = &t.station(station_id);
  while (cur->parent_id) {
    cur = &t.station(*cur->parent_id);
    if (out.size() > t.stations.size()) throw Error("parent cycle at " + std::string(station_id));
    out.push_back(cur->station_id);
  }
  return out;
}

/// Splits a dataset into files of at most `target_file_size` bytes each.
/// Every file but the last carries the same number of events; file sizes
/// are exact multiples of the tier's event size.
inline std::vector<FileRecord> generate_dataset_files(const std::string& dataset_id, DataTier tier,
                                                      std::uint64_t events,
                                                      Bytes target_file_size = kGB,
                                                      double created_at = 0.0) {
  std::vector<FileRecord> out;
  if (events == 0) return out;
  const Bytes per_event = event_bytes(tier);
  const std::uint64_t per_file = std::max<std::uint64_t>(1, target_file_size / per_event);
  const std::uint64_t n = (events + per_file - 1) / per_file;
  out.reserve(n);
  std::uint64_t remaining = events;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t ev = std::min(per_file, remaining);
    remaining -= ev;
    std::string index = std::to_string(i);
    if (index.size() < 6) index.insert(0, 6 - index.size(), '0');
    out.push_back(FileRecord{dataset_id + "." + index, tier, dataset_id, ev * per_event, ev,
                             created_at});
  }
  return out;
}

}  // namespace racgrid
