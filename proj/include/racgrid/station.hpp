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

// Per-station storage: a disk with a pinned area and an on-demand cache,
// and a tape store with mount and streaming latency.

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "racgrid/errors.hpp"
#include "racgrid/model.hpp"
#include "racgrid/policy.hpp"
#include "racgrid/recency_list.hpp"

namespace racgrid {

/// Least recently used first.
class LruEviction {
 public:
  void on_insert(const std::string& id) { order_.touch(id); }
  void on_hit(const std::string& id) { order_.touch(id); }
  void on_erase(const std::string& id) { order_.erase(id); }
  const std::string& victim() const { return order_.oldest(); }

 private:
  RecencyList<std::string> order_;
};

/// Oldest admission first; hits do not refresh.
class FifoEviction {
 public:
  void on_insert(const std::string& id) { order_.push_back_if_absent(id); }
  void on_hit(const std::string&) {}
  void on_erase(const std::string& id) { order_.erase(id); }
  const std::string& victim() const { return order_.oldest(); }

 private:
  RecencyList<std::string> order_;
};

enum class CacheOutcome : std::uint8_t { DiskHit, Miss };

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;

  std::uint64_t requests() const noexcept { return hits + misses; }
  bool operator==(const CacheStats&) const = default;
};

/// Disk of one station. occupancy = pinned + on-demand <= capacity, and
/// no file is in both areas.
template <typename Eviction = LruEviction>
class BasicDiskCache {
 public:
  explicit BasicDiskCache(Bytes capacity,
                          Fraction on_demand_min_fraction = Fraction::from_ppm(100'000))
      : capacity_(capacity), min_fraction_(on_demand_min_fraction) {}

  Bytes capacity() const noexcept { return capacity_; }
  Bytes pinned_bytes() const noexcept { return pinned_bytes_; }
  Bytes on_demand_bytes() const noexcept { return on_demand_bytes_; }
  Bytes occupancy() const noexcept { return pinned_bytes_ + on_demand_bytes_; }
  /// Largest size the on-demand area can ever hold.
  Bytes on_demand_capacity() const noexcept { return capacity_ - pinned_bytes_; }
  const CacheStats& stats() const noexcept { return stats_; }

  bool is_pinned(const std::string& id) const { return pinned_.contains(id); }
  bool is_cached(const std::string& id) const { return on_demand_.contains(id); }
  bool contains(const std::string& id) const { return is_pinned(id) || is_cached(id); }
  std::size_t pinned_count() const noexcept { return pinned_.size(); }
  std::size_t cached_count() const noexcept { return on_demand_.size(); }

  /// Pins a file, evicting on-demand entries as needed. A file already in
  /// the on-demand area moves to the pinned area.
  std::vector<std::string> pin(const std::string& id, Bytes size) {
    if (pinned_.contains(id)) throw Error("file already pinned: " + id);
    if (!pin_fits(capacity_, pinned_bytes_ + size, min_fraction_)) {
      throw PinnedOverflow("pinning " + id + " exceeds the pin budget of " +
                           std::to_string(capacity_ - scale_bytes(capacity_, min_fraction_)) +
                           " bytes");
    }
    if (on_demand_.contains(id)) drop(id);
    pinned_.emplace(id, size);
    pinned_bytes_ += size;
    std::vector<std::string> evicted;
    while (occupancy() > capacity_) evicted.push_back(evict_one());
    return evicted;
  }

  /// Hit if pinned (recency untouched) or cached (recency refreshed).
  CacheOutcome request(const std::string& id) {
    if (pinned_.contains(id)) {
      ++stats_.hits;
      return CacheOutcome::DiskHit;
    }
    if (on_demand_.contains(id)) {
      eviction_.on_hit(id);
      ++stats_.hits;
      return CacheOutcome::DiskHit;
    }
    ++stats_.misses;
    return CacheOutcome::Miss;
  }

  /// Inserts a fetched file as most recent and returns what was evicted.
  std::vector<std::string> admit(const std::string& id, Bytes size) {
    if (pinned_.contains(id)) return {};
    if (on_demand_.contains(id)) {
      eviction_.on_hit(id);
      return {};
    }
    if (size > on_demand_capacity()) {
      throw FileLargerThanCache("file " + id + " (" + std::to_string(size) +
                                " bytes) exceeds the on-demand area of " +
                                std::to_string(on_demand_capacity()) + " bytes");
    }
    std::vector<std::string> evicted;
    while (occupancy() + size > capacity_) evicted.push_back(evict_one());
    on_demand_.emplace(id, size);
    on_demand_bytes_ += size;
    eviction_.on_insert(id);
    return evicted;
  }

  /// Removes an on-demand entry; pinned entries are left alone.
  bool erase(const std::string& id) {
    if (!on_demand_.contains(id)) return false;
    drop(id);
    return true;
  }

 private:
  void drop(const std::string& id) {
    auto it = on_demand_.find(id);
    on_demand_bytes_ -= it->second;
    on_demand_.erase(it);
    eviction_.on_erase(id);
  }

  std::string evict_one() {
    std::string victim = eviction_.victim();
    drop(victim);
    ++stats_.evictions;
    return victim;
  }

  Bytes capacity_;
  Fraction min_fraction_;
  std::unordered_map<std::string, Bytes> pinned_;
  std::unordered_map<std::string, Bytes> on_demand_;
  Eviction eviction_;
  Bytes pinned_bytes_ = 0;
  Bytes on_demand_bytes_ = 0;
  CacheStats stats_;
};

using DiskCache = BasicDiskCache<LruEviction>;
using FifoDiskCache = BasicDiskCache<FifoEviction>;

/// Archival tape. Never evicts; writing past capacity is an error.
class TapeStore {
 public:
  explicit TapeStore(Bytes capacity, TapeParams params = {}) : capacity_(capacity), params_(params) {}

  Bytes capacity() const noexcept { return capacity_; }
  Bytes occupancy() const noexcept { return occupancy_; }
  const TapeParams& params() const noexcept { return params_; }

  void write(Bytes size) {
    if (size > capacity_ - occupancy_) {
      throw TapeOverflow("tape write of " + std::to_string(size) + " bytes exceeds free " +
                         std::to_string(capacity_ - occupancy_) + " bytes");
    }
    occupancy_ += size;
  }

 private:
  Bytes capacity_;
  Bytes occupancy_ = 0;
  TapeParams params_;
};

/// Seconds to mount and stream `size` bytes off tape.
inline double tape_stage_time(const TapeParams& tape, Bytes size) noexcept {
  return tape.mount_latency + static_cast<double>(size) / tape.stream_rate;
}

inline double tape_stage_time(const TapeStore& tape, Bytes size) noexcept {
  return tape_stage_time(tape.params(), size);
}

}  // namespace racgrid
