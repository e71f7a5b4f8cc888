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

// Placement policy: per-tier archival and disk fractions, pre-emptive
// pinning, disjoint partitioning of fractional tiers across RACs, and the
// on-demand cache budget.

#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "racgrid/errors.hpp"
#include "racgrid/model.hpp"

namespace racgrid {

/// Non-negative fraction stored in parts per million so that byte
/// arithmetic over it stays exact. Values above 1 are copy counts.
class Fraction {
 public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Fraction() = default;
  static constexpr Fraction from_ppm(std::int64_t ppm) noexcept { return Fraction(ppm); }
  static Fraction from_double(double v) noexcept {
    return Fraction(static_cast<std::int64_t>(std::llround(v * static_cast<double>(kScale))));
  }

  constexpr std::int64_t ppm() const noexcept { return ppm_; }
  constexpr double value() const noexcept { return static_cast<double>(ppm_) / kScale; }
  constexpr bool is_zero() const noexcept { return ppm_ == 0; }
  constexpr bool is_full() const noexcept { return ppm_ >= kScale; }
  constexpr bool is_partial() const noexcept { return ppm_ > 0 && ppm_ < kScale; }

  /// Integer copy count for a tape fraction of one or more (400% -> 4).
  constexpr std::uint32_t copies() const noexcept {
    if (ppm_ <= 0) return 0;
    return static_cast<std::uint32_t>((ppm_ + kScale - 1) / kScale);
  }

  constexpr auto operator<=>(const Fraction&) const = default;

 private:
  constexpr explicit Fraction(std::int64_t ppm) : ppm_(ppm) {}
  std::int64_t ppm_ = 0;
};

/// floor(bytes * f) without intermediate overflow.
constexpr Bytes scale_bytes(Bytes bytes, Fraction f) noexcept {
  if (f.ppm() <= 0) return 0;
  const unsigned __int128 p = static_cast<unsigned __int128>(bytes) *
                              static_cast<unsigned __int128>(f.ppm());
  return static_cast<Bytes>(p / Fraction::kScale);
}

/// 64-bit FNV-1a. Stable across runs and platforms.
constexpr std::uint64_t stable_hash(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

enum class PlacementColumn : std::uint8_t { CacTape = 0, CacDisk = 1, RacTape = 2, RacDisk = 3 };

inline constexpr std::array<PlacementColumn, 4> kAllColumns = {
    PlacementColumn::CacTape, PlacementColumn::CacDisk, PlacementColumn::RacTape,
    PlacementColumn::RacDisk};

constexpr std::string_view column_name(PlacementColumn c) noexcept {
  constexpr std::array<std::string_view, 4> n = {"cac_tape", "cac_disk", "rac_tape", "rac_disk"};
  return n[static_cast<std::size_t>(c)];
}

constexpr bool is_tape(PlacementColumn c) noexcept {
  return c == PlacementColumn::CacTape || c == PlacementColumn::RacTape;
}

constexpr bool is_rac(PlacementColumn c) noexcept {
  return c == PlacementColumn::RacTape || c == PlacementColumn::RacDisk;
}

struct TierPlacement {
  Fraction cac_tape;
  Fraction cac_disk;
  Fraction rac_tape;
  Fraction rac_disk;

  constexpr Fraction at(PlacementColumn c) const noexcept {
    switch (c) {
      case PlacementColumn::CacTape: return cac_tape;
      case PlacementColumn::CacDisk: return cac_disk;
      case PlacementColumn::RacTape: return rac_tape;
      case PlacementColumn::RacDisk: return rac_disk;
    }
    return {};
  }

  constexpr Fraction& at(PlacementColumn c) noexcept {
    switch (c) {
      case PlacementColumn::CacTape: return cac_tape;
      case PlacementColumn::CacDisk: return cac_disk;
      case PlacementColumn::RacTape: return rac_tape;
      case PlacementColumn::RacDisk: break;
    }
    return rac_disk;
  }

  bool operator==(const TierPlacement&) const = default;
};

/// The placement matrix. Entries marked "few" resolve to `few_percent`
/// at lookup time, so changing it moves every such entry together.
class PolicyTable {
 public:
  Fraction few_percent = Fraction::from_ppm(50'000);
  Fraction on_demand_min_fraction = Fraction::from_ppm(100'000);
  /// Swaps resolution ranks so a foreign RAC disk beats the CAC disk.
  bool foreign_rac_before_cac = false;

  TierPlacement placement(DataTier t) const noexcept {
    TierPlacement p = raw_[tier_index(t)];
    for (PlacementColumn c : kAllColumns) {
      if (few_[tier_index(t)][static_cast<std::size_t>(c)]) p.at(c) = few_percent;
    }
    return p;
  }

  Fraction fraction(DataTier t, PlacementColumn c) const noexcept {
    if (few_[tier_index(t)][static_cast<std::size_t>(c)]) return few_percent;
    return raw_[tier_index(t)].at(c);
  }

  bool is_few(DataTier t, PlacementColumn c) const noexcept {
    return few_[tier_index(t)][static_cast<std::size_t>(c)];
  }

  void set(DataTier t, PlacementColumn c, Fraction f) noexcept {
    raw_[tier_index(t)].at(c) = f;
    few_[tier_index(t)][static_cast<std::size_t>(c)] = false;
  }

  void set_few(DataTier t, PlacementColumn c) noexcept {
    raw_[tier_index(t)].at(c) = {};
    few_[tier_index(t)][static_cast<std::size_t>(c)] = true;
  }

  bool operator==(const PolicyTable&) const = default;

 private:
  std::array<TierPlacement, kTierCount> raw_{};
  std::array<std::array<bool, 4>, kTierCount> few_{};
};

/// The default placement matrix of the data model.
inline PolicyTable default_policy() {
  PolicyTable p;
  auto row = [&](DataTier t, double ct, double cd, double rt, double rd) {
    p.set(t, PlacementColumn::CacTape, Fraction::from_double(ct));
    p.set(t, PlacementColumn::CacDisk, Fraction::from_double(cd));
    p.set(t, PlacementColumn::RacTape, Fraction::from_double(rt));
    p.set(t, PlacementColumn::RacDisk, Fraction::from_double(rd));
  };
  row(DataTier::RAW, 1.0, 0.1, 0, 0);
  row(DataTier::RECO, 1.0, 0.1, 0.01, 0);
  row(DataTier::DST, 1.0, 1.0, 0.1, 0.1);
  row(DataTier::TMB, 4.0, 1.0, 1.0, 1.0);
  row(DataTier::DERIVED, 4.0, 1.0, 1.0, 1.0);
  row(DataTier::MC_D0STAR, 0, 0, 0, 0);
  row(DataTier::MC_D0SIM, 0, 0, 0, 0);
  row(DataTier::MC_DST, 1.0, 0, 0, 0);
  p.set_few(DataTier::MC_DST, PlacementColumn::CacDisk);
  p.set_few(DataTier::MC_DST, PlacementColumn::RacTape);
  p.set_few(DataTier::MC_DST, PlacementColumn::RacDisk);
  row(DataTier::MC_TMB, 1.0, 1.0, 0, 0.1);
  row(DataTier::MC_PMCS, 1.0, 1.0, 0, 0.1);
  row(DataTier::MC_ROOTTUPLE, 1.0, 0, 0.1, 0);
  return p;
}

inline std::vector<std::string> validate_policy(const PolicyTable& p) {
  std::vector<std::string> out;
  for (DataTier t : kAllTiers) {
    for (PlacementColumn c : kAllColumns) {
      const Fraction f = p.fraction(t, c);
      const std::string where = std::string(tier_name(t)) + "." + std::string(column_name(c));
      if (f.ppm() < 0) out.push_back("negative fraction: " + where);
      if (!is_tape(c) && f.ppm() > Fraction::kScale) {
        out.push_back("disk fraction above 1: " + where);
      }
    }
  }
  if (p.few_percent.ppm() < 0 || p.few_percent.ppm() > Fraction::kScale) {
    out.push_back("few_percent outside [0, 1]");
  }
  if (p.on_demand_min_fraction.ppm() < 0 || p.on_demand_min_fraction.ppm() >= Fraction::kScale) {
    out.push_back("on_demand_min_fraction outside [0, 1)");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Partitioning

/// Disjoint assignment of a tier's files to RACs.
struct DstPartition {
  std::map<std::string, std::set<std::string>> shares;
  std::unordered_map<std::string, std::string> owner;

  const std::string* owner_of(const std::string& file_id) const noexcept {
    auto it = owner.find(file_id);
    return it == owner.end() ? nullptr : &it->second;
  }

  std::size_t covered() const noexcept { return owner.size(); }
};

/// Files ranked by (stable hash, id); the first round(n * min(1, racs * f))
/// are dealt round-robin over `racs` in the given order.
inline DstPartition partition_tier(std::span<const FileRecord> files,
                                   const std::vector<std::string>& racs, Fraction fraction) {
  if (racs.empty()) throw EmptyRacList();
  if (fraction.ppm() < 0 || fraction.ppm() > Fraction::kScale) {
    throw ConfigError("partition fraction outside [0, 1]");
  }
  DstPartition out;
  for (const auto& r : racs) out.shares[r];

  std::vector<std::pair<std::uint64_t, const std::string*>> order;
  order.reserve(files.size());
  for (const auto& f : files) order.emplace_back(stable_hash(f.file_id), &f.file_id);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : *a.second < *b.second;
  });

  using u128 = unsigned __int128;
  const u128 raw_cov = static_cast<u128>(racs.size()) * static_cast<u128>(fraction.ppm());
  const u128 cov = raw_cov > static_cast<u128>(Fraction::kScale) ? Fraction::kScale : raw_cov;
  const std::size_t k = static_cast<std::size_t>(
      (static_cast<u128>(order.size()) * cov + Fraction::kScale / 2) / Fraction::kScale);

  out.owner.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::string& rac = racs[i % racs.size()];
    out.shares[rac].insert(*order[i].second);
    out.owner.emplace(*order[i].second, rac);
  }
  return out;
}

/// Partitions of every fractional (tier, column) entry over a file
/// population. CAC columns use a single-owner partition for coverage.
class PlacementPlan {
 public:
  const DstPartition* partition(DataTier t, PlacementColumn c) const noexcept {
    auto it = parts_.find({t, c});
    return it == parts_.end() ? nullptr : &it->second;
  }

  const std::string* owner(const FileRecord& f, PlacementColumn c) const noexcept {
    const DstPartition* p = partition(f.tier, c);
    return p == nullptr ? nullptr : p->owner_of(f.file_id);
  }

  void set(DataTier t, PlacementColumn c, DstPartition p) { parts_[{t, c}] = std::move(p); }

 private:
  std::map<std::pair<DataTier, PlacementColumn>, DstPartition> parts_;
};

inline PlacementPlan plan_placement(std::span<const FileRecord> files, const PolicyTable& policy,
                                    const Topology& topology) {
  PlacementPlan plan;
  std::array<std::vector<FileRecord>, kTierCount> by_tier;
  for (const auto& f : files) by_tier[tier_index(f.tier)].push_back(f);
  const Station* cac = topology.cac();
  const std::vector<std::string> racs = topology.rac_ids();
  for (DataTier t : kAllTiers) {
    const auto& tier_files = by_tier[tier_index(t)];
    if (tier_files.empty()) continue;
    for (PlacementColumn c : kAllColumns) {
      const Fraction f = policy.fraction(t, c);
      if (!f.is_partial()) continue;
      if (is_rac(c)) {
        if (!racs.empty()) plan.set(t, c, partition_tier(tier_files, racs, f));
      } else if (cac != nullptr) {
        plan.set(t, c, partition_tier(tier_files, {cac->station_id}, f));
      }
    }
  }
  return plan;
}

/// Files that must sit pinned on the station's disk. Only CAC and RAC
/// stations pin anything.
inline std::set<std::string> pinned_set(const Station& station, std::span<const FileRecord> files,
                                        const PolicyTable& policy, const PlacementPlan& plan) {
  std::set<std::string> out;
  PlacementColumn column;
  if (station.kind == StationKind::RAC) {
    column = PlacementColumn::RacDisk;
  } else if (station.kind == StationKind::CAC) {
    column = PlacementColumn::CacDisk;
  } else {
    return out;
  }
  for (const auto& f : files) {
    const Fraction frac = policy.fraction(f.tier, column);
    if (frac.is_full()) {
      out.insert(f.file_id);
    } else if (frac.is_partial()) {
      const std::string* o = plan.owner(f, column);
      if (o != nullptr && *o == station.station_id) out.insert(f.file_id);
    }
  }
  return out;
}

struct PlacementTarget {
  std::string station_id;
  Medium medium = Medium::Disk;
  std::uint32_t copy_count = 1;

  bool operator==(const PlacementTarget&) const = default;
};

/// Where a freshly produced file must be stored, in the order CAC tape,
/// RAC disk, RAC tape, CAC disk.
inline std::vector<PlacementTarget> archival_targets(const FileRecord& file,
                                                     const PolicyTable& policy,
                                                     const Topology& topology,
                                                     const PlacementPlan& plan) {
  std::vector<PlacementTarget> out;
  const Station* cac = topology.cac();
  const std::vector<std::string> racs = topology.rac_ids();

  auto cac_target = [&](PlacementColumn c, Medium m) {
    if (cac == nullptr) return;
    const Fraction f = policy.fraction(file.tier, c);
    if (f.is_full()) {
      out.push_back({cac->station_id, m, m == Medium::Tape ? f.copies() : 1U});
    } else if (f.is_partial()) {
      if (const std::string* o = plan.owner(file, c); o != nullptr && *o == cac->station_id) {
        out.push_back({cac->station_id, m, 1});
      }
    }
  };
  auto rac_target = [&](PlacementColumn c, Medium m) {
    const Fraction f = policy.fraction(file.tier, c);
    if (f.is_full()) {
      for (const auto& r : racs) out.push_back({r, m, m == Medium::Tape ? f.copies() : 1U});
    } else if (f.is_partial()) {
      if (const std::string* o = plan.owner(file, c)) out.push_back({*o, m, 1});
    }
  };

  cac_target(PlacementColumn::CacTape, Medium::Tape);
  rac_target(PlacementColumn::RacDisk, Medium::Disk);
  rac_target(PlacementColumn::RacTape, Medium::Tape);
  cac_target(PlacementColumn::CacDisk, Medium::Disk);
  return out;
}

// ---------------------------------------------------------------------------
// Disk budget

/// pinned <= (1 - min_fraction) * disk, evaluated exactly.
constexpr bool pin_fits(Bytes disk, Bytes pinned, Fraction min_fraction) noexcept {
  using u128 = unsigned __int128;
  const auto keep = static_cast<u128>(Fraction::kScale - min_fraction.ppm());
  return static_cast<u128>(pinned) * Fraction::kScale <= static_cast<u128>(disk) * keep;
}

/// Smallest disk capacity on which `pinned` bytes fit the pin budget.
constexpr Bytes required_disk(Bytes pinned, Fraction min_fraction) noexcept {
  using u128 = unsigned __int128;
  const auto keep = static_cast<u128>(Fraction::kScale - min_fraction.ppm());
  const u128 num = static_cast<u128>(pinned) * Fraction::kScale;
  return static_cast<Bytes>((num + keep - 1) / keep);
}

/// Disk left for the on-demand cache once the pinned set is in place.
inline Bytes on_demand_budget(const Station& station, Bytes pinned_bytes,
                              const PolicyTable& policy) {
  if (!pin_fits(station.disk_capacity, pinned_bytes, policy.on_demand_min_fraction)) {
    const Bytes cap = station.disk_capacity;
    throw PinnedOverflow("pinned overflow at " + station.station_id + ": pinned " +
                         std::to_string(pinned_bytes) + " of " + std::to_string(cap) +
                         " bytes leaves less than the on-demand minimum of " +
                         std::to_string(scale_bytes(cap, policy.on_demand_min_fraction)) +
                         " bytes");
  }
  return station.disk_capacity - pinned_bytes;
}

}  // namespace racgrid
