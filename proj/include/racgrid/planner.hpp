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

// Static capacity planning over the placement matrix and the resource
// registry: storage totals, CPU accounting, growth projection and
// per-station fit checks.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "racgrid/errors.hpp"
#include "racgrid/model.hpp"
#include "racgrid/policy.hpp"

namespace racgrid {

using TierCounts = std::array<std::uint64_t, kTierCount>;

/// Published reference figures the planner reports alongside its own.
namespace reference {
inline constexpr Bytes kCacTape = 1500 * kTB;       // 1.5 PB
inline constexpr Bytes kCacDisk = 60 * kTB;
inline constexpr Bytes kRacTape = 50 * kTB;         // "~50 TB"
inline constexpr Bytes kRacDisk = 50 * kTB;         // "~50 TB"
inline constexpr double kRemoteAllocatedGhz = 360;  // "about 360 GHz"
inline constexpr double kRemoteTotalGhz = 1800;     // "over 1800 GHz"
inline constexpr double kCpuRequirementGhz = 4000;  // "over 4 THz"
inline constexpr Bytes kGrowthPerYear = kPB;
inline constexpr std::uint64_t kRun2aDetectorEvents = 1'500'000'000;
}  // namespace reference

enum class SiteClass : std::uint8_t { CAC = 0, RAC = 1 };

constexpr std::string_view site_class_name(SiteClass s) noexcept {
  return s == SiteClass::CAC ? "CAC" : "RAC";
}

/// Bytes per (site class, medium, tier). RAC figures are per RAC.
struct StorageReport {
  std::array<std::array<TierCounts, 2>, 2> bytes{};
  std::uint32_t n_racs = 1;

  Bytes at(SiteClass s, Medium m, DataTier t) const noexcept {
    return bytes[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)][tier_index(t)];
  }
  Bytes& at(SiteClass s, Medium m, DataTier t) noexcept {
    return bytes[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)][tier_index(t)];
  }
  Bytes total(SiteClass s, Medium m) const noexcept {
    const auto& row = bytes[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)];
    return std::accumulate(row.begin(), row.end(), Bytes{0});
  }

  bool operator==(const StorageReport&) const = default;
};

/// Per-site bytes of one tier under one placement column. RAC shares of a
/// fractional tier are disjoint, so each RAC holds min(f, 1/n) of it.
inline Bytes column_bytes(Bytes tier_bytes, Fraction f, PlacementColumn c, std::uint32_t n_racs) {
  if (f.is_zero() || f.ppm() < 0) return 0;
  if (f.is_full()) return is_tape(c) ? tier_bytes * f.copies() : tier_bytes;
  if (is_rac(c) && static_cast<std::int64_t>(n_racs) * f.ppm() >= Fraction::kScale) {
    return tier_bytes / n_racs;
  }
  return scale_bytes(tier_bytes, f);
}

inline StorageReport storage_totals(const TierCounts& event_counts, const PolicyTable& policy,
                                    std::uint32_t n_racs) {
  if (n_racs == 0) throw ConfigError("storage_totals requires at least one RAC");
  StorageReport r;
  r.n_racs = n_racs;
  for (DataTier t : kAllTiers) {
    const Bytes tier_bytes = event_counts[tier_index(t)] * event_bytes(t);
    auto put = [&](SiteClass s, Medium m, PlacementColumn c) {
      r.at(s, m, t) = column_bytes(tier_bytes, policy.fraction(t, c), c, n_racs);
    };
    put(SiteClass::CAC, Medium::Tape, PlacementColumn::CacTape);
    put(SiteClass::CAC, Medium::Disk, PlacementColumn::CacDisk);
    put(SiteClass::RAC, Medium::Tape, PlacementColumn::RacTape);
    put(SiteClass::RAC, Medium::Disk, PlacementColumn::RacDisk);
  }
  return r;
}

namespace detail {

/// Scales a row so that it sums to `target`, apportioning the rounding
/// remainder by largest fractional part (ties to the lower tier index).
inline TierCounts scale_row(const TierCounts& row, Bytes target) {
  using u128 = unsigned __int128;
  const Bytes sum = std::accumulate(row.begin(), row.end(), Bytes{0});
  TierCounts out{};
  if (sum == 0) return out;
  std::array<u128, kTierCount> rem{};
  Bytes assigned = 0;
  for (std::size_t i = 0; i < kTierCount; ++i) {
    const u128 num = static_cast<u128>(row[i]) * target;
    out[i] = static_cast<Bytes>(num / sum);
    rem[i] = num % sum;
    assigned += out[i];
  }
  std::array<std::size_t, kTierCount> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < target; ++k, ++assigned) ++out[order[k % kTierCount]];
  return out;
}

}  // namespace detail

/// One report per year from 0 to `years`. CAC tape grows by exactly
/// `rate` bytes a year; every other class keeps its ratio to CAC tape.
inline std::vector<StorageReport> growth_projection(const StorageReport& base, std::uint32_t years,
                                                    Bytes rate = reference::kGrowthPerYear) {
  std::vector<StorageReport> out{base};
  const Bytes cac_tape = base.total(SiteClass::CAC, Medium::Tape);
  if (years > 0 && rate > 0 && cac_tape == 0) {
    throw ConfigError("growth projection needs a non-zero CAC tape base");
  }
  using u128 = unsigned __int128;
  for (std::uint32_t y = 1; y <= years; ++y) {
    StorageReport next = base;
    const Bytes grown = cac_tape + rate * y;
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t m = 0; m < 2; ++m) {
        const auto& row = base.bytes[s][m];
        const Bytes total = std::accumulate(row.begin(), row.end(), Bytes{0});
        Bytes target = grown;
        if (!(s == static_cast<std::size_t>(SiteClass::CAC) &&
              m == static_cast<std::size_t>(Medium::Tape))) {
          const u128 num = static_cast<u128>(total) * grown;
          target = static_cast<Bytes>((num + cac_tape / 2) / cac_tape);
        }
        next.bytes[s][m] = detail::scale_row(row, target);
      }
    }
    out.push_back(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resource registry

struct ResourceEntry {
  std::string center;
  std::vector<std::string> iacs;
  double cpu_allocated = 0;  // GHz
  std::optional<double> cpu_total;
  double disk_allocated = 0;  // TB
  std::optional<double> disk_total;
  std::optional<double> tape;  // TB
  std::optional<double> tape_total;
  std::string schedule;
  bool central = false;

  bool operator==(const ResourceEntry&) const = default;
};

inline std::vector<std::string> validate_resources(std::span<const ResourceEntry> registry) {
  std::vector<std::string> out;
  for (const auto& e : registry) {
    if (e.cpu_allocated < 0 || e.disk_allocated < 0) out.push_back("negative resource: " + e.center);
    if (e.cpu_total && e.cpu_allocated > *e.cpu_total) {
      out.push_back("cpu allocated above total: " + e.center);
    }
    if (e.disk_total && e.disk_allocated > *e.disk_total) {
      out.push_back("disk allocated above total: " + e.center);
    }
    if (e.tape && e.tape_total && *e.tape > *e.tape_total) {
      out.push_back("tape allocated above total: " + e.center);
    }
  }
  return out;
}

/// Regional resources identified for the experiment; the last entry is
/// the central center.
inline std::vector<ResourceEntry> reference_registry() {
  return {
      {"GridKa @FZK",
       {"Aachen", "Bonn", "Freiburg", "Mainz", "Munich", "Wuppertal"},
       52, 518, 5.2, 50, 10, 100, "Established RAC", false},
      {"SAR @UTA (Southern US)",
       {"AZ", "Cinvestav (Mexico City)", "LA Tech", "Oklahoma", "Rice", "KU", "KSU"},
       160, 320, 25, 50, std::nullopt, std::nullopt,
       "Active MC production center. Computing in this table available Summer 2003", false},
      {"UK @ TBD",
       {"Lancaster", "Manchester", "Imperial College", "RAL"},
       46, 556, 14, 170, 44, std::nullopt,
       "Active, MC production. RAC functionality later this year.", false},
      {"IN2P3 @Lyon",
       {"CCin2p3", "CEA-Saclay", "CPPM-Marseille", "IPNL-Lyon", "IRES-Strasbourg",
        "ISN-Grenoble", "LAL-Orsay", "LPNHE-Paris"},
       100, std::nullopt, 12, std::nullopt, 200, std::nullopt,
       "Active, MC production. RAC functionality later this year.", false},
      {"D0@FNAL (Northern US)",
       {"Farm", "cab", "clued0", "Central-analysis"},
       1800, std::nullopt, 25, std::nullopt, 1000, std::nullopt, "Established as CAC", true},
  };
}

struct CpuSummary {
  double allocated_remote = 0;
  double total_remote = 0;
  double cac = 0;
  double requirement = 0;
  double shortfall = 0;

  bool operator==(const CpuSummary&) const = default;
};

inline CpuSummary cpu_summary(std::span<const ResourceEntry> registry, double requirement) {
  CpuSummary s;
  s.requirement = requirement;
  for (const auto& e : registry) {
    if (e.central) {
      s.cac += e.cpu_allocated;
    } else {
      s.allocated_remote += e.cpu_allocated;
      s.total_remote += e.cpu_total.value_or(e.cpu_allocated);
    }
  }
  s.shortfall = requirement - (s.allocated_remote + s.cac);
  return s;
}

// ---------------------------------------------------------------------------
// Fit checks

inline Bytes tb_to_bytes(double tb) {
  return static_cast<Bytes>(std::llround(tb * static_cast<double>(kTB)));
}

/// Stations (and registry allocations, when given) that cannot hold the
/// planned pinned set within the pin budget, or the planned tape volume.
inline std::vector<std::string> fit_check(const StorageReport& report, const Topology& topology,
                                          const PolicyTable& policy,
                                          std::span<const ResourceEntry> registry = {}) {
  std::vector<std::string> out;
  const Fraction minf = policy.on_demand_min_fraction;
  auto check_disk = [&](const std::string& who, Bytes disk, Bytes pinned) {
    if (!pin_fits(disk, pinned, minf)) {
      out.push_back("pinned overflow at " + who + ": pinned requirement " +
                    std::to_string(pinned) + " bytes, disk " + std::to_string(disk) +
                    " bytes, needs " + std::to_string(required_disk(pinned, minf)) + " bytes");
    }
  };
  auto check_tape = [&](const std::string& who, Bytes tape, Bytes need) {
    if (need > tape) {
      out.push_back("tape overflow at " + who + ": requirement " + std::to_string(need) +
                    " bytes, tape " + std::to_string(tape) + " bytes");
    }
  };
  for (const auto& s : topology.stations) {
    SiteClass sc;
    if (s.kind == StationKind::CAC) {
      sc = SiteClass::CAC;
    } else if (s.kind == StationKind::RAC) {
      sc = SiteClass::RAC;
    } else {
      continue;
    }
    check_disk(s.station_id, s.disk_capacity, report.total(sc, Medium::Disk));
    check_tape(s.station_id, s.tape_capacity, report.total(sc, Medium::Tape));
  }
  for (const auto& e : registry) {
    const SiteClass sc = e.central ? SiteClass::CAC : SiteClass::RAC;
    check_disk("resource " + e.center, tb_to_bytes(e.disk_allocated), report.total(sc, Medium::Disk));
    if (e.tape) check_tape("resource " + e.center, tb_to_bytes(*e.tape), report.total(sc, Medium::Tape));
  }
  return out;
}

}  // namespace racgrid
