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

// Report emission: CSV tables, human-readable summaries and the
// structured JSON report. Output is a pure function of its inputs.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "racgrid/planner.hpp"
#include "racgrid/policy.hpp"
#include "racgrid/scenario.hpp"
#include "racgrid/sim.hpp"

namespace racgrid {

inline std::string fixed(double v, int decimals = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

/// Decimal units, three decimals: 1470000000000000 -> "1.470 PB".
inline std::string format_bytes(Bytes b) {
  static constexpr std::array<std::pair<Bytes, const char*>, 5> units = {
      {{kPB, "PB"}, {kTB, "TB"}, {kGB, "GB"}, {kMB, "MB"}, {kKB, "kB"}}};
  for (const auto& [scale, name] : units) {
    if (b >= scale) return fixed(static_cast<double>(b) / static_cast<double>(scale), 3) + " " + name;
  }
  return std::to_string(b) + " B";
}

inline std::string format_percent(Fraction f) {
  std::string s = fixed(f.value() * 100.0, 2);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s + "%";
}

// ---------------------------------------------------------------------------
// Planner output

struct PlanResult {
  std::string scenario;
  TierCounts events{};
  PolicyTable policy;
  StorageReport storage;
  CpuSummary cpu;
  std::vector<std::string> fit;
  std::uint32_t years = 0;
  Bytes growth_rate = reference::kGrowthPerYear;
  std::vector<StorageReport> projection;
};

inline void write_storage_csv(std::ostream& os, const StorageReport& r) {
  os << "site_class,medium,tier,bytes\n";
  for (SiteClass s : {SiteClass::CAC, SiteClass::RAC}) {
    for (Medium m : {Medium::Disk, Medium::Tape}) {
      for (DataTier t : kAllTiers) {
        os << site_class_name(s) << ',' << medium_name(m) << ',' << tier_name(t) << ','
           << r.at(s, m, t) << '\n';
      }
      os << site_class_name(s) << ',' << medium_name(m) << ",ALL," << r.total(s, m) << '\n';
    }
  }
}

inline void write_projection_csv(std::ostream& os, const std::vector<StorageReport>& years) {
  os << "year,site_class,medium,tier,bytes\n";
  for (std::size_t y = 0; y < years.size(); ++y) {
    for (SiteClass s : {SiteClass::CAC, SiteClass::RAC}) {
      for (Medium m : {Medium::Disk, Medium::Tape}) {
        for (DataTier t : kAllTiers) {
          os << y << ',' << site_class_name(s) << ',' << medium_name(m) << ',' << tier_name(t)
             << ',' << years[y].at(s, m, t) << '\n';
        }
        os << y << ',' << site_class_name(s) << ',' << medium_name(m) << ",ALL,"
           << years[y].total(s, m) << '\n';
      }
    }
  }
}

namespace report_detail {

inline std::string pad(std::string s, std::size_t w, bool right = false) {
  if (s.size() >= w) return s + " ";
  return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
}

}  // namespace report_detail

/// Placement matrix with per-event sizes, then computed and reference
/// totals; the layout follows the data-model table.
inline std::string storage_table(const StorageReport& r, const PolicyTable& policy) {
  using report_detail::pad;
  std::ostringstream os;
  os << pad("Data Tier", 14) << pad("Size/Event (kB)", 17, true) << pad("CAC Tape", 13, true)
     << pad("CAC Disk", 13, true) << pad("RAC Tape", 13, true) << pad("RAC Disk", 13, true) << '\n';
  for (DataTier t : kAllTiers) {
    os << pad(std::string(tier_name(t)), 14) << pad(std::to_string(default_event_size(t)), 17, true);
    for (PlacementColumn c : kAllColumns) {
      std::string cell = format_percent(policy.fraction(t, c));
      if (policy.is_few(t, c)) cell = "few " + cell;
      os << pad(cell, 13, true);
    }
    os << '\n';
  }
  os << pad("Totals", 14) << pad("", 17, true)
     << pad(format_bytes(r.total(SiteClass::CAC, Medium::Tape)), 13, true)
     << pad(format_bytes(r.total(SiteClass::CAC, Medium::Disk)), 13, true)
     << pad(format_bytes(r.total(SiteClass::RAC, Medium::Tape)), 13, true)
     << pad(format_bytes(r.total(SiteClass::RAC, Medium::Disk)), 13, true) << '\n';
  os << pad("Reference", 14) << pad("", 17, true) << pad("1.5 PB", 13, true)
     << pad("60 TB", 13, true) << pad("~50 TB", 13, true) << pad("~50 TB", 13, true) << '\n';
  os << "(RAC columns are per RAC, over " << r.n_racs << " RACs)\n";
  return os.str();
}

inline std::string plan_summary(const PlanResult& p) {
  std::ostringstream os;
  const auto& r = p.storage;
  os << "scenario: " << p.scenario << '\n';
  os << "events:";
  for (DataTier t : kAllTiers) {
    if (p.events[tier_index(t)] != 0) os << ' ' << tier_name(t) << '=' << p.events[tier_index(t)];
  }
  os << "\n\n" << storage_table(r, p.policy) << '\n';

  const Bytes cac_tape = r.total(SiteClass::CAC, Medium::Tape);
  const Bytes cac_disk = r.total(SiteClass::CAC, Medium::Disk);
  const Bytes rac_disk = r.total(SiteClass::RAC, Medium::Disk);
  const Bytes rac_tape = r.total(SiteClass::RAC, Medium::Tape);
  auto ratio = [](Bytes a, Bytes b) {
    return fixed(100.0 * (static_cast<double>(a) - static_cast<double>(b)) / static_cast<double>(b), 1);
  };
  os << "CAC tape: " << format_bytes(cac_tape) << " (" << cac_tape << " bytes), "
     << ratio(cac_tape, reference::kCacTape) << "% from reference 1.5 PB\n";
  os << "CAC disk: " << format_bytes(cac_disk) << " (" << cac_disk << " bytes); "
     << "reference provisioned 60 TB";
  if (cac_disk > reference::kCacDisk) os << " is below the placement requirement";
  os << '\n';
  os << "per-RAC pinned disk: " << format_bytes(rac_disk) << " (" << rac_disk << " bytes), "
     << ratio(rac_disk, reference::kRacDisk) << "% from reference ~50 TB\n";
  os << "per-RAC tape: " << format_bytes(rac_tape) << " (" << rac_tape << " bytes), reference ~50 TB\n";

  const auto& c = p.cpu;
  os << "\nCPU\n";
  os << "  remote allocated: " << fixed(c.allocated_remote, 1)
     << " GHz (reference: about 360 GHz)\n";
  os << "  remote total: " << fixed(c.total_remote, 1)
     << " GHz (reference claim: over 1800 GHz)\n";
  os << "  central: " << fixed(c.cac, 1) << " GHz\n";
  os << "  requirement: " << fixed(c.requirement, 1) << " GHz\n";
  os << "  shortfall: " << fixed(c.shortfall, 1) << " GHz\n";

  os << "\nfit check: " << (p.fit.empty() ? "no violations" : std::to_string(p.fit.size()) + " violation(s)")
     << '\n';
  for (const auto& v : p.fit) os << "  " << v << '\n';

  if (p.years > 0) {
    os << "\ngrowth projection (+" << format_bytes(p.growth_rate) << " CAC tape per year)\n";
    for (std::size_t y = 0; y < p.projection.size(); ++y) {
      const auto& py = p.projection[y];
      os << "  year " << y << ": CAC tape " << format_bytes(py.total(SiteClass::CAC, Medium::Tape))
         << ", CAC disk " << format_bytes(py.total(SiteClass::CAC, Medium::Disk))
         << ", per-RAC disk " << format_bytes(py.total(SiteClass::RAC, Medium::Disk))
         << ", per-RAC tape " << format_bytes(py.total(SiteClass::RAC, Medium::Tape)) << '\n';
    }
  }
  return os.str();
}

inline nlohmann::ordered_json storage_json(const StorageReport& r) {
  nlohmann::ordered_json j;
  j["n_racs"] = r.n_racs;
  for (SiteClass s : {SiteClass::CAC, SiteClass::RAC}) {
    for (Medium m : {Medium::Disk, Medium::Tape}) {
      nlohmann::ordered_json cell;
      cell["total"] = r.total(s, m);
      for (DataTier t : kAllTiers) cell["tiers"][std::string(tier_name(t))] = r.at(s, m, t);
      j[std::string(site_class_name(s))][std::string(medium_name(m))] = cell;
    }
  }
  return j;
}

inline nlohmann::ordered_json plan_json(const PlanResult& p) {
  nlohmann::ordered_json j;
  j["storage"] = storage_json(p.storage);
  j["cpu"] = {{"allocated_remote_ghz", p.cpu.allocated_remote},
              {"total_remote_ghz", p.cpu.total_remote},
              {"cac_ghz", p.cpu.cac},
              {"requirement_ghz", p.cpu.requirement},
              {"shortfall_ghz", p.cpu.shortfall}};
  j["fit_violations"] = p.fit;
  if (p.years > 0) {
    j["growth_rate_bytes_per_year"] = p.growth_rate;
    auto& arr = j["projection"] = nlohmann::ordered_json::array();
    for (const auto& y : p.projection) arr.push_back(storage_json(y));
  }
  return j;
}

// ---------------------------------------------------------------------------
// Simulation output

inline double hit_rate(std::uint64_t hits, std::uint64_t requests) {
  return requests == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(requests);
}

inline void write_station_metrics_csv(std::ostream& os, const Metrics& m) {
  os << "station_id,kind,region_id,requests,disk_hits,misses,hit_rate,tape_stages,evictions,"
        "tmb_requests,tmb_hits,tmb_hit_rate,jobs_run,pinned_bytes,occupancy_bytes,tape_bytes\n";
  const std::size_t tmb = tier_index(DataTier::TMB);
  for (const auto& s : m.stations) {
    const std::uint64_t tmb_req = s.tier_hits[tmb] + s.tier_misses[tmb];
    os << s.station_id << ',' << kind_name(s.kind) << ',' << s.region_id << ',' << s.requests
       << ',' << s.disk_hits << ',' << s.misses << ',' << fixed(hit_rate(s.disk_hits, s.requests))
       << ',' << s.tape_stages << ',' << s.evictions << ',' << tmb_req << ',' << s.tier_hits[tmb]
       << ',' << fixed(hit_rate(s.tier_hits[tmb], tmb_req)) << ',' << s.jobs_run << ','
       << s.pinned_bytes << ',' << s.occupancy_bytes << ',' << s.tape_bytes << '\n';
  }
}

inline void write_link_metrics_csv(std::ostream& os, const Metrics& m) {
  os << "scope,id,link_class,transfers,bytes\n";
  for (LinkClass c : kAllLinkClasses) {
    const auto& cm = m.link_classes[static_cast<std::size_t>(c)];
    os << "class," << link_class_name(c) << ',' << link_class_name(c) << ',' << cm.transfers << ','
       << cm.bytes << '\n';
  }
  for (const auto& l : m.links) {
    os << "link," << l.link_id << ',' << link_class_name(l.link_class) << ',' << l.transfers << ','
       << l.bytes << '\n';
  }
}

struct JobPercentiles {
  std::string label;
  double wait = 0, transfer = 0, compute = 0, total = 0;
};

/// Nearest-rank percentiles of completed job phase times, then the mean.
inline std::vector<JobPercentiles> job_percentiles(const std::vector<JobRecord>& jobs) {
  std::vector<JobPercentiles> out;
  if (jobs.empty()) return out;
  auto column = [&](auto field) {
    std::vector<double> v;
    v.reserve(jobs.size());
    for (const auto& j : jobs) v.push_back(j.*field);
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto wait = column(&JobRecord::wait);
  const auto transfer = column(&JobRecord::transfer);
  const auto compute = column(&JobRecord::compute);
  const auto total = column(&JobRecord::total);
  const std::size_t n = jobs.size();
  for (auto [label, p] : std::initializer_list<std::pair<const char*, double>>{
           {"p50", 50}, {"p90", 90}, {"p99", 99}, {"max", 100}}) {
    std::size_t idx = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
    idx = std::clamp<std::size_t>(idx, 1, n) - 1;
    out.push_back({label, wait[idx], transfer[idx], compute[idx], total[idx]});
  }
  auto mean = [&](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  out.push_back({"mean", mean(wait), mean(transfer), mean(compute), mean(total)});
  return out;
}

inline void write_job_metrics_csv(std::ostream& os, const Metrics& m) {
  os << "percentile,jobs,wait_s,transfer_s,compute_s,total_s\n";
  for (const auto& p : job_percentiles(m.jobs)) {
    os << p.label << ',' << m.jobs.size() << ',' << fixed(p.wait) << ',' << fixed(p.transfer) << ','
       << fixed(p.compute) << ',' << fixed(p.total) << '\n';
  }
}

inline std::string simulation_summary(const Scenario& s, const Metrics& m) {
  std::ostringstream os;
  os << "scenario: " << s.name << '\n';
  os << "seed: " << s.rng_seed << '\n';
  os << "production phase end: " << fixed(m.production_end, 3) << " s\n";
  os << "simulation end: " << fixed(m.end_time, 3) << " s\n";
  os << "events processed: " << m.events_processed << '\n';
  os << "jobs: " << m.jobs_submitted << " submitted, " << m.jobs_completed << " completed\n";
  os << "DAN proxy: " << m.dan_hits << " hits, " << m.dan_misses << " misses\n";
  os << "transfers completed: " << m.transfers_completed << ", payload "
     << format_bytes(m.transfer_payload_bytes) << '\n';
  Bytes link_sum = 0;
  for (const auto& l : m.links) link_sum += l.bytes;
  Bytes class_sum = 0;
  for (const auto& c : m.link_classes) class_sum += c.bytes;
  os << "link bytes: " << link_sum << ", class bytes: " << class_sum
     << ", transfer hop bytes: " << m.transfer_hop_bytes
     << (link_sum == class_sum && class_sum == m.transfer_hop_bytes ? " (conserved)" : " (MISMATCH)")
     << '\n';
  if (m.tape_rejections != 0) os << "tape writes rejected: " << m.tape_rejections << '\n';

  const StorageReport predicted = scenario_storage(s);
  os << "\npinned at end of production (predicted per RAC: "
     << predicted.total(SiteClass::RAC, Medium::Disk) << " bytes)\n";
  for (const auto& [id, bytes] : m.production_pinned) os << "  " << id << ": " << bytes << " bytes\n";

  os << "\nstations (requests / hit rate / TMB hit rate)\n";
  const std::size_t tmb = tier_index(DataTier::TMB);
  for (const auto& st : m.stations) {
    const std::uint64_t tmb_req = st.tier_hits[tmb] + st.tier_misses[tmb];
    os << "  " << st.station_id << " [" << kind_name(st.kind) << "] " << st.requests << " / "
       << fixed(hit_rate(st.disk_hits, st.requests), 4) << " / "
       << (tmb_req == 0 ? std::string("-") : fixed(hit_rate(st.tier_hits[tmb], tmb_req), 4)) << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json metrics_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["production_end"] = m.production_end;
  j["end_time"] = m.end_time;
  j["events_processed"] = m.events_processed;
  j["jobs_submitted"] = m.jobs_submitted;
  j["jobs_completed"] = m.jobs_completed;
  j["dan"] = {{"hits", m.dan_hits}, {"misses", m.dan_misses}};
  j["transfers"] = {{"completed", m.transfers_completed},
                    {"payload_bytes", m.transfer_payload_bytes},
                    {"hop_bytes", m.transfer_hop_bytes}};
  j["tape_rejections"] = m.tape_rejections;
  for (LinkClass c : kAllLinkClasses) {
    const auto& cm = m.link_classes[static_cast<std::size_t>(c)];
    j["link_classes"][std::string(link_class_name(c))] = {{"transfers", cm.transfers},
                                                          {"bytes", cm.bytes}};
  }
  j["production_pinned"] = m.production_pinned;
  auto& st = j["stations"] = nlohmann::ordered_json::array();
  for (const auto& s : m.stations) {
    nlohmann::ordered_json e;
    e["station_id"] = s.station_id;
    e["kind"] = std::string(kind_name(s.kind));
    e["requests"] = s.requests;
    e["disk_hits"] = s.disk_hits;
    e["misses"] = s.misses;
    e["tape_stages"] = s.tape_stages;
    e["evictions"] = s.evictions;
    for (DataTier t : kAllTiers) {
      const auto i = tier_index(t);
      if (s.tier_hits[i] + s.tier_misses[i] == 0) continue;
      e["tiers"][std::string(tier_name(t))] = {{"hits", s.tier_hits[i]}, {"misses", s.tier_misses[i]}};
    }
    st.push_back(e);
  }
  auto& jp = j["job_percentiles"] = nlohmann::ordered_json::array();
  for (const auto& p : job_percentiles(m.jobs)) {
    jp.push_back({{"label", p.label}, {"wait", p.wait}, {"transfer", p.transfer},
                  {"compute", p.compute}, {"total", p.total}});
  }
  return j;
}

}  // namespace racgrid
