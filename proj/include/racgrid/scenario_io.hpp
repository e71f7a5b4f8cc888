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

// YAML scenario files. Section and field names are fixed; quantities of
// bytes accept decimal unit suffixes ("60 TB", "100 MB/s").

#pragma once

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "racgrid/errors.hpp"
#include "racgrid/scenario.hpp"

namespace racgrid {

/// Malformed scenario text; carries the 1-based position when known.
class ScenarioParseError : public Error {
 public:
  ScenarioParseError(const std::string& msg, int line, int column)
      : Error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + msg
                       : msg),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

namespace io_detail {

[[noreturn]] inline void fail(const YAML::Node& n, const std::string& msg) {
  const YAML::Mark m = n.Mark();
  throw ScenarioParseError(msg, m.line >= 0 ? m.line + 1 : 0, m.column >= 0 ? m.column + 1 : 0);
}

inline void expect_map(const YAML::Node& n, std::string_view what) {
  if (!n.IsMap()) fail(n, std::string(what) + " must be a mapping");
}

inline void expect_seq(const YAML::Node& n, std::string_view what) {
  if (!n.IsSequence()) fail(n, std::string(what) + " must be a sequence");
}

inline void only_keys(const YAML::Node& n, std::string_view what,
                      std::initializer_list<std::string_view> keys) {
  for (const auto& kv : n) {
    const auto k = kv.first.as<std::string>();
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      fail(kv.first, "unknown field '" + k + "' in " + std::string(what));
    }
  }
}

inline std::string scalar(const YAML::Node& n, std::string_view field) {
  if (!n.IsScalar()) fail(n, "field '" + std::string(field) + "' must be a scalar");
  return n.Scalar();
}

inline YAML::Node required(const YAML::Node& parent, const char* key, std::string_view what) {
  YAML::Node n = parent[key];
  if (!n) fail(parent, "missing field '" + std::string(key) + "' in " + std::string(what));
  return n;
}

inline double to_double(const YAML::Node& n, std::string_view field) {
  const std::string s = scalar(n, field);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    fail(n, "field '" + std::string(field) + "': expected a number, got '" + s + "'");
  }
  return v;
}

inline std::uint64_t to_count(const YAML::Node& n, std::string_view field) {
  const std::string s = scalar(n, field);
  if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      fail(n, "field '" + std::string(field) + "': count out of range");
    }
  }
  const double v = to_double(n, field);
  if (v < 0 || v != std::floor(v) || v > 1.8e19) {
    fail(n, "field '" + std::string(field) + "': expected a non-negative integer, got '" + s + "'");
  }
  return static_cast<std::uint64_t>(v);
}

inline bool to_bool(const YAML::Node& n, std::string_view field) {
  const std::string s = scalar(n, field);
  if (s == "true" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "no" || s == "off") return false;
  fail(n, "field '" + std::string(field) + "': expected true or false, got '" + s + "'");
}

/// "<number> [unit][/s]" with decimal units B, kB, MB, GB, TB, PB.
inline double to_quantity(const YAML::Node& n, std::string_view field, bool rate) {
  std::string s = scalar(n, field);
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    fail(n, "field '" + std::string(field) + "': expected a quantity, got '" + s + "'");
  }
  std::string unit = s.substr(pos);
  unit.erase(std::remove(unit.begin(), unit.end(), ' '), unit.end());
  if (rate && unit.size() >= 2 && unit.compare(unit.size() - 2, 2, "/s") == 0) {
    unit.resize(unit.size() - 2);
  }
  static const std::map<std::string, double> units = {
      {"", 1.0},   {"B", 1.0},    {"kB", 1e3},  {"KB", 1e3}, {"MB", 1e6},
      {"GB", 1e9}, {"TB", 1e12}, {"PB", 1e15}};
  auto it = units.find(unit);
  if (it == units.end() || !(v >= 0) || !std::isfinite(v)) {
    fail(n, "field '" + std::string(field) + "': bad quantity '" + s + "'");
  }
  return v * it->second;
}

inline Bytes to_bytes(const YAML::Node& n, std::string_view field) {
  const std::string& raw = scalar(n, field);
  if (!raw.empty() && std::all_of(raw.begin(), raw.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return to_count(n, field);
  }
  const double v = to_quantity(n, field, false);
  if (v > 1.8e19) fail(n, "field '" + std::string(field) + "': byte count out of range");
  return static_cast<Bytes>(std::llround(v));
}

inline Fraction to_fraction(const YAML::Node& n, std::string_view field) {
  return Fraction::from_double(to_double(n, field));
}

inline std::optional<double> opt_double(const YAML::Node& parent, const char* key) {
  const YAML::Node n = parent[key];
  if (!n || n.IsNull()) return std::nullopt;
  return to_double(n, key);
}

inline Station parse_station(const YAML::Node& n) {
  expect_map(n, "station");
  only_keys(n, "station",
            {"id", "kind", "region", "disk", "tape", "cpu", "parent", "tape_mount_latency",
             "tape_stream_rate", "tape_drives"});
  Station s;
  s.station_id = scalar(required(n, "id", "station"), "id");
  const YAML::Node kind = required(n, "kind", "station");
  auto k = parse_kind(scalar(kind, "kind"));
  if (!k) fail(kind, "field 'kind': unknown station kind '" + kind.Scalar() + "'");
  s.kind = *k;
  if (n["region"]) s.region_id = scalar(n["region"], "region");
  if (n["disk"]) s.disk_capacity = to_bytes(n["disk"], "disk");
  if (n["tape"]) s.tape_capacity = to_bytes(n["tape"], "tape");
  if (n["cpu"]) s.cpu_power = to_double(n["cpu"], "cpu");
  if (n["parent"] && !n["parent"].IsNull()) s.parent_id = scalar(n["parent"], "parent");
  if (n["tape_mount_latency"]) s.tape.mount_latency = to_double(n["tape_mount_latency"], "tape_mount_latency");
  if (n["tape_stream_rate"]) s.tape.stream_rate = to_quantity(n["tape_stream_rate"], "tape_stream_rate", true);
  if (n["tape_drives"]) s.tape.drives = static_cast<std::uint32_t>(to_count(n["tape_drives"], "tape_drives"));
  return s;
}

inline Topology parse_topology(const YAML::Node& n) {
  expect_map(n, "topology");
  only_keys(n, "topology", {"stations", "regions", "links"});
  Topology t;
  const YAML::Node stations = required(n, "stations", "topology");
  expect_seq(stations, "topology.stations");
  for (const auto& s : stations) t.stations.push_back(parse_station(s));
  if (const YAML::Node regions = n["regions"]) {
    expect_seq(regions, "topology.regions");
    for (const auto& r : regions) {
      expect_map(r, "region");
      only_keys(r, "region", {"id", "name", "rac"});
      Region reg;
      reg.region_id = scalar(required(r, "id", "region"), "id");
      reg.name = r["name"] ? scalar(r["name"], "name") : reg.region_id;
      reg.rac_id = scalar(required(r, "rac", "region"), "rac");
      t.regions.push_back(std::move(reg));
    }
  }
  if (const YAML::Node links = n["links"]) {
    expect_seq(links, "topology.links");
    for (const auto& l : links) {
      expect_map(l, "link");
      only_keys(l, "link", {"between", "bandwidth", "latency"});
      const YAML::Node ends = required(l, "between", "link");
      if (!ends.IsSequence() || ends.size() != 2) fail(ends, "field 'between' needs two station ids");
      NetworkLink link;
      link.endpoint_a = scalar(ends[0], "between");
      link.endpoint_b = scalar(ends[1], "between");
      link.bandwidth = to_quantity(required(l, "bandwidth", "link"), "bandwidth", true);
      if (l["latency"]) link.latency = to_double(l["latency"], "latency");
      t.links.push_back(std::move(link));
    }
  }
  t.refresh_members();
  return t;
}

inline void parse_policy(const YAML::Node& n, PolicyTable& p) {
  expect_map(n, "policy_overrides");
  only_keys(n, "policy_overrides",
            {"few_percent", "on_demand_min_fraction", "foreign_rac_before_cac", "tiers"});
  if (n["few_percent"]) p.few_percent = to_fraction(n["few_percent"], "few_percent");
  if (n["on_demand_min_fraction"]) {
    p.on_demand_min_fraction = to_fraction(n["on_demand_min_fraction"], "on_demand_min_fraction");
  }
  if (n["foreign_rac_before_cac"]) {
    p.foreign_rac_before_cac = to_bool(n["foreign_rac_before_cac"], "foreign_rac_before_cac");
  }
  if (const YAML::Node tiers = n["tiers"]) {
    expect_map(tiers, "policy_overrides.tiers");
    for (const auto& kv : tiers) {
      const std::string name = kv.first.as<std::string>();
      auto tier = parse_tier(name);
      if (!tier) fail(kv.first, "unknown data tier '" + name + "'");
      expect_map(kv.second, "tier override");
      only_keys(kv.second, "tier override", {"cac_tape", "cac_disk", "rac_tape", "rac_disk"});
      for (PlacementColumn c : kAllColumns) {
        const std::string col(column_name(c));
        const YAML::Node v = kv.second[col];
        if (!v) continue;
        if (v.IsScalar() && v.Scalar() == "few") {
          p.set_few(*tier, c);
        } else {
          p.set(*tier, c, to_fraction(v, col));
        }
      }
    }
  }
}

inline DatasetSpec parse_dataset(const YAML::Node& n) {
  expect_map(n, "dataset");
  only_keys(n, "dataset", {"id", "tier", "events", "popularity", "split"});
  DatasetSpec d;
  d.id = scalar(required(n, "id", "dataset"), "id");
  const YAML::Node tier = required(n, "tier", "dataset");
  auto t = parse_tier(scalar(tier, "tier"));
  if (!t) fail(tier, "field 'tier': unknown data tier '" + tier.Scalar() + "'");
  d.tier = *t;
  d.events = to_count(required(n, "events", "dataset"), "events");
  if (n["popularity"]) d.popularity = to_double(n["popularity"], "popularity");
  if (n["split"]) d.split = static_cast<std::uint32_t>(to_count(n["split"], "split"));
  return d;
}

inline WorkloadSpec parse_workload(const YAML::Node& n) {
  expect_map(n, "workload");
  only_keys(n, "workload", {"opportunistic_overflow", "dan", "streams"});
  WorkloadSpec w;
  if (n["opportunistic_overflow"]) {
    w.opportunistic_overflow = to_bool(n["opportunistic_overflow"], "opportunistic_overflow");
  }
  if (const YAML::Node dan = n["dan"]) {
    expect_map(dan, "workload.dan");
    only_keys(dan, "workload.dan", {"cache_capacity", "proxy_latency", "central_latency", "key_space"});
    if (dan["cache_capacity"]) w.dan.cache_capacity = to_count(dan["cache_capacity"], "cache_capacity");
    if (dan["proxy_latency"]) w.dan.proxy_latency = to_double(dan["proxy_latency"], "proxy_latency");
    if (dan["central_latency"]) w.dan.central_latency = to_double(dan["central_latency"], "central_latency");
    if (dan["key_space"]) w.dan.key_space = to_count(dan["key_space"], "key_space");
  }
  if (const YAML::Node streams = n["streams"]) {
    expect_seq(streams, "workload.streams");
    for (const auto& s : streams) {
      expect_map(s, "stream");
      only_keys(s, "stream",
                {"region", "kind", "tier", "rate", "cpu_seconds_per_event", "db_queries",
                 "max_jobs", "mc_events_per_job"});
      WorkloadStream ws;
      ws.region_id = scalar(required(s, "region", "stream"), "region");
      if (s["kind"]) {
        auto k = parse_job_kind(scalar(s["kind"], "kind"));
        if (!k) fail(s["kind"], "field 'kind': unknown job kind '" + s["kind"].Scalar() + "'");
        ws.kind = *k;
      }
      const YAML::Node tier = required(s, "tier", "stream");
      auto t = parse_tier(scalar(tier, "tier"));
      if (!t) fail(tier, "field 'tier': unknown data tier '" + tier.Scalar() + "'");
      ws.tier = *t;
      ws.rate = to_double(required(s, "rate", "stream"), "rate");
      ws.cpu_seconds_per_event =
          to_double(required(s, "cpu_seconds_per_event", "stream"), "cpu_seconds_per_event");
      if (s["db_queries"]) ws.db_queries = static_cast<std::uint32_t>(to_count(s["db_queries"], "db_queries"));
      if (s["max_jobs"] && !s["max_jobs"].IsNull()) ws.max_jobs = to_count(s["max_jobs"], "max_jobs");
      if (s["mc_events_per_job"]) ws.mc_events_per_job = to_count(s["mc_events_per_job"], "mc_events_per_job");
      w.streams.push_back(std::move(ws));
    }
  }
  return w;
}

inline ResourceEntry parse_resource(const YAML::Node& n) {
  expect_map(n, "resource");
  only_keys(n, "resource",
            {"center", "iacs", "cpu_allocated", "cpu_total", "disk_allocated", "disk_total",
             "tape", "tape_total", "schedule", "central"});
  ResourceEntry e;
  e.center = scalar(required(n, "center", "resource"), "center");
  if (const YAML::Node iacs = n["iacs"]) {
    expect_seq(iacs, "resource.iacs");
    for (const auto& i : iacs) e.iacs.push_back(scalar(i, "iacs"));
  }
  e.cpu_allocated = to_double(required(n, "cpu_allocated", "resource"), "cpu_allocated");
  e.cpu_total = opt_double(n, "cpu_total");
  if (n["disk_allocated"]) e.disk_allocated = to_double(n["disk_allocated"], "disk_allocated");
  e.disk_total = opt_double(n, "disk_total");
  e.tape = opt_double(n, "tape");
  e.tape_total = opt_double(n, "tape_total");
  if (n["schedule"]) e.schedule = scalar(n["schedule"], "schedule");
  if (n["central"]) e.central = to_bool(n["central"], "central");
  return e;
}

}  // namespace io_detail

/// Parses scenario text. Throws ScenarioParseError on malformed input;
/// semantic validity is checked separately by validate_scenario.
inline Scenario parse_scenario(const std::string& text) {
  using namespace io_detail;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ScenarioParseError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0,
                             e.mark.column >= 0 ? e.mark.column + 1 : 0);
  }
  if (!root || !root.IsMap()) throw ScenarioParseError("scenario must be a mapping", 1, 1);
  try {
    only_keys(root, "scenario",
              {"name", "topology", "policy_overrides", "datasets", "workload", "simulation",
               "resources"});
    Scenario s;
    if (root["name"]) s.name = scalar(root["name"], "name");
    s.topology = parse_topology(required(root, "topology", "scenario"));
    if (const YAML::Node p = root["policy_overrides"]; p && !p.IsNull()) parse_policy(p, s.policy);
    if (const YAML::Node d = root["datasets"]; d && !d.IsNull()) {
      expect_seq(d, "datasets");
      for (const auto& ds : d) s.datasets.push_back(parse_dataset(ds));
    }
    if (const YAML::Node w = root["workload"]; w && !w.IsNull()) s.workload = parse_workload(w);
    if (const YAML::Node sim = root["simulation"]; sim && !sim.IsNull()) {
      expect_map(sim, "simulation");
      only_keys(sim, "simulation", {"duration", "seed", "target_file_size"});
      if (sim["duration"]) s.duration = to_double(sim["duration"], "duration");
      if (sim["seed"]) s.rng_seed = to_count(sim["seed"], "seed");
      if (sim["target_file_size"]) s.target_file_size = to_bytes(sim["target_file_size"], "target_file_size");
    }
    if (const YAML::Node r = root["resources"]; r && !r.IsNull()) {
      expect_map(r, "resources");
      only_keys(r, "resources", {"cpu_requirement", "centers"});
      if (r["cpu_requirement"]) s.cpu_requirement = to_double(r["cpu_requirement"], "cpu_requirement");
      if (const YAML::Node c = r["centers"]) {
        expect_seq(c, "resources.centers");
        for (const auto& e : c) s.resources.push_back(parse_resource(e));
      }
    }
    return s;
  } catch (const YAML::Exception& e) {
    throw ScenarioParseError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0,
                             e.mark.column >= 0 ? e.mark.column + 1 : 0);
  }
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError("cannot read scenario file " + path, 0, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

/// Writes a scenario that parses back to an equal value.
inline std::string serialize_scenario(const Scenario& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  if (!s.name.empty()) out << YAML::Key << "name" << YAML::Value << s.name;

  out << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "stations" << YAML::Value << YAML::BeginSeq;
  const TapeParams tape_defaults;
  for (const auto& st : s.topology.stations) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << st.station_id;
    out << YAML::Key << "kind" << YAML::Value << std::string(kind_name(st.kind));
    if (!st.region_id.empty()) out << YAML::Key << "region" << YAML::Value << st.region_id;
    out << YAML::Key << "disk" << YAML::Value << st.disk_capacity;
    out << YAML::Key << "tape" << YAML::Value << st.tape_capacity;
    out << YAML::Key << "cpu" << YAML::Value << st.cpu_power;
    if (st.parent_id) out << YAML::Key << "parent" << YAML::Value << *st.parent_id;
    if (st.tape.mount_latency != tape_defaults.mount_latency) {
      out << YAML::Key << "tape_mount_latency" << YAML::Value << st.tape.mount_latency;
    }
    if (st.tape.stream_rate != tape_defaults.stream_rate) {
      out << YAML::Key << "tape_stream_rate" << YAML::Value << st.tape.stream_rate;
    }
    if (st.tape.drives != tape_defaults.drives) {
      out << YAML::Key << "tape_drives" << YAML::Value << st.tape.drives;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "regions" << YAML::Value << YAML::BeginSeq;
  for (const auto& r : s.topology.regions) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << r.region_id
        << YAML::Key << "name" << YAML::Value << r.name << YAML::Key << "rac" << YAML::Value
        << r.rac_id << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "links" << YAML::Value << YAML::BeginSeq;
  for (const auto& l : s.topology.links) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "between" << YAML::Value << YAML::Flow
        << YAML::BeginSeq << l.endpoint_a << l.endpoint_b << YAML::EndSeq << YAML::Key
        << "bandwidth" << YAML::Value << l.bandwidth << YAML::Key << "latency" << YAML::Value
        << l.latency << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;

  const PolicyTable def = default_policy();
  out << YAML::Key << "policy_overrides" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "few_percent" << YAML::Value << s.policy.few_percent.value();
  out << YAML::Key << "on_demand_min_fraction" << YAML::Value
      << s.policy.on_demand_min_fraction.value();
  out << YAML::Key << "foreign_rac_before_cac" << YAML::Value << s.policy.foreign_rac_before_cac;
  bool any_tier = false;
  for (DataTier t : kAllTiers) {
    bool header = false;
    for (PlacementColumn c : kAllColumns) {
      const bool few = s.policy.is_few(t, c);
      const bool same = few == def.is_few(t, c) &&
                        (few || s.policy.fraction(t, c) == def.fraction(t, c));
      if (same) continue;
      if (!any_tier) {
        out << YAML::Key << "tiers" << YAML::Value << YAML::BeginMap;
        any_tier = true;
      }
      if (!header) {
        out << YAML::Key << std::string(tier_name(t)) << YAML::Value << YAML::Flow << YAML::BeginMap;
        header = true;
      }
      out << YAML::Key << std::string(column_name(c)) << YAML::Value;
      if (few) {
        out << "few";
      } else {
        out << s.policy.fraction(t, c).value();
      }
    }
    if (header) out << YAML::EndMap;
  }
  if (any_tier) out << YAML::EndMap;
  out << YAML::EndMap;

  out << YAML::Key << "datasets" << YAML::Value << YAML::BeginSeq;
  for (const auto& d : s.datasets) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << d.id << YAML::Key
        << "tier" << YAML::Value << std::string(tier_name(d.tier)) << YAML::Key << "events"
        << YAML::Value << d.events << YAML::Key << "popularity" << YAML::Value << d.popularity
        << YAML::Key << "split" << YAML::Value << d.split << YAML::EndMap;
  }
  out << YAML::EndSeq;

  const auto& w = s.workload;
  out << YAML::Key << "workload" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "opportunistic_overflow" << YAML::Value << w.opportunistic_overflow;
  out << YAML::Key << "dan" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key
      << "cache_capacity" << YAML::Value << w.dan.cache_capacity << YAML::Key << "proxy_latency"
      << YAML::Value << w.dan.proxy_latency << YAML::Key << "central_latency" << YAML::Value
      << w.dan.central_latency << YAML::Key << "key_space" << YAML::Value << w.dan.key_space
      << YAML::EndMap;
  out << YAML::Key << "streams" << YAML::Value << YAML::BeginSeq;
  for (const auto& st : w.streams) {
    out << YAML::BeginMap;
    out << YAML::Key << "region" << YAML::Value << st.region_id;
    out << YAML::Key << "kind" << YAML::Value << std::string(job_kind_name(st.kind));
    out << YAML::Key << "tier" << YAML::Value << std::string(tier_name(st.tier));
    out << YAML::Key << "rate" << YAML::Value << st.rate;
    out << YAML::Key << "cpu_seconds_per_event" << YAML::Value << st.cpu_seconds_per_event;
    out << YAML::Key << "db_queries" << YAML::Value << st.db_queries;
    if (st.max_jobs) out << YAML::Key << "max_jobs" << YAML::Value << *st.max_jobs;
    out << YAML::Key << "mc_events_per_job" << YAML::Value << st.mc_events_per_job;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::Key << "simulation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "duration" << YAML::Value << s.duration;
  out << YAML::Key << "seed" << YAML::Value << s.rng_seed;
  out << YAML::Key << "target_file_size" << YAML::Value << s.target_file_size;
  out << YAML::EndMap;

  out << YAML::Key << "resources" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "cpu_requirement" << YAML::Value << s.cpu_requirement;
  out << YAML::Key << "centers" << YAML::Value << YAML::BeginSeq;
  for (const auto& e : s.resources) {
    out << YAML::BeginMap;
    out << YAML::Key << "center" << YAML::Value << e.center;
    out << YAML::Key << "iacs" << YAML::Value << YAML::Flow << e.iacs;
    out << YAML::Key << "cpu_allocated" << YAML::Value << e.cpu_allocated;
    if (e.cpu_total) out << YAML::Key << "cpu_total" << YAML::Value << *e.cpu_total;
    out << YAML::Key << "disk_allocated" << YAML::Value << e.disk_allocated;
    if (e.disk_total) out << YAML::Key << "disk_total" << YAML::Value << *e.disk_total;
    if (e.tape) out << YAML::Key << "tape" << YAML::Value << *e.tape;
    if (e.tape_total) out << YAML::Key << "tape_total" << YAML::Value << *e.tape_total;
    out << YAML::Key << "schedule" << YAML::Value << e.schedule;
    out << YAML::Key << "central" << YAML::Value << e.central;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace racgrid
