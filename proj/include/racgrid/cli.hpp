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

// Command implementations for the racgrid tool. Each returns the process
// exit status: 0 success, 1 validation or strict-fit failure, 2 parse or
// usage failure.

#pragma once

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "racgrid/errors.hpp"
#include "racgrid/planner.hpp"
#include "racgrid/report.hpp"
#include "racgrid/scenario.hpp"
#include "racgrid/scenario_io.hpp"
#include "racgrid/sim.hpp"

namespace racgrid::cli {

inline constexpr int kOk = 0;
inline constexpr int kInvalid = 1;
inline constexpr int kParseError = 2;

inline constexpr const char* kOutEnv = "RACGRID_OUT";
inline constexpr const char* kDefaultOut = "racgrid-out";

struct PlanOptions {
  std::uint32_t years = 0;
  std::optional<std::string> rate;  // bytes per year, units allowed ("1PB")
  std::vector<std::string> events_override;  // "TIER=N"
  bool strict = false;
  std::optional<std::string> out_dir;
};

struct SimulateOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

struct ReportOptions {
  PlanOptions plan;
  std::optional<std::uint64_t> seed;
};

/// --out wins, then the RACGRID_OUT environment variable, then the default.
inline std::filesystem::path output_dir(const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kOutEnv); env != nullptr && *env != '\0') return env;
  return kDefaultOut;
}

namespace cli_detail {

inline void write_file(const std::filesystem::path& dir, const char* name, const std::string& body) {
  std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + (dir / name).string());
  f << body;
  if (!f) throw Error("write failed: " + (dir / name).string());
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

inline std::optional<Scenario> load(const std::string& path, std::ostream& err) {
  try {
    return load_scenario(path);
  } catch (const ScenarioParseError& e) {
    err << path << ": " << e.what() << '\n';
  }
  return std::nullopt;
}

/// Structural violations plus pinned-set and tape fit at every station.
inline std::vector<std::string> violations(const Scenario& s) {
  Scenario copy = s;
  copy.topology.refresh_members();
  auto v = validate_scenario(copy);
  if (!v.empty()) return v;
  for (const auto& f : capacity_check(copy)) v.push_back(f.message());
  return v;
}

inline void print_violations(const std::string& path, const std::vector<std::string>& v,
                             std::ostream& err) {
  for (const auto& msg : v) err << path << ": " << msg << '\n';
}

}  // namespace cli_detail

inline int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  auto s = cli_detail::load(path, err);
  if (!s) return kParseError;
  const auto v = cli_detail::violations(*s);
  if (!v.empty()) {
    cli_detail::print_violations(path, v, err);
    return kInvalid;
  }
  out << path << ": ok\n";
  return kOk;
}

/// Planner bundle for an already-loaded scenario. Throws ScenarioParseError
/// for malformed flag values.
inline PlanResult make_plan(const Scenario& s, const PlanOptions& opt) {
  PlanResult p;
  p.scenario = s.name;
  p.policy = s.policy;
  p.events = scenario_event_counts(s);
  for (const auto& o : opt.events_override) {
    const auto eq = o.find('=');
    const auto tier = eq == std::string::npos ? std::nullopt : parse_tier(o.substr(0, eq));
    if (!tier) throw ScenarioParseError("--events-override expects TIER=N, got '" + o + "'", 0, 0);
    p.events[tier_index(*tier)] = io_detail::to_count(YAML::Node(o.substr(eq + 1)), "--events-override");
  }
  p.storage = storage_totals(p.events, s.policy, std::max<std::uint32_t>(1, rac_count(s.topology)));
  p.cpu = cpu_summary(s.resources, s.cpu_requirement);
  p.fit = fit_check(p.storage, s.topology, s.policy, s.resources);
  p.years = opt.years;
  if (opt.rate) p.growth_rate = io_detail::to_bytes(YAML::Node(*opt.rate), "--rate");
  if (opt.years > 0) p.projection = growth_projection(p.storage, opt.years, p.growth_rate);
  return p;
}

namespace cli_detail {

inline void write_plan_files(const std::filesystem::path& dir, const PlanResult& p) {
  write_file(dir, "storage_report.csv", render([&](std::ostream& os) { write_storage_csv(os, p.storage); }));
  if (p.years > 0) {
    write_file(dir, "storage_projection.csv",
               render([&](std::ostream& os) { write_projection_csv(os, p.projection); }));
  }
}

inline void write_sim_files(const std::filesystem::path& dir, const Simulator& sim, const Metrics& m) {
  write_file(dir, "metrics_stations.csv", render([&](std::ostream& os) { write_station_metrics_csv(os, m); }));
  write_file(dir, "metrics_links.csv", render([&](std::ostream& os) { write_link_metrics_csv(os, m); }));
  write_file(dir, "metrics_jobs.csv", render([&](std::ostream& os) { write_job_metrics_csv(os, m); }));
  write_file(dir, "catalog.dump", render([&](std::ostream& os) { sim.catalog().dump(os); }));
}

inline int plan_outcome(const PlanResult& p, bool strict, std::ostream& err) {
  if (!strict || p.fit.empty()) return kOk;
  for (const auto& v : p.fit) err << "fit: " << v << '\n';
  return kInvalid;
}

// Shared driver for plan, simulate and report.
inline int run_bundle(const std::string& path, const std::optional<PlanOptions>& plan_opt,
                      bool simulate, const std::optional<std::uint64_t>& seed,
                      const std::optional<std::string>& out_flag, std::ostream& out, std::ostream& err) {
  auto s = load(path, err);
  if (!s) return kParseError;
  if (seed) s->rng_seed = *seed;
  s->topology.refresh_members();
  if (auto v = validate_scenario(*s); !v.empty()) {
    print_violations(path, v, err);
    return kInvalid;
  }

  PlanResult plan;
  try {
    plan = make_plan(*s, plan_opt.value_or(PlanOptions{}));
  } catch (const ScenarioParseError& e) {
    err << e.what() << '\n';
    return kParseError;
  } catch (const Error& e) {
    err << path << ": " << e.what() << '\n';
    return kInvalid;
  }

  std::optional<Simulator> sim;
  Metrics metrics;
  if (simulate) {
    try {
      sim.emplace(*s);
      metrics = sim->run();
    } catch (const ValidationFailed& e) {
      print_violations(path, e.violations(), err);
      return kInvalid;
    } catch (const CapacityViolations& e) {
      print_violations(path, e.violations(), err);
      return kInvalid;
    } catch (const Error& e) {
      err << path << ": " << e.what() << '\n';
      return kInvalid;
    }
  }

  const auto dir = output_dir(out_flag);
  try {
    std::filesystem::create_directories(dir);
    write_plan_files(dir, plan);
    std::string summary;
    nlohmann::ordered_json json;
    json["scenario"] = s->name;
    json["seed"] = s->rng_seed;
    if (plan_opt || !simulate) {
      summary += plan_summary(plan);
      json["plan"] = plan_json(plan);
    } else {
      // Plain simulate still records the planner's prediction.
      json["plan"] = {{"storage", storage_json(plan.storage)}};
    }
    if (simulate) {
      write_sim_files(dir, *sim, metrics);
      if (!summary.empty()) summary += '\n';
      summary += simulation_summary(*s, metrics);
      json["metrics"] = metrics_json(metrics);
    }
    write_file(dir, "summary.txt", summary);
    write_file(dir, "report.json", json.dump(2) + "\n");
    out << summary;
    out << "wrote " << dir.string() << '\n';
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kInvalid;
  }
  return plan_opt ? plan_outcome(plan, plan_opt->strict, err) : kOk;
}

}  // namespace cli_detail

inline int cmd_plan(const std::string& path, const PlanOptions& opt, std::ostream& out,
                    std::ostream& err) {
  return cli_detail::run_bundle(path, opt, false, std::nullopt, opt.out_dir, out, err);
}

inline int cmd_simulate(const std::string& path, const SimulateOptions& opt, std::ostream& out,
                        std::ostream& err) {
  return cli_detail::run_bundle(path, std::nullopt, true, opt.seed, opt.out_dir, out, err);
}

inline int cmd_report(const std::string& path, const ReportOptions& opt, std::ostream& out,
                      std::ostream& err) {
  return cli_detail::run_bundle(path, opt.plan, true, opt.seed, opt.plan.out_dir, out, err);
}

}  // namespace racgrid::cli
