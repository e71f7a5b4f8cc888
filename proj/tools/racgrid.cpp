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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "racgrid/cli.hpp"

namespace {

void add_plan_flags(CLI::App* cmd, racgrid::cli::PlanOptions& opt) {
  cmd->add_option("--years", opt.years, "Growth projection horizon in years");
  cmd->add_option("--rate", opt.rate, "CAC tape growth per year, e.g. 1PB");
  cmd->add_option("--events-override", opt.events_override, "Replace a tier's event count (TIER=N)")
      ->take_all();
  cmd->add_flag("--strict", opt.strict, "Exit 1 when any fit check fails");
  cmd->add_option("--out", opt.out_dir, "Output directory (default $RACGRID_OUT or racgrid-out)");
}

}  // namespace

int main(int argc, char** argv) {
  namespace rc = racgrid::cli;
  CLI::App app{"racgrid: regional analysis grid planner and simulator"};
  app.require_subcommand(1);

  std::string path;

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario", path, "Scenario file")->required();

  rc::PlanOptions plan_opt;
  auto* plan = app.add_subcommand("plan", "Storage and CPU planning report");
  plan->add_option("scenario", path, "Scenario file")->required();
  add_plan_flags(plan, plan_opt);

  rc::SimulateOptions sim_opt;
  auto* simulate = app.add_subcommand("simulate", "Run the discrete-event simulation");
  simulate->add_option("scenario", path, "Scenario file")->required();
  simulate->add_option("--seed", sim_opt.seed, "Override the scenario seed");
  simulate->add_option("--out", sim_opt.out_dir, "Output directory (default $RACGRID_OUT or racgrid-out)");

  rc::ReportOptions rep_opt;
  auto* report = app.add_subcommand("report", "Plan and simulate into one bundle");
  report->add_option("scenario", path, "Scenario file")->required();
  add_plan_flags(report, rep_opt.plan);
  report->add_option("--seed", rep_opt.seed, "Override the scenario seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rc::kOk : rc::kParseError;
  }

  try {
    if (*validate) return rc::cmd_validate(path, std::cout, std::cerr);
    if (*plan) return rc::cmd_plan(path, plan_opt, std::cout, std::cerr);
    if (*simulate) return rc::cmd_simulate(path, sim_opt, std::cout, std::cerr);
    if (*report) return rc::cmd_report(path, rep_opt, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rc::kInvalid;
  }
  return rc::kParseError;
}
