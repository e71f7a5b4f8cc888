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

#include <gtest/gtest.h>

#include <limits>
#include <set>
#include <sstream>

#include "racgrid/sim.hpp"
#include "support.hpp"

namespace racgrid {
namespace {

using testing::make_files;
using testing::star_topology;

constexpr double kInf = std::numeric_limits<double>::infinity();

Scenario base(std::size_t n_racs, std::size_t iacs = 0) {
  Scenario s;
  s.name = "sim-test";
  s.topology = star_topology(n_racs, iacs);
  return s;
}

FileRecord file_of(const std::string& id, DataTier tier, Bytes size = kGB) {
  return FileRecord{id, tier, "adhoc", size, size / event_bytes(tier), 0.0};
}

TEST(Run, EmptyWorkloadIsAllZero) {
  const Metrics m = run(base(2, 1));
  EXPECT_EQ(m.jobs_submitted, 0u);
  EXPECT_EQ(m.jobs_completed, 0u);
  EXPECT_EQ(m.transfers_completed, 0u);
  EXPECT_EQ(m.transfer_payload_bytes, 0u);
  EXPECT_EQ(m.dan_hits + m.dan_misses, 0u);
  EXPECT_EQ(m.events_processed, 0u);
  for (const auto& s : m.stations) {
    EXPECT_EQ(s.requests + s.disk_hits + s.misses + s.tape_stages + s.evictions, 0u) << s.station_id;
    EXPECT_EQ(s.occupancy_bytes + s.tape_bytes + s.jobs_run, 0u) << s.station_id;
  }
  for (const auto& l : m.links) EXPECT_EQ(l.bytes, 0u);
  for (const auto& c : m.link_classes) EXPECT_EQ(c.transfers, 0u);
}

TEST(Run, TmbJobAfterProductionNeverMisses) {
  Scenario s = base(1);
  s.datasets.push_back({"tmb", DataTier::TMB, 1'000'000, 1.0, 1});  // 10 GB
  WorkloadStream w;
  w.region_id = "r0";
  w.tier = DataTier::TMB;
  w.rate = 1.0;
  w.cpu_seconds_per_event = 1e-6;
  w.max_jobs = 1;
  s.workload.streams.push_back(w);
  const Metrics m = run(s);
  ASSERT_EQ(m.jobs_completed, 1u);
  const auto* r = m.station("R0");
  EXPECT_EQ(r->requests, 10u);
  EXPECT_EQ(r->disk_hits, 10u);
  EXPECT_EQ(r->misses, 0u);
  EXPECT_EQ(m.jobs[0].station_id, "R0");
  EXPECT_EQ(m.jobs[0].transfer, 0.0);
}

TEST(Run, SameSeedSameMetrics) {
  for (std::uint64_t seed : {3u, 11u, 29u}) {
    const Scenario s = testing::random_scenario(seed);
    Simulator a(s), b(s);
    EXPECT_EQ(a.run(), b.run()) << seed;
    std::ostringstream da, db;
    a.catalog().dump(da);
    b.catalog().dump(db);
    EXPECT_EQ(da.str(), db.str()) << seed;
  }
}

TEST(Run, CountsAddUp) {
  const Metrics m = run(testing::random_scenario(17));
  for (const auto& s : m.stations) EXPECT_EQ(s.disk_hits + s.misses, s.requests) << s.station_id;
  for (const auto& j : m.jobs) {
    EXPECT_GE(j.wait, 0.0);
    EXPECT_GE(j.transfer, 0.0);
    EXPECT_GE(j.compute, 0.0);
    EXPECT_DOUBLE_EQ(j.wait + j.transfer + j.compute, j.total);
  }
}

TEST(ProduceFile, RawStaysAtCac) {
  Scenario s = base(3);
  s.datasets.push_back({"raw", DataTier::RAW, 100 * kGB / event_bytes(DataTier::RAW), 1.0, 1});
  Simulator sim(s);
  ASSERT_EQ(sim.initial_files().size(), 100u);
  std::size_t disk = 0;
  for (const auto& f : sim.initial_files()) {
    for (const auto& t : sim.produce_file(f)) {
      EXPECT_EQ(t.station_id, "C");
      if (t.medium == Medium::Tape) {
        EXPECT_EQ(t.copy_count, 1u);
      }
      disk += t.medium == Medium::Disk;
    }
  }
  EXPECT_EQ(disk, 10u);
  EXPECT_EQ(sim.in_flight_transfers(), 0u);
  EXPECT_EQ(sim.tape("C").occupancy(), 100 * kGB);
  EXPECT_EQ(sim.disk("C").pinned_bytes(), 10 * kGB);
  for (const char* r : {"R0", "R1", "R2"}) EXPECT_EQ(sim.disk(r).occupancy(), 0u);
}

TEST(ProduceFile, TmbGoesEverywhere) {
  Simulator sim(base(3));
  const FileRecord f = file_of("t.0", DataTier::TMB);
  const auto targets = sim.produce_file(f);
  std::size_t rac_disk = 0, rac_tape = 0;
  std::uint32_t cac_tape = 0;
  for (const auto& t : targets) {
    if (t.station_id == "C") {
      if (t.medium == Medium::Tape) cac_tape += t.copy_count;
    } else if (t.medium == Medium::Disk) {
      ++rac_disk;
    } else {
      ++rac_tape;
    }
  }
  EXPECT_EQ(rac_disk, 3u);
  EXPECT_EQ(rac_tape, 3u);
  EXPECT_EQ(cac_tape, 4u);
  // CAC copies exist at once; RAC copies wait for their transfers.
  EXPECT_EQ(sim.tape("C").occupancy(), 4 * kGB);
  EXPECT_TRUE(sim.disk("C").is_pinned("t.0"));
  EXPECT_EQ(sim.in_flight_transfers(), 3u);
  EXPECT_FALSE(sim.disk("R0").contains("t.0"));
  sim.process_until(kInf);
  EXPECT_EQ(sim.in_flight_transfers(), 0u);
  for (const char* r : {"R0", "R1", "R2"}) {
    EXPECT_TRUE(sim.disk(r).is_pinned("t.0")) << r;
    EXPECT_EQ(sim.tape(r).occupancy(), kGB) << r;
  }
  // 4 CAC tape + CAC disk + 3 RAC disk + 3 RAC tape.
  EXPECT_EQ(sim.catalog().replicas("t.0").size(), 11u);
  const Metrics m = sim.metrics();
  EXPECT_EQ(m.link_classes[static_cast<std::size_t>(LinkClass::CAC_TO_RAC)].transfers, 3u);
}

TEST(ProduceFile, ZeroRowTierIsOnlyRegistered) {
  Simulator sim(base(2));
  EXPECT_TRUE(sim.produce_file(file_of("sim.0", DataTier::MC_D0SIM)).empty());
  EXPECT_TRUE(sim.catalog().contains("sim.0"));
  EXPECT_TRUE(sim.catalog().replicas("sim.0").empty());
  EXPECT_EQ(sim.in_flight_transfers(), 0u);
}

Job job_in(const std::string& region, const std::string& dataset = "") {
  Job j;
  j.job_id = 1;
  j.region_id = region;
  j.dataset_id = dataset;
  return j;
}

TEST(ScheduleJob, PinnedDatasetPicksRac) {
  Scenario s = base(1, 2);
  s.datasets.push_back({"tmb", DataTier::TMB, 500'000, 1.0, 1});
  Simulator sim(s);
  sim.run();
  EXPECT_EQ(sim.schedule_job(job_in("r0", "tmb")), "R0");
}

TEST(ScheduleJob, LocalityOutranksIdleCpu) {
  Scenario s = base(1, 2);
  s.topology.stations[1].cpu_power = 40;  // R0
  s.datasets.push_back({"raw", DataTier::RAW, 4 * kGB / event_bytes(DataTier::RAW), 1.0, 1});
  Simulator sim(s);
  sim.run();
  EXPECT_EQ(sim.schedule_job(job_in("r0", "raw")), "R0");
  // One file cached at the second institute gives it the best locality.
  sim.start_transfer(sim.initial_files()[0], "C", "R0-I1");
  sim.process_until(kInf);
  ASSERT_TRUE(sim.disk("R0-I1").is_cached(sim.initial_files()[0].file_id));
  EXPECT_EQ(sim.schedule_job(job_in("r0", "raw")), "R0-I1");
}

TEST(ScheduleJob, TieBreaksOnStationId) {
  Scenario s = base(1, 2);
  s.topology.stations[1].cpu_power = 0;  // leave the two institutes
  std::swap(s.topology.stations[2], s.topology.stations[3]);
  Simulator sim(s);
  EXPECT_EQ(sim.schedule_job(job_in("r0")), "R0-I0");
  sim.occupy_slot("R0-I0");
  EXPECT_EQ(sim.schedule_job(job_in("r0")), "R0-I1");  // more idle CPU now
}

TEST(ScheduleJob, OverflowToForeignRac) {
  Scenario s = base(2);
  s.topology.stations[0].cpu_power = 0;  // keep the CAC out of the pool
  s.topology.stations[1].cpu_power = 1;
  s.workload.opportunistic_overflow = true;
  Simulator sim(s);
  EXPECT_EQ(sim.schedule_job(job_in("r0")), "R0");
  sim.occupy_slot("R0");
  EXPECT_EQ(sim.schedule_job(job_in("r0")), "R1");

  s.workload.opportunistic_overflow = false;
  Simulator closed(s);
  closed.occupy_slot("R0");
  EXPECT_EQ(closed.schedule_job(job_in("r0")), "R0");  // queues locally
}

TEST(ScheduleJob, RegionWithoutCpu) {
  Scenario s = base(2);
  s.topology.stations[1].cpu_power = 0;
  Simulator sim(s);
  EXPECT_THROW(sim.schedule_job(job_in("r0")), NoCpuInRegion);
}

Scenario single_link() {
  Scenario s = base(1);
  s.topology.links[0].bandwidth = 100e6;
  s.topology.links[0].latency = 0.0;
  return s;
}

TEST(StartTransfer, BandwidthArithmetic) {
  Simulator sim(single_link());
  EXPECT_DOUBLE_EQ(sim.start_transfer(file_of("a", DataTier::RAW), "C", "R0"), 10.0);
}

TEST(StartTransfer, FifoOnOneLink) {
  Simulator sim(single_link());
  EXPECT_DOUBLE_EQ(sim.start_transfer(file_of("a", DataTier::RAW), "C", "R0"), 10.0);
  EXPECT_DOUBLE_EQ(sim.start_transfer(file_of("b", DataTier::RAW), "C", "R0"), 20.0);
  sim.process_until(15.0);
  EXPECT_TRUE(sim.disk("R0").is_cached("a"));
  EXPECT_FALSE(sim.disk("R0").contains("b"));
  sim.process_until(kInf);
  EXPECT_DOUBLE_EQ(sim.now(), 20.0);
  const Metrics m = sim.metrics();
  EXPECT_EQ(m.links[0].transfers, 2u);
  EXPECT_EQ(m.links[0].bytes, 2 * kGB);
}

TEST(StartTransfer, LatencyAndHopsAddUp) {
  Scenario s = base(2);
  s.topology.links[0].latency = 0.5;  // C-R0 at 1 GB/s
  s.topology.links[1].latency = 0.25;
  Simulator sim(s);
  // R0 -> C -> R1: two 1 s hops plus both latencies.
  EXPECT_DOUBLE_EQ(sim.start_transfer(file_of("a", DataTier::RAW), "R0", "R1"), 2.75);
  sim.process_until(kInf);
  EXPECT_EQ(sim.metrics().transfer_hop_bytes, 2 * kGB);
}

TEST(StartTransfer, SelfTransferIsFree) {
  Simulator sim(single_link());
  EXPECT_DOUBLE_EQ(sim.start_transfer(file_of("a", DataTier::RAW), "R0", "R0"), 0.0);
  sim.process_until(kInf);
  const Metrics m = sim.metrics();
  EXPECT_EQ(m.transfers_completed, 0u);
  EXPECT_EQ(m.links[0].bytes, 0u);
}

TEST(StartTransfer, UnknownStation) {
  Simulator sim(single_link());
  EXPECT_THROW(sim.start_transfer(file_of("a", DataTier::RAW), "C", "nowhere"), UnknownStation);
}

TEST(PinnedFit, RefusesThenAcceptsAtShortfall) {
  Scenario s = base(2);
  s.datasets.push_back({"tmb", DataTier::TMB, 2'000'000, 1.0, 1});  // 20 GB
  s.datasets.push_back({"dst", DataTier::DST, 200'000, 1.0, 1});    // 30 GB
  const auto files = scenario_files(s);
  const auto plan = plan_placement(files, s.policy, s.topology);
  const auto req = station_requirements(s, files, plan);
  const Bytes need = required_disk(req.at("R1").pinned, s.policy.on_demand_min_fraction);
  s.topology.stations[2].disk_capacity = need - 3 * kGB;
  EXPECT_THROW(Simulator{s}, CapacityViolations);
  s.topology.stations[2].disk_capacity += 3 * kGB;
  EXPECT_NO_THROW(Simulator{s});
  s.topology.stations[2].disk_capacity -= 1;
  EXPECT_THROW(Simulator{s}, PinnedOverflow);
}

TEST(Run, InvalidScenarioCarriesViolations) {
  Scenario s = base(1);
  s.duration = -1;
  try {
    Simulator sim(s);
    FAIL();
  } catch (const ValidationFailed& e) {
    ASSERT_EQ(e.violations().size(), 1u);
  }
}

TEST(Run, CausalityAndConservation) {
  for (std::uint64_t seed = 100; seed < 106; ++seed) {
    const Scenario s = testing::random_scenario(seed);
    double last = 0.0;
    bool ordered = true, within = true;
    std::set<std::string> pinned_evicted;
    const Simulator* self = nullptr;
    SimObserver obs;
    obs.after_event = [&](const SimEvent& ev, const Simulator& sim) {
      ordered = ordered && ev.time >= last && sim.now() == ev.time;
      last = ev.time;
      for (const auto& st : sim.scenario().topology.stations) {
        within = within && sim.disk(st.station_id).occupancy() <= st.disk_capacity;
      }
    };
    obs.on_evict = [&](const std::string& station, const std::string& file) {
      if (self != nullptr && self->disk(station).is_pinned(file)) pinned_evicted.insert(file);
    };
    Simulator sim(s, obs);
    self = &sim;
    const Metrics m = sim.run();
    EXPECT_TRUE(ordered) << seed;
    EXPECT_TRUE(within) << seed;
    EXPECT_TRUE(pinned_evicted.empty()) << seed;
    Bytes link_total = 0;
    for (const auto& l : m.links) link_total += l.bytes;
    Bytes class_total = 0;
    for (const auto& c : m.link_classes) class_total += c.bytes;
    EXPECT_EQ(link_total, m.transfer_hop_bytes) << seed;
    EXPECT_EQ(class_total, m.transfer_hop_bytes) << seed;
    for (const auto& [id, b] : m.production_pinned) {
      EXPECT_EQ(b, station_requirements(s, sim.initial_files(), sim.plan()).at(id).pinned) << id;
    }
  }
}

TEST(Run, McOutputReachesCacTape) {
  Scenario s = base(1);
  s.datasets.push_back({"tmb", DataTier::TMB, 100'000, 1.0, 1});
  WorkloadStream mc;
  mc.region_id = "r0";
  mc.kind = JobKind::McProduction;
  mc.tier = DataTier::MC_TMB;
  mc.rate = 0.01;
  mc.cpu_seconds_per_event = 0.01;
  mc.mc_events_per_job = 1000;
  mc.max_jobs = 3;
  s.workload.streams.push_back(mc);
  Simulator sim(s);
  const Metrics m = sim.run();
  ASSERT_EQ(m.jobs_completed, 3u);
  for (const auto& j : m.jobs) {
    const auto reps = sim.catalog().replicas("mc." + std::to_string(j.job_id));
    ASSERT_EQ(reps.size(), 1u);
    EXPECT_EQ(reps[0].station_id, "C");
    EXPECT_EQ(reps[0].medium, Medium::Tape);
  }
}

}  // namespace
}  // namespace racgrid
