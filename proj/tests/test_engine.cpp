#include <gtest/gtest.h>

#include <map>

#include "swarmsim/engine.hpp"

using namespace swarmsim;

namespace {

Scenario small(ControllerMode mode, std::size_t fleet = 12, double duration = 600.0) {
    Scenario s;
    s.controller_mode = mode;
    s.fleet_size = fleet;
    s.duration = duration;
    return s;
}

std::vector<std::pair<SimTime, DroneId>> failure_schedule(const RunResult& r) {
    std::vector<std::pair<SimTime, DroneId>> out;
    for (const auto& e : r.trace.entries)
        if (e.kind == TraceKind::Event &&
            (e.event == EventKind::Disconnect || e.event == EventKind::Reconnect))
            out.emplace_back(e.time, e.drone);
    return out;
}

}  // namespace

TEST(Run, ZeroDurationClosesSeededTasks) {
    Scenario s = small(ControllerMode::Centralized);
    s.duration = 0.0;
    const auto r = run(s, {TraceLevel::Events, {}});
    for (const auto& e : r.trace.entries) EXPECT_NE(e.kind, TraceKind::Event);
    ASSERT_EQ(r.records.size(), s.effective_backlog_target());
    for (const auto& rec : r.records) {
        EXPECT_EQ(rec.outcome, Outcome::Incomplete);
        EXPECT_EQ(rec.reason, IncompleteReason::RunEnd);
    }
}

TEST(Run, RejectsInvalidScenario) {
    Scenario s;
    s.fleet_size = 0;
    s.failures.fraction = 2.0;
    try {
        run(s);
        FAIL() << "expected InvalidScenario";
    } catch (const InvalidScenario& e) {
        EXPECT_EQ(e.violations.size(), 2u);
    }
}

TEST(Run, SameScenarioSameTrace) {
    for (auto mode : {ControllerMode::Centralized, ControllerMode::Distributed}) {
        Scenario s = small(mode, 40, 200.0);
        s.heterogeneity.enabled = true;
        s.failures.enabled = true;
        const auto a = run(s, {TraceLevel::Events, {}});
        const auto b = run(s, {TraceLevel::Events, {}});
        EXPECT_EQ(serialize(a.trace), serialize(b.trace));
    }
}

TEST(Run, DifferentSeedDifferentTrace) {
    Scenario s = small(ControllerMode::Distributed, 20, 100.0);
    const auto a = run(s);
    s.seed = 2;
    const auto b = run(s);
    EXPECT_NE(serialize(a.trace), serialize(b.trace));
}

TEST(Run, SmallCalmFleetFinishesWhatItStarts) {
    for (auto mode : {ControllerMode::Centralized, ControllerMode::Distributed}) {
        const auto r = run(small(mode), {TraceLevel::Off, {}});
        EXPECT_GT(r.metrics.completed, 50u);
        // only work caught in flight at the horizon stays open, at most one task per drone
        EXPECT_LE(r.metrics.incomplete_started, 12u);
        for (const auto& rec : r.records)
            if (rec.outcome == Outcome::Incomplete) {
                EXPECT_NE(rec.reason, IncompleteReason::HolderLost);
            }
    }
}

TEST(Run, EveryTaskEndsInExactlyOneState) {
    Scenario s = small(ControllerMode::Centralized, 60, 300.0);
    s.heterogeneity.enabled = true;
    s.failures.enabled = true;
    const auto r = run(s, {TraceLevel::Off, {}});
    std::size_t completed = 0, incomplete = 0;
    for (const auto& rec : r.records) {
        EXPECT_NE(rec.outcome, Outcome::Open);
        EXPECT_EQ(rec.outcome == Outcome::Completed, rec.completion_time.has_value());
        (rec.outcome == Outcome::Completed ? completed : incomplete)++;
    }
    EXPECT_EQ(completed + incomplete, r.records.size());
    EXPECT_EQ(r.metrics.completed + r.metrics.incomplete_started + r.metrics.residual_pending,
              r.metrics.total_tasks);
}

TEST(Run, BatteryIsConserved) {
    for (auto mode : {ControllerMode::Centralized, ControllerMode::Distributed}) {
        Scenario s = small(mode, 30, 400.0);
        s.heterogeneity.enabled = true;
        const auto r = run(s, {TraceLevel::Off, {}});
        std::vector<double> spent(s.fleet_size, 0.0);
        for (const auto& d : r.debits) {
            spent[d.drone] += d.cost;
            EXPECT_GE(d.level_after, 0.0);
        }
        for (std::size_t i = 0; i < s.fleet_size; ++i)
            EXPECT_NEAR(r.initial_fleet[i].battery_level - spent[i], r.final_fleet[i].battery_level, 1e-6);
    }
}

TEST(Run, TimestampsFollowTaskLifecycle) {
    Scenario s = small(ControllerMode::Distributed, 40, 300.0);
    s.failures.enabled = true;
    const auto r = run(s, {TraceLevel::Off, {}});
    for (const auto& rec : r.records) {
        if (!rec.first_assign_time) continue;
        EXPECT_LE(rec.arrival_time, *rec.eligible_time);
        EXPECT_LE(*rec.eligible_time, *rec.first_assign_time);
        EXPECT_LE(*rec.first_assign_time, *rec.final_assign_time);
        if (rec.exec_start) {
            EXPECT_LE(*rec.final_assign_time, *rec.exec_start);
        }
        if (rec.completion_time) {
            EXPECT_LE(*rec.exec_start, *rec.completion_time);
        }
    }
}

TEST(Run, ObstacleProbabilityDoesNotMoveFailures) {
    Scenario a = small(ControllerMode::Centralized, 50, 300.0);
    a.failures.enabled = true;
    Scenario b = a;
    b.workload.obstacle_prob = 0.9;
    const auto ra = run(a, {TraceLevel::Events, {}});
    const auto rb = run(b, {TraceLevel::Events, {}});
    const auto fa = failure_schedule(ra);
    EXPECT_FALSE(fa.empty());
    EXPECT_EQ(fa, failure_schedule(rb));
}

TEST(Run, ObstacleChildrenFollowRecognitions) {
    Scenario s = small(ControllerMode::Centralized, 12, 600.0);
    s.workload.obstacle_prob = 0.0;
    const auto r = run(s, {TraceLevel::Off, {}});
    for (const auto& rec : r.records) EXPECT_NE(rec.kind, TaskKind::ObstacleAvoidance);
}

TEST(Run, TraceVerbosityChangesNothingSimulated) {
    Scenario s = small(ControllerMode::Distributed, 40, 300.0);
    s.failures.enabled = true;
    s.heterogeneity.enabled = true;
    const auto quiet = run(s, {TraceLevel::Off, {}});
    const auto loud = run(s, {TraceLevel::Events, {}});
    EXPECT_TRUE(quiet.trace.entries.empty());
    ASSERT_EQ(quiet.records.size(), loud.records.size());
    for (std::size_t i = 0; i < quiet.records.size(); ++i) {
        EXPECT_EQ(quiet.records[i].first_assign_time, loud.records[i].first_assign_time);
        EXPECT_EQ(quiet.records[i].completion_time, loud.records[i].completion_time);
    }
    EXPECT_EQ(quiet.events_processed, loud.events_processed);
}

TEST(Run, SameOutagesRequeueCentrallyButStrandDistributed) {
    Scenario c = small(ControllerMode::Centralized, 100, 300.0);
    c.failures.enabled = true;
    c.failures.permanent_prob = 1.0;
    Scenario d = c;
    d.controller_mode = ControllerMode::Distributed;
    const auto rc = run(c, {TraceLevel::Events, {}});
    const auto rd = run(d, {TraceLevel::Events, {}});
    EXPECT_EQ(failure_schedule(rc), failure_schedule(rd));
    EXPECT_GT(rc.metrics.requeues, 0u);
    EXPECT_EQ(rc.metrics.incomplete_by_reason.count("holder_lost"), 0u);
    EXPECT_EQ(rd.metrics.requeues, 0u);
    EXPECT_GT(rd.metrics.incomplete_by_reason.at("holder_lost"), 0u);
}

TEST(Run, DisconnectedEdgeDroneKeepsComputingButCannotReport) {
    Scenario s = small(ControllerMode::Distributed, 30, 300.0);
    s.failures.enabled = true;
    s.failures.permanent_prob = 0.0;
    s.failures.outage_duration = 20.0;
    const auto r = run(s, {TraceLevel::Events, {}});
    std::map<DroneId, std::vector<std::pair<SimTime, SimTime>>> outages;
    std::map<DroneId, SimTime> open;
    for (const auto& e : r.trace.entries) {
        if (e.kind != TraceKind::Event) continue;
        if (e.event == EventKind::Disconnect) open[e.drone] = e.time;
        if (e.event == EventKind::Reconnect) outages[e.drone].push_back({open[e.drone], e.time});
    }
    std::size_t computed_offline = 0;
    for (const auto& e : r.trace.entries) {
        if (e.kind != TraceKind::Event || e.event != EventKind::ExecDone) continue;
        for (auto [down, up] : outages[e.drone])
            if (e.time > down && e.time < up) ++computed_offline;
    }
    EXPECT_GT(computed_offline, 0u);
    // a completion is never recorded while its drone is unreachable
    for (const auto& rec : r.records) {
        if (!rec.completion_time) continue;
        const DroneId d = rec.assigned_drones.back();
        for (auto [down, up] : outages[d])
            EXPECT_FALSE(*rec.completion_time > down && *rec.completion_time < up);
    }
}

namespace {

// Completed tasks whose duration on site undercuts nominal work plus the outage overlap.
std::size_t outrun_outages(ExecutionSite site) {
    Scenario s = small(ControllerMode::Distributed, 30, 300.0);
    s.execution_site = site;
    s.failures.enabled = true;
    s.failures.permanent_prob = 0.0;
    s.failures.outage_duration = 20.0;
    const auto r = run(s, {TraceLevel::Events, {}});
    std::map<DroneId, std::vector<std::pair<SimTime, SimTime>>> outages;
    std::map<DroneId, SimTime> open;
    for (const auto& e : r.trace.entries) {
        if (e.kind != TraceKind::Event) continue;
        if (e.event == EventKind::Disconnect) open[e.drone] = e.time;
        if (e.event == EventKind::Reconnect) outages[e.drone].push_back({open[e.drone], e.time});
    }
    std::size_t outran = 0;
    for (const auto& rec : r.records) {
        if (!rec.completion_time) continue;
        TaskSpec spec;
        spec.kind = rec.kind;
        spec.compute_work = at(s.model_params.kind_work, rec.kind);
        spec.payload_bytes = at(s.model_params.payload_bytes_by_kind, rec.kind);
        const auto& drone = r.initial_fleet[rec.assigned_drones.back()];
        const double nominal = exec_time(spec, site, drone, s.model_params);
        double overlap = 0.0;
        for (auto [down, up] : outages[rec.assigned_drones.back()])
            overlap += std::max(0.0, std::min(up, *rec.completion_time) - std::max(down, *rec.exec_start));
        // slack covers a report caught mid-flight by a disconnect
        if (*rec.completion_time - *rec.exec_start < nominal + overlap - 0.1) ++outran;
    }
    return outran;
}

}  // namespace

TEST(Run, CloudExecutionStallsWhileUnreachable) {
    EXPECT_EQ(outrun_outages(ExecutionSite::CloudNative), 0u);
    EXPECT_GT(outrun_outages(ExecutionSite::Edge), 0u);
}
