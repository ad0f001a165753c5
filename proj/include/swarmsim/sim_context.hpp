#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "swarmsim/environment.hpp"
#include "swarmsim/kernel.hpp"
#include "swarmsim/metrics.hpp"
#include "swarmsim/models.hpp"
#include "swarmsim/rng.hpp"
#include "swarmsim/scenario.hpp"
#include "swarmsim/taskpool.hpp"

namespace swarmsim {

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

enum class TraceLevel : std::uint8_t { Off, Transitions, Events };

enum class TraceKind : std::uint8_t { Event, Transition, Claim, Debit };

struct TraceEntry {
    TraceKind kind = TraceKind::Event;
    SimTime time = 0.0;
    std::uint64_t seq = 0;  // kernel seq for events, transition version otherwise
    EventKind event = EventKind::GeneratorTick;
    MsgTag tag = MsgTag::None;
    StatusTag from = StatusTag::Pending;
    StatusTag to = StatusTag::Pending;
    bool flag = false;  // Claim: won; Transition: run-end sweep
    DroneId drone = 0;
    TaskId task = 0;
    double value = 0.0;  // Debit: joules
};

struct Trace {
    TraceLevel level = TraceLevel::Transitions;
    std::vector<TraceEntry> entries;

    bool wants_transitions() const { return level != TraceLevel::Off; }
    bool wants_events() const { return level == TraceLevel::Events; }
};

inline std::string serialize(const TraceEntry& e) {
    switch (e.kind) {
        case TraceKind::Event:
            return fmt::format("ev,{:.9f},{},{},{},{},{}", e.time, e.seq, to_string(e.event),
                               to_string(e.tag), e.drone, e.task);
        case TraceKind::Transition:
            return fmt::format("tr,{:.9f},{},{},{},{},{}{}", e.time, e.task, to_string(e.from),
                               to_string(e.to), e.seq, e.drone, e.flag ? ",run_end" : "");
        case TraceKind::Claim:
            return fmt::format("claim,{:.9f},{},{},{}", e.time, e.task, e.drone,
                               e.flag ? "won" : "lost");
        case TraceKind::Debit:
            return fmt::format("debit,{:.9f},{},{},{:.9f}", e.time, e.task, e.drone, e.value);
    }
    return {};
}

inline std::string serialize(const Trace& t) {
    std::string out;
    for (const auto& e : t.entries) {
        out += serialize(e);
        out += '\n';
    }
    return out;
}

/// Raised by run() when an invariant breaks mid-run; carries the trace up to
/// the failure.
class RunAborted : public std::runtime_error {
public:
    RunAborted(const std::string& what, Trace prefix)
        : std::runtime_error(what), trace(std::move(prefix)) {}
    Trace trace;
};

// ---------------------------------------------------------------------------
// Observation hooks (test instrumentation; never alter the run)
// ---------------------------------------------------------------------------

struct CentralSelection {
    SimTime time = 0.0;
    const TaskSpec* task = nullptr;
    std::span<const DroneState> fleet;
    std::optional<DroneId> chosen;
    std::size_t agent = 0;
};

struct DistributedPick {
    SimTime time = 0.0;
    const DroneState* drone = nullptr;
    std::vector<PendingView> snapshot;
    std::optional<TaskId> chosen;
};

struct Observer {
    std::function<void(const CentralSelection&)> on_central_select;
    std::function<void(const DistributedPick&)> on_distributed_pick;
};

// ---------------------------------------------------------------------------
// Per-drone runtime bookkeeping
// ---------------------------------------------------------------------------

enum class Stage : std::uint8_t { None, AwaitAssignment, Traveling, Executing, Reporting };

enum class AgentPhase : std::uint8_t {
    Idle,
    Fetching,
    Claiming,
    Traveling,
    Executing,
    Reporting,
};

inline std::string_view to_string(AgentPhase p) {
    switch (p) {
        case AgentPhase::Idle: return "Idle";
        case AgentPhase::Fetching: return "Fetching";
        case AgentPhase::Claiming: return "Claiming";
        case AgentPhase::Traveling: return "Traveling";
        case AgentPhase::Executing: return "Executing";
        case AgentPhase::Reporting: return "Reporting";
    }
    return "?";
}

struct ParkedMessage {
    SimEvent event;
    bool unsent = false;  // still needs its network hop once the drone is back
};

struct DroneRuntime {
    std::optional<TaskId> task;
    std::uint64_t task_epoch = 0;      // bumps whenever the drone's task binding changes
    std::uint64_t activity_epoch = 0;  // bumps when travel/exec events are cancelled
    std::uint64_t conn_epoch = 0;      // bumps on every disconnect
    bool lost = false;
    Stage stage = Stage::None;
    SimTime stage_end = 0.0;
    double exec_remaining = 0.0;
    bool exec_stalled = false;
    double assigned_cost = 0.0;
    SimTime ready_since = 0.0;
    std::vector<ParkedMessage> parked;

    // distributed agent
    AgentPhase phase = AgentPhase::Idle;
    std::uint32_t retry_count = 0;
    std::vector<std::pair<TaskId, std::uint64_t>> snapshot;
};

struct BatteryDebit {
    DroneId drone = 0;
    TaskId task = 0;
    double cost = 0.0;
    double level_after = 0.0;
};

// ---------------------------------------------------------------------------
// Context shared by the engine and the controllers
// ---------------------------------------------------------------------------

struct SimContext {
    SimContext(const Scenario& s, TraceLevel level, Observer obs)
        : scenario(s),
          rng(s.seed),
          net(s.network, s.net_latency_multiplier),
          workload(s, rng.obstacle_seed),
          observer(std::move(obs)) {
        trace.level = level;
        fleet = generate_fleet(s, rng);
        runtime.resize(fleet.size());
        pool.set_listener([this](const Transition& t) { on_transition(t); });
    }

    const Scenario& scenario;
    RngStreams rng;
    NetworkModel net;
    WorkloadGenerator workload;
    Observer observer;
    Kernel kernel;
    TaskPool pool;
    Trace trace;
    std::vector<DroneState> fleet;
    std::vector<DroneRuntime> runtime;
    std::vector<TaskRecord> records;
    std::vector<BatteryDebit> debits;

    SimTime now() const { return kernel.now(); }
    ExecutionSite site() const { return scenario.execution_site; }
    const ModelParams& params() const { return scenario.model_params; }

    TaskRecord& record(TaskId id) {
        if (id >= records.size()) throw InvariantViolation("no record for task " + std::to_string(id));
        return records[id];
    }

    void add_task(const TaskSpec& t) {
        if (t.id != records.size())
            throw InvariantViolation("task ids must be dense; got " + std::to_string(t.id));
        TaskRecord r;
        r.id = t.id;
        r.kind = t.kind;
        r.arrival_time = t.arrival_time;
        records.push_back(std::move(r));
    }

    void on_transition(const Transition& t) {
        if (!trace.wants_transitions()) return;
        TraceEntry e;
        e.kind = TraceKind::Transition;
        e.time = t.time;
        e.seq = t.version;
        e.from = t.from;
        e.to = t.to;
        e.task = t.task;
        e.drone = t.drone;
        e.flag = t.run_end;
        trace.entries.push_back(e);
    }

    void trace_claim(SimTime time, TaskId task, DroneId drone, bool won) {
        if (!trace.wants_transitions()) return;
        TraceEntry e;
        e.kind = TraceKind::Claim;
        e.time = time;
        e.task = task;
        e.drone = drone;
        e.flag = won;
        trace.entries.push_back(e);
    }

    void trace_event(const SimEvent& ev) {
        if (!trace.wants_events()) return;
        TraceEntry e;
        e.kind = TraceKind::Event;
        e.time = ev.time;
        e.seq = ev.seq;
        e.event = ev.kind;
        e.tag = ev.tag;
        e.drone = ev.drone;
        e.task = ev.task;
        trace.entries.push_back(e);
    }

    bool connected(DroneId d) const { return fleet[d].connected(); }

    /// One-way message between drone `d` and the cloud. A disconnected drone
    /// can neither send nor receive: the message waits for the reconnect.
    void send(SimEvent msg) {
        msg.kind = EventKind::MessageArrive;
        if (!connected(msg.drone)) {
            runtime[msg.drone].parked.push_back({msg, true});
            return;
        }
        msg.time = now() + net.sample_one_way(rng.network);
        kernel.schedule(msg);
    }

    /// Called on arrival; returns false when the message was parked instead.
    bool deliverable(const SimEvent& msg) {
        if (connected(msg.drone)) return true;
        runtime[msg.drone].parked.push_back({msg, false});
        return false;
    }

    void release_parked(DroneId d) {
        auto parked = std::move(runtime[d].parked);
        runtime[d].parked.clear();
        for (auto& p : parked) {
            if (p.unsent) {
                send(p.event);
            } else {
                SimEvent ev = p.event;
                ev.time = now();
                kernel.schedule(ev);
            }
        }
    }

    /// Record the moment drone `d` learns it holds `task`.
    void note_assignment(TaskId task, DroneId d) {
        TaskRecord& r = record(task);
        const SimTime t = now();
        if (!r.first_assign_time) {
            r.first_assign_time = t;
            r.eligible_time = std::max(r.arrival_time, runtime[d].ready_since);
        }
        if (r.orphaned_since) {
            r.reschedule_wait += t - *r.orphaned_since;
            r.orphaned_since.reset();
        }
        r.final_assign_time = t;
        r.exec_start.reset();
        r.assigned_drones.push_back(d);
    }

    /// Binds `task` to drone `d` at the pool's claim instant.
    void bind(DroneId d, TaskId task) {
        DroneRuntime& rt = runtime[d];
        if (rt.task)
            throw InvariantViolation("drone " + std::to_string(d) + " already holds task " +
                                     std::to_string(*rt.task));
        rt.task = task;
        ++rt.task_epoch;
        rt.stage = Stage::AwaitAssignment;
        rt.assigned_cost = battery_cost(fleet[d], pool.spec_of(task), site(), params());
        fleet[d].status = Busy{task};
    }

    /// Assignment delivered to the drone: start flying.
    void start_travel(DroneId d, TaskId task) {
        DroneRuntime& rt = runtime[d];
        const TaskSpec& spec = pool.spec_of(task);
        rt.stage = Stage::Traveling;
        rt.stage_end = now() + travel_time(fleet[d].position, spec.location, fleet[d].speed);
        SimEvent ev;
        ev.time = rt.stage_end;
        ev.kind = EventKind::TravelDone;
        ev.drone = d;
        ev.task = task;
        ev.epoch = rt.activity_epoch;
        kernel.schedule(ev);
    }

    /// Arrived on site: the compute part begins. Cloud execution needs the
    /// link, so it does not progress while the drone is unreachable.
    void start_exec(DroneId d, TaskId task) {
        DroneRuntime& rt = runtime[d];
        const TaskSpec& spec = pool.spec_of(task);
        fleet[d].position = spec.location;
        pool.start_execution(task, d, now());
        record(task).exec_start = now();
        rt.stage = Stage::Executing;
        const double dur = exec_time(spec, site(), fleet[d], params());
        if (site() != ExecutionSite::Edge && !connected(d)) {
            rt.exec_stalled = true;
            rt.exec_remaining = dur;
            return;
        }
        schedule_exec_done(d, task, now() + dur);
    }

    void schedule_exec_done(DroneId d, TaskId task, SimTime at) {
        DroneRuntime& rt = runtime[d];
        rt.stage_end = at;
        rt.exec_stalled = false;
        SimEvent ev;
        ev.time = at;
        ev.kind = EventKind::ExecDone;
        ev.drone = d;
        ev.task = task;
        ev.epoch = rt.activity_epoch;
        kernel.schedule(ev);
    }

    /// Work finished on the drone; the drone is free from now on and reports.
    void finish_exec(DroneId d, TaskId task) {
        DroneRuntime& rt = runtime[d];
        rt.stage = Stage::Reporting;
        rt.ready_since = now();
        SimEvent msg;
        msg.tag = MsgTag::Report;
        msg.drone = d;
        msg.task = task;
        msg.epoch = rt.task_epoch;
        send(msg);
    }

    /// Report reached the cloud: close the task, debit the battery, free the drone.
    void complete_task(DroneId d, TaskId task) {
        DroneRuntime& rt = runtime[d];
        pool.complete(task, d, now());
        TaskRecord& r = record(task);
        r.completion_time = now();
        r.outcome = Outcome::Completed;
        DroneState& drone = fleet[d];
        drone.battery_level -= rt.assigned_cost;
        if (drone.battery_level < 0.0) {
            if (drone.battery_level < -1e-6)
                throw InvariantViolation("battery of drone " + std::to_string(d) + " below zero");
            drone.battery_level = 0.0;
        }
        debits.push_back({d, task, rt.assigned_cost, drone.battery_level});
        if (trace.wants_transitions()) {
            TraceEntry e;
            e.kind = TraceKind::Debit;
            e.time = now();
            e.task = task;
            e.drone = d;
            e.value = rt.assigned_cost;
            trace.entries.push_back(e);
        }
        rt.task.reset();
        ++rt.task_epoch;
        rt.stage = Stage::None;
        drone.status = Idle{};
    }

    /// Drops the drone's task binding without completing it (requeue path).
    void abandon_task(DroneId d) {
        DroneRuntime& rt = runtime[d];
        rt.task.reset();
        ++rt.task_epoch;
        ++rt.activity_epoch;
        rt.stage = Stage::None;
        rt.exec_stalled = false;
        if (auto* dis = std::get_if<Disconnected>(&fleet[d].status))
            dis->saved = Idle{};
        else
            fleet[d].status = Idle{};
    }

    std::vector<TaskSpec> top_up() {
        auto added = workload.tick(pool, rng.workload, now());
        for (const auto& t : added) add_task(t);
        return added;
    }
};

}  // namespace swarmsim
