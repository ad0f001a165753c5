#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "swarmsim/models.hpp"
#include "swarmsim/sim_context.hpp"

namespace swarmsim {

/// Least battery cost among feasible drones; ties go to the nearer drone,
/// then to the smaller id. Busy or unreachable drones are never candidates.
inline std::optional<DroneId> select_drone(const TaskSpec& task, std::span<const DroneState> fleet,
                                           ExecutionSite site, const ModelParams& p) {
    std::optional<DroneId> best;
    double best_cost = std::numeric_limits<double>::infinity();
    double best_dist = std::numeric_limits<double>::infinity();
    for (const DroneState& d : fleet) {
        if (!feasible(d, task, site, p)) continue;
        const double cost = battery_cost(d, task, site, p);
        const double dist = distance(d.position, task.location);
        const bool better = cost < best_cost || (cost == best_cost && dist < best_dist) ||
                            (cost == best_cost && dist == best_dist && best && d.id < *best);
        if (!best || better) {
            best = d.id;
            best_cost = cost;
            best_dist = dist;
        }
    }
    return best;
}

/// Same policy restricted to the drones listed in `candidates`.
inline std::optional<DroneId> select_drone_among(const TaskSpec& task,
                                                 std::span<const DroneState> fleet,
                                                 const std::set<DroneId>& candidates,
                                                 ExecutionSite site, const ModelParams& p) {
    std::optional<DroneId> best;
    double best_cost = std::numeric_limits<double>::infinity();
    double best_dist = std::numeric_limits<double>::infinity();
    for (DroneId id : candidates) {  // ascending id: strict comparisons keep the smaller id
        const DroneState& d = fleet[id];
        if (!feasible(d, task, site, p)) continue;
        const double cost = battery_cost(d, task, site, p);
        const double dist = distance(d.position, task.location);
        if (!best || cost < best_cost || (cost == best_cost && dist < best_dist)) {
            best = id;
            best_cost = cost;
            best_dist = dist;
        }
    }
    return best;
}

struct ServiceTimeModel {
    double per_drone_scan_cost = 54e-6;
    std::size_t fleet_size = 0;

    double scan() const { return per_drone_scan_cost * static_cast<double>(fleet_size); }
    /// Controller time for one dispatch whose mission takes `rtt` round trip.
    double service(double rtt) const { return scan() + 0.5 * rtt; }
};

/// Push controller: `agent_count` serialized scheduling agents over one shared
/// fleet view and one task pool.
class CentralController {
public:
    explicit CentralController(SimContext& ctx)
        : ctx_(ctx),
          service_{ctx.scenario.central.per_drone_scan_cost, ctx.fleet.size()},
          agents_(ctx.scenario.scheduler_agents) {
        for (const auto& d : ctx.fleet) idle_.insert(d.id);
    }

    /// Busy time is kept in whole nanoseconds so that network + compute == total exactly.
    std::int64_t busy_ns_network() const { return busy_network_; }
    std::int64_t busy_ns_compute() const { return busy_compute_; }
    std::int64_t busy_ns_total() const { return busy_total_; }
    double busy_time_network() const { return static_cast<double>(busy_network_) * 1e-9; }
    double busy_time_compute() const { return static_cast<double>(busy_compute_) * 1e-9; }
    double busy_time_total() const { return static_cast<double>(busy_total_) * 1e-9; }
    std::size_t dispatches() const { return dispatches_; }
    const ServiceTimeModel& service_model() const { return service_; }

    void start() { wake_idle_agents(); }

    // --- triggers ----------------------------------------------------------

    void on_tasks_added() { wake_idle_agents(); }

    /// A skipped task is examined again once some drone that could serve it
    /// turns idle.
    void on_drone_available(DroneId d) {
        const DroneState& drone = ctx_.fleet[d];
        if (!drone.idle() || ctx_.runtime[d].lost) return;
        idle_.insert(d);
        std::erase_if(blocked_, [&](TaskId t) {
            return feasible(drone, ctx_.pool.spec_of(t), ctx_.site(), ctx_.params());
        });
        wake_idle_agents();
    }

    void on_disconnect(DroneId d) {
        idle_.erase(d);
        const DroneRuntime& rt = ctx_.runtime[d];
        if (!rt.task) return;
        SimEvent ev;
        ev.time = ctx_.now() + ctx_.scenario.failures.detect_timeout;
        ev.kind = EventKind::TimeoutCheck;
        ev.drone = d;
        ev.task = *rt.task;
        ev.epoch = rt.conn_epoch;
        ctx_.kernel.schedule(ev);
    }

    void on_reconnect(DroneId d) {
        DroneRuntime& rt = ctx_.runtime[d];
        if (!rt.task) rt.ready_since = std::max(rt.ready_since, ctx_.now());
        on_drone_available(d);
    }

    /// Requeues the task of a drone that has stayed unreachable for the whole
    /// detection timeout. The drone restarts idle when (if) it returns.
    void on_timeout(const SimEvent& ev) {
        DroneRuntime& rt = ctx_.runtime[ev.drone];
        if (ctx_.connected(ev.drone) || rt.conn_epoch != ev.epoch) return;
        if (!rt.task || *rt.task != ev.task) return;
        ctx_.pool.requeue(ev.task, ctx_.now());
        TaskRecord& rec = ctx_.record(ev.task);
        ++rec.reschedules;
        rec.orphaned_since = std::get<Disconnected>(ctx_.fleet[ev.drone].status).since;
        ctx_.abandon_task(ev.drone);
        wake_idle_agents();
    }

    void on_report(DroneId d) { on_drone_available(d); }

    void on_mission(const SimEvent& ev) {
        const DroneRuntime& rt = ctx_.runtime[ev.drone];
        if (rt.task_epoch != ev.epoch || !rt.task || *rt.task != ev.task) return;
        ctx_.note_assignment(ev.task, ev.drone);
        ctx_.start_travel(ev.drone, ev.task);
    }

    void on_wake(const SimEvent& ev) {
        Agent& a = agents_[ev.agent];
        if (ev.flag) {
            decide(ev.agent);
            return;
        }
        a.wake_pending = false;
        try_start(ev.agent);
    }

private:
    struct Agent {
        SimTime busy_until = 0.0;
        bool wake_pending = false;
        std::optional<TaskId> task;  // task under selection
        DroneId drone = 0;           // drone chosen for it
    };

    void charge_compute(Agent& a, double t) {
        busy_compute_ += to_ns(t);
        busy_total_ += to_ns(t);
        a.busy_until += t;
    }

    void wake_idle_agents() {
        for (std::uint32_t i = 0; i < agents_.size(); ++i) {
            Agent& a = agents_[i];
            if (a.wake_pending || a.task) continue;
            a.wake_pending = true;
            SimEvent ev;
            ev.time = std::max(ctx_.now(), a.busy_until);
            ev.kind = EventKind::ControllerWake;
            ev.agent = i;
            ctx_.kernel.schedule(ev);
        }
    }

    /// Walks the pending tasks in FIFO order and starts a selection for the
    /// first one some idle drone can serve. Each task examined costs one scan.
    void try_start(std::uint32_t index) {
        Agent& a = agents_[index];
        const SimTime now = ctx_.now();
        if (a.busy_until > now || a.task) return;
        a.busy_until = now;
        if (idle_.empty()) return;
        for (TaskId id : ctx_.pool.pending_ids()) {
            if (in_service_.count(id) || blocked_.count(id)) continue;
            charge_compute(a, service_.scan());
            const TaskSpec& spec = ctx_.pool.spec_of(id);
            auto chosen = select_drone_among(spec, ctx_.fleet, idle_, ctx_.site(), ctx_.params());
            observe(index, spec, chosen);
            if (!chosen) {
                blocked_.insert(id);
                continue;
            }
            a.task = id;
            a.drone = *chosen;
            in_service_.insert(id);
            schedule_decision(index);
            return;
        }
        // Nothing assignable right now: wait for a trigger.
    }

    void schedule_decision(std::uint32_t index) {
        SimEvent ev;
        ev.time = agents_[index].busy_until;
        ev.kind = EventKind::ControllerWake;
        ev.agent = index;
        ev.flag = true;
        ctx_.kernel.schedule(ev);
    }

    /// End of the scan window. Another agent may have taken the drone in the
    /// meantime; the later finisher re-runs selection over what is left.
    void decide(std::uint32_t index) {
        Agent& a = agents_[index];
        const TaskId task = *a.task;
        if (!idle_.count(a.drone)) {
            const TaskSpec& spec = ctx_.pool.spec_of(task);
            charge_compute(a, service_.scan());
            auto chosen = select_drone_among(spec, ctx_.fleet, idle_, ctx_.site(), ctx_.params());
            observe(index, spec, chosen);
            if (chosen) {
                a.drone = *chosen;
                schedule_decision(index);
                return;
            }
            in_service_.erase(task);
            blocked_.insert(task);
            a.task.reset();
            a.wake_pending = true;
            SimEvent ev;
            ev.time = a.busy_until;
            ev.kind = EventKind::ControllerWake;
            ev.agent = index;
            ctx_.kernel.schedule(ev);
            return;
        }

        const DroneId d = a.drone;
        const auto version = ctx_.pool.status_of(task).version;
        const auto outcome = ctx_.pool.claim(task, d, version, ctx_.now());
        ctx_.trace_claim(ctx_.now(), task, d, outcome.won);
        if (!outcome.won) throw InvariantViolation("centralized claim lost for task " + std::to_string(task));
        ctx_.bind(d, task);
        idle_.erase(d);
        in_service_.erase(task);
        a.task.reset();
        ++dispatches_;

        // The mission goes out over an already-open connection: one way, no handshake.
        const double one_way = ctx_.net.sample_one_way(ctx_.rng.network);
        busy_network_ += to_ns(one_way);
        busy_total_ += to_ns(one_way);
        a.busy_until = ctx_.now() + one_way;
        SimEvent msg;
        msg.kind = EventKind::MessageArrive;
        msg.tag = MsgTag::Mission;
        msg.to_drone = true;
        msg.drone = d;
        msg.task = task;
        msg.epoch = ctx_.runtime[d].task_epoch;
        msg.time = a.busy_until;
        ctx_.kernel.schedule(msg);

        a.wake_pending = true;
        SimEvent wake;
        wake.time = a.busy_until;
        wake.kind = EventKind::ControllerWake;
        wake.agent = index;
        ctx_.kernel.schedule(wake);
    }

    void observe(std::uint32_t agent, const TaskSpec& spec, std::optional<DroneId> chosen) {
        if (!ctx_.observer.on_central_select) return;
        ctx_.observer.on_central_select({ctx_.now(), &spec, ctx_.fleet, chosen, agent});
    }

    SimContext& ctx_;
    ServiceTimeModel service_;
    std::vector<Agent> agents_;
    std::set<DroneId> idle_;
    std::set<TaskId> in_service_;
    std::set<TaskId> blocked_;
    static std::int64_t to_ns(double t) { return std::llround(t * 1e9); }

    std::int64_t busy_network_ = 0;
    std::int64_t busy_compute_ = 0;
    std::int64_t busy_total_ = 0;
    std::size_t dispatches_ = 0;
};

}  // namespace swarmsim
