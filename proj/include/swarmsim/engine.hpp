#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "swarmsim/metrics.hpp"
#include "swarmsim/sched_central.hpp"
#include "swarmsim/sched_dist.hpp"
#include "swarmsim/sim_context.hpp"

namespace swarmsim {

struct RunOptions {
    TraceLevel trace_level = TraceLevel::Transitions;
    Observer observer;
};

/// Controller busy-time ledger in nanoseconds; zero for distributed runs.
struct ControllerBusyNs {
    std::int64_t network = 0;
    std::int64_t compute = 0;
    std::int64_t total = 0;
};

struct RunResult {
    Trace trace;
    MetricsReport metrics;
    std::vector<TaskRecord> records;
    std::vector<DroneState> initial_fleet;
    std::vector<DroneState> final_fleet;
    std::vector<BatteryDebit> debits;
    PoolCounters pool_counters;
    double controller_busy_total = 0.0;  // centralized only
    ControllerBusyNs controller_busy_ns;
    std::uint64_t events_processed = 0;
};

class InvalidScenario : public std::invalid_argument {
public:
    explicit InvalidScenario(std::vector<Violation> v)
        : std::invalid_argument(describe(v)), violations(std::move(v)) {}
    std::vector<Violation> violations;

private:
    static std::string describe(const std::vector<Violation>& v) {
        std::string s = "invalid scenario:";
        for (const auto& x : v) s += " " + x.field + " (" + x.constraint + ");";
        return s;
    }
};

namespace detail {

inline MetricsReport build_metrics(const std::vector<TaskRecord>& records,
                                   const PoolCounters& counters, double duration, double warmup) {
    MetricsReport m;
    m.total_tasks = records.size();
    for (const auto& r : records) {
        if (auto s = r.scheduling_latency(); s && *r.first_assign_time >= warmup)
            m.scheduling_latency.push_back(*s);
        if (auto e = r.execution_time()) m.task_execution.push_back(*e);
        if (r.started()) ++m.started;
        if (r.outcome == Outcome::Completed) {
            ++m.completed;
        } else if (r.outcome == Outcome::Incomplete) {
            if (r.started())
                ++m.incomplete_started;
            else
                ++m.residual_pending;
            ++m.incomplete_by_reason[std::string(to_string(r.reason.value_or(IncompleteReason::RunEnd)))];
        }
    }
    if (m.total_tasks > 0) {
        const auto n = static_cast<double>(m.total_tasks);
        m.completion_fraction = static_cast<double>(m.completed) / n;
        m.incomplete_fraction = static_cast<double>(m.incomplete_started) / n;
        m.residual_pending_fraction = static_cast<double>(m.residual_pending) / n;
    }
    if (m.started > 0)
        m.started_incomplete_fraction =
            static_cast<double>(m.incomplete_started) / static_cast<double>(m.started);
    m.claim_attempts = counters.attempts;
    m.claims_won = counters.claims;
    m.conflicts = counters.conflicts;
    m.conflict_rate = counters.attempts
                          ? static_cast<double>(counters.conflicts) / static_cast<double>(counters.attempts)
                          : 0.0;
    m.requeues = counters.requeues;
    m.scheduling_pct = summarize(m.scheduling_latency);
    m.execution_pct = summarize(m.task_execution);
    m.mean_scheduling_latency = mean(m.scheduling_latency);
    m.mean_task_execution = mean(m.task_execution);
    const double window = duration - warmup;
    m.throughput = window > 0.0 ? static_cast<double>(m.scheduling_latency.size()) / window : 0.0;
    return m;
}

class Engine {
public:
    Engine(const Scenario& s, RunOptions opts) : ctx_(s, opts.trace_level, std::move(opts.observer)) {
        if (s.controller_mode == ControllerMode::Centralized)
            controller_.emplace<CentralController>(ctx_);
        else
            controller_.emplace<DistributedController>(ctx_);
    }

    RunResult run() {
        RunResult result;
        result.initial_fleet = ctx_.fleet;
        const Scenario& s = ctx_.scenario;
        try {
            ctx_.top_up();
            if (s.duration > 0.0) {
                schedule_simple(EventKind::GeneratorTick, s.workload.generator_period);
                if (s.failures.enabled) schedule_simple(EventKind::FailureWave, s.failures.interval);
                if (auto* c = central())
                    c->start();
                else
                    dist()->start();
                loop(s.duration);
            }
            finish(s.duration);
        } catch (const InvariantViolation& e) {
            throw RunAborted(e.what(), std::move(ctx_.trace));
        }
        result.final_fleet = ctx_.fleet;
        result.debits = ctx_.debits;
        result.pool_counters = ctx_.pool.counters();
        result.metrics = build_metrics(ctx_.records, ctx_.pool.counters(), s.duration, s.latency_warmup);
        if (auto* c = central()) {
            result.metrics.busy_time_network = c->busy_time_network();
            result.metrics.busy_time_compute = c->busy_time_compute();
            result.controller_busy_total = c->busy_time_total();
            result.controller_busy_ns = {c->busy_ns_network(), c->busy_ns_compute(), c->busy_ns_total()};
            const double total = c->busy_time_network() + c->busy_time_compute();
            if (total > 0.0) {
                result.metrics.network_fraction = c->busy_time_network() / total;
                result.metrics.compute_fraction = c->busy_time_compute() / total;
            }
        }
        result.events_processed = events_;
        result.records = std::move(ctx_.records);
        result.trace = std::move(ctx_.trace);
        return result;
    }

private:
    CentralController* central() { return std::get_if<CentralController>(&controller_); }
    DistributedController* dist() { return std::get_if<DistributedController>(&controller_); }

    void schedule_simple(EventKind kind, SimTime at) {
        SimEvent ev;
        ev.time = at;
        ev.kind = kind;
        ctx_.kernel.schedule(ev);
    }

    void loop(SimTime horizon) {
        while (!ctx_.kernel.empty() && ctx_.kernel.peek().time <= horizon) {
            SimEvent ev = ctx_.kernel.pop();
            ++events_;
            ctx_.trace_event(ev);
            handle(ev);
        }
    }

    void handle(const SimEvent& ev) {
        switch (ev.kind) {
            case EventKind::GeneratorTick: {
                on_tasks_added(ctx_.top_up().size());
                schedule_simple(EventKind::GeneratorTick,
                                ctx_.now() + ctx_.scenario.workload.generator_period);
                break;
            }
            case EventKind::FailureWave: {
                std::vector<bool> up(ctx_.fleet.size());
                for (std::size_t i = 0; i < up.size(); ++i) up[i] = ctx_.fleet[i].connected();
                for (auto& e : inject_failures(ctx_.scenario.failures, ctx_.fleet.size(), up,
                                               ctx_.rng.failures, ctx_.now()))
                    ctx_.kernel.schedule(e);
                schedule_simple(EventKind::FailureWave, ctx_.now() + ctx_.scenario.failures.interval);
                break;
            }
            case EventKind::Disconnect: on_disconnect(ev); break;
            case EventKind::Reconnect: on_reconnect(ev); break;
            case EventKind::TravelDone: {
                const DroneRuntime& rt = ctx_.runtime[ev.drone];
                if (rt.activity_epoch != ev.epoch || rt.stage != Stage::Traveling) break;
                ctx_.start_exec(ev.drone, ev.task);
                if (auto* d = dist()) d->on_exec_started(ev.drone);
                break;
            }
            case EventKind::ExecDone: {
                const DroneRuntime& rt = ctx_.runtime[ev.drone];
                if (rt.activity_epoch != ev.epoch || rt.stage != Stage::Executing) break;
                ctx_.finish_exec(ev.drone, ev.task);
                if (auto* d = dist()) d->on_exec_done(ev.drone);
                break;
            }
            case EventKind::MessageArrive: on_message(ev); break;
            case EventKind::TimeoutCheck:
                if (auto* c = central()) c->on_timeout(ev);
                break;
            case EventKind::ControllerWake:
                if (auto* c = central()) c->on_wake(ev);
                break;
            case EventKind::AgentWake:
                if (auto* d = dist()) d->on_agent_wake(ev);
                break;
        }
    }

    void on_tasks_added(std::size_t n) {
        if (n == 0) return;
        if (auto* c = central()) c->on_tasks_added();
    }

    void on_disconnect(const SimEvent& ev) {
        DroneState& drone = ctx_.fleet[ev.drone];
        DroneRuntime& rt = ctx_.runtime[ev.drone];
        if (!drone.connected() || rt.lost) return;
        std::variant<Idle, Busy> saved = Idle{};
        if (auto* b = std::get_if<Busy>(&drone.status)) saved = *b;
        drone.status = Disconnected{ctx_.now(), ev.flag, saved};
        ++rt.conn_epoch;
        rt.lost = ev.flag;
        if (rt.stage == Stage::Executing && !rt.exec_stalled && ctx_.site() != ExecutionSite::Edge) {
            rt.exec_remaining = rt.stage_end - ctx_.now();
            rt.exec_stalled = true;
            ++rt.activity_epoch;
        }
        if (auto* c = central()) c->on_disconnect(ev.drone);
    }

    void on_reconnect(const SimEvent& ev) {
        DroneState& drone = ctx_.fleet[ev.drone];
        DroneRuntime& rt = ctx_.runtime[ev.drone];
        auto* dis = std::get_if<Disconnected>(&drone.status);
        if (!dis || rt.lost) return;
        if (std::holds_alternative<Busy>(dis->saved))
            drone.status = std::get<Busy>(dis->saved);
        else
            drone.status = Idle{};
        if (rt.exec_stalled && rt.task) schedule_exec_resume(ev.drone);
        ctx_.release_parked(ev.drone);
        if (auto* c = central()) c->on_reconnect(ev.drone);
    }

    void schedule_exec_resume(DroneId d) {
        DroneRuntime& rt = ctx_.runtime[d];
        ctx_.schedule_exec_done(d, *rt.task, ctx_.now() + rt.exec_remaining);
    }

    void on_message(const SimEvent& ev) {
        if (!ctx_.deliverable(ev)) return;
        DroneRuntime& rt = ctx_.runtime[ev.drone];
        switch (ev.tag) {
            case MsgTag::Report: {
                if (rt.task_epoch != ev.epoch || !rt.task || *rt.task != ev.task) return;
                const TaskSpec spec = ctx_.pool.spec_of(ev.task);
                ctx_.complete_task(ev.drone, ev.task);
                std::size_t added = 0;
                if (auto child = ctx_.workload.on_completion(spec, ctx_.pool, ctx_.now())) {
                    ctx_.add_task(*child);
                    ++added;
                }
                added += ctx_.top_up().size();
                if (auto* c = central()) {
                    c->on_report(ev.drone);
                    if (added) c->on_tasks_added();
                } else {
                    dist()->on_report(ev.drone);
                }
                return;
            }
            case MsgTag::Mission:
                if (auto* c = central()) c->on_mission(ev);
                return;
            case MsgTag::FetchRequest: dist()->on_fetch_request(ev); return;
            case MsgTag::FetchResponse: dist()->on_fetch_response(ev); return;
            case MsgTag::ClaimRequest: {
                std::vector<SimEvent> batch{ev};
                // gather every claim serialized at this same instant
                while (!ctx_.kernel.empty()) {
                    const SimEvent& next = ctx_.kernel.peek();
                    if (next.time != ev.time || next.kind != EventKind::MessageArrive ||
                        next.tag != MsgTag::ClaimRequest)
                        break;
                    SimEvent more = ctx_.kernel.pop();
                    ++events_;
                    ctx_.trace_event(more);
                    if (ctx_.deliverable(more)) batch.push_back(more);
                }
                dist()->on_claim_requests(batch);
                return;
            }
            case MsgTag::ClaimResponse: dist()->on_claim_response(ev); return;
            case MsgTag::None: return;
        }
    }

    /// Closes every open task: held ones become Incomplete (holder lost when
    /// the holder is gone for good); never-assigned ones are unassignable when
    /// no surviving drone could take them, run-end otherwise.
    void finish(SimTime end) {
        std::vector<std::pair<TaskId, IncompleteReason>> open;
        ctx_.pool.for_each([&](const TaskSpec& spec, const TaskStatus& st) {
            if (st.terminal()) return;
            IncompleteReason reason = IncompleteReason::RunEnd;
            if (auto h = st.holder(); h && ctx_.runtime[*h].lost)
                reason = IncompleteReason::HolderLost;
            else if (st.pending() && !servable(spec))
                reason = IncompleteReason::Unassignable;
            open.emplace_back(spec.id, reason);
        });
        for (auto [id, reason] : open) {
            ctx_.pool.mark_incomplete(id, reason, end, true);
            TaskRecord& r = ctx_.record(id);
            r.outcome = Outcome::Incomplete;
            r.reason = reason;
        }
    }

    /// Some surviving drone has the sensors and the charge for `spec`.
    bool servable(const TaskSpec& spec) const {
        for (const auto& d : ctx_.fleet)
            if (!ctx_.runtime[d.id].lost && capable(d, spec, ctx_.site(), ctx_.params())) return true;
        return false;
    }

    SimContext ctx_;
    std::variant<std::monostate, CentralController, DistributedController> controller_;
    std::uint64_t events_ = 0;
};

}  // namespace detail

/// Runs one scenario to completion. Deterministic: the same scenario (seed
/// included) always yields the same trace and metrics.
inline RunResult run(const Scenario& scenario, RunOptions options = {}) {
    if (auto v = validate_scenario(scenario); !v.empty()) throw InvalidScenario(std::move(v));
    detail::Engine engine(scenario, std::move(options));
    return engine.run();
}

}  // namespace swarmsim
