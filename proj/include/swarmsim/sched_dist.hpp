#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "swarmsim/models.hpp"
#include "swarmsim/sim_context.hpp"

namespace swarmsim {

struct PickedTask {
    TaskId task = 0;
    std::uint64_t version = 0;

    friend bool operator==(const PickedTask&, const PickedTask&) = default;
};

/// First entry of a FIFO snapshot the drone can serve: it has the sensors and
/// the battery to fly there and do the work. Cheaper later entries are not
/// considered.
inline std::optional<PickedTask> pick_task(std::span<const PendingView> snapshot,
                                           const DroneState& drone, ExecutionSite site,
                                           const ModelParams& p) {
    for (const auto& entry : snapshot)
        if (capable(drone, *entry.spec, site, p)) return PickedTask{entry.spec->id, entry.version};
    return std::nullopt;
}

/// Pull controller: every drone runs its own fetch / claim / execute loop
/// against the shared pool.
class DistributedController {
public:
    explicit DistributedController(SimContext& ctx) : ctx_(ctx) {}

    void start() {
        for (const auto& d : ctx_.fleet) begin_fetch(d.id);
    }

    std::uint64_t total_retries() const {
        std::uint64_t n = 0;
        for (const auto& rt : ctx_.runtime) n += rt.retry_count;
        return n;
    }

    void on_agent_wake(const SimEvent& ev) {
        DroneRuntime& rt = ctx_.runtime[ev.drone];
        if (rt.phase != AgentPhase::Idle || rt.task || rt.lost) return;
        begin_fetch(ev.drone);
    }

    void on_fetch_request(const SimEvent& ev) {
        DroneRuntime& rt = ctx_.runtime[ev.drone];
        rt.snapshot.clear();
        for (const auto& v : ctx_.pool.snapshot_pending(ctx_.scenario.distributed.snapshot_limit))
            rt.snapshot.emplace_back(v.spec->id, v.version);
        SimEvent reply;
        reply.tag = MsgTag::FetchResponse;
        reply.to_drone = true;
        reply.drone = ev.drone;
        ctx_.send(reply);
    }

    void on_fetch_response(const SimEvent& ev) {
        const DroneId d = ev.drone;
        DroneRuntime& rt = ctx_.runtime[d];
        std::vector<PendingView> snapshot;
        snapshot.reserve(rt.snapshot.size());
        for (const auto& [id, version] : rt.snapshot) snapshot.push_back({&ctx_.pool.spec_of(id), version});
        const auto picked = pick_task(snapshot, ctx_.fleet[d], ctx_.site(), ctx_.params());
        if (ctx_.observer.on_distributed_pick)
            ctx_.observer.on_distributed_pick(
                {ctx_.now(), &ctx_.fleet[d], snapshot,
                 picked ? std::optional<TaskId>(picked->task) : std::nullopt});
        if (!picked) {
            rt.phase = AgentPhase::Idle;
            SimEvent wake;
            wake.time = ctx_.now() + ctx_.scenario.distributed.backoff_interval;
            wake.kind = EventKind::AgentWake;
            wake.drone = d;
            ctx_.kernel.schedule(wake);
            return;
        }
        rt.phase = AgentPhase::Claiming;
        SimEvent claim;
        claim.tag = MsgTag::ClaimRequest;
        claim.drone = d;
        claim.task = picked->task;
        claim.version = picked->version;
        ctx_.send(claim);
    }

    /// Claims that reach the pool at the same instant are applied in drone-id order.
    void on_claim_requests(const std::vector<SimEvent>& batch) {
        std::vector<ClaimRequest> requests;
        requests.reserve(batch.size());
        for (const auto& ev : batch) requests.push_back({ev.task, ev.drone, ev.version, ev.time});
        std::stable_sort(requests.begin(), requests.end(), [](const auto& a, const auto& b) {
            return ClaimArrival{a.time, a.drone} < ClaimArrival{b.time, b.drone};
        });
        const auto outcomes = ctx_.pool.claim_batch(requests);
        for (std::size_t i = 0; i < requests.size(); ++i) {
            const auto& r = requests[i];
            const bool won = outcomes[i].won;
            ctx_.trace_claim(ctx_.now(), r.task, r.drone, won);
            if (won)
                ctx_.bind(r.drone, r.task);
            else
                ++ctx_.record(r.task).conflicts_encountered;
            SimEvent reply;
            reply.tag = MsgTag::ClaimResponse;
            reply.to_drone = true;
            reply.drone = r.drone;
            reply.task = r.task;
            reply.flag = won;
            reply.epoch = ctx_.runtime[r.drone].task_epoch;
            ctx_.send(reply);
        }
    }

    void on_claim_response(const SimEvent& ev) {
        DroneRuntime& rt = ctx_.runtime[ev.drone];
        if (!ev.flag) {
            ++rt.retry_count;
            begin_fetch(ev.drone);
            return;
        }
        rt.phase = AgentPhase::Traveling;
        ctx_.note_assignment(ev.task, ev.drone);
        ctx_.start_travel(ev.drone, ev.task);
    }

    void on_exec_started(DroneId d) { ctx_.runtime[d].phase = AgentPhase::Executing; }
    void on_exec_done(DroneId d) { ctx_.runtime[d].phase = AgentPhase::Reporting; }

    /// Report delivered: the drone is idle again and goes straight back to the pool.
    void on_report(DroneId d) { begin_fetch(d); }

private:
    void begin_fetch(DroneId d) {
        DroneRuntime& rt = ctx_.runtime[d];
        rt.phase = AgentPhase::Fetching;
        SimEvent req;
        req.tag = MsgTag::FetchRequest;
        req.drone = d;
        ctx_.send(req);
    }

    SimContext& ctx_;
};

}  // namespace swarmsim
