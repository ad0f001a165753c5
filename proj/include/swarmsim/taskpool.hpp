#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "swarmsim/core.hpp"

namespace swarmsim {

struct ClaimOutcome {
    bool won = false;
    StatusTag current = StatusTag::Pending;  // status observed when the claim was serialized
    std::uint64_t current_version = 0;

    explicit operator bool() const { return won; }
};

/// Serialization key of a claim: claims are applied in ascending (time, drone).
struct ClaimArrival {
    SimTime time = 0.0;
    DroneId drone = 0;

    friend auto operator<=>(const ClaimArrival&, const ClaimArrival&) = default;
};

struct ClaimRequest {
    TaskId task = 0;
    DroneId drone = 0;
    std::uint64_t observed_version = 0;
    SimTime time = 0.0;
};

struct PoolCounters {
    std::uint64_t attempts = 0;
    std::uint64_t claims = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t requeues = 0;
    std::uint64_t completions = 0;
};

struct PendingView {
    const TaskSpec* spec = nullptr;
    std::uint64_t version = 0;
};

/// Every status change, in the order it was applied.
struct Transition {
    SimTime time = 0.0;
    TaskId task = 0;
    StatusTag from = StatusTag::Pending;
    StatusTag to = StatusTag::Pending;
    std::uint64_t version = 0;  // version after the transition
    DroneId drone = 0;
    bool run_end = false;
};

/// Global FIFO task pool with per-task version tokens for optimistic claims.
class TaskPool {
public:
    using Listener = std::function<void(const Transition&)>;

    void set_listener(Listener l) { listener_ = std::move(l); }

    void enqueue(const TaskSpec& spec) {
        if (!entries_.empty() && spec.id <= entries_.rbegin()->first)
            throw InvariantViolation("enqueue: task id " + std::to_string(spec.id) +
                                     " not above last id " +
                                     std::to_string(entries_.rbegin()->first));
        entries_.emplace(spec.id, Entry{spec, TaskStatus{}});
        pending_.insert(spec.id);
    }

    std::vector<PendingView> snapshot_pending(std::size_t limit) const {
        std::vector<PendingView> out;
        out.reserve(std::min(limit, pending_.size()));
        for (TaskId id : pending_) {
            if (out.size() >= limit) break;
            const auto& e = entries_.at(id);
            out.push_back({&e.spec, e.status.version});
        }
        return out;
    }

    ClaimOutcome claim(TaskId task, DroneId drone, std::uint64_t observed_version, SimTime now) {
        Entry& e = lookup(task, "claim");
        ++counters_.attempts;
        if (!e.status.pending() || e.status.version != observed_version) {
            ++counters_.conflicts;
            return {false, tag_of(e.status), e.status.version};
        }
        set_status(task, e, status::Claimed{drone, now}, now, drone);
        ++counters_.claims;
        return {true, StatusTag::Claimed, e.status.version};
    }

    /// Applies claims in their serialized order: ascending (time, drone id).
    std::vector<ClaimOutcome> claim_batch(std::vector<ClaimRequest> batch) {
        std::stable_sort(batch.begin(), batch.end(), [](const auto& a, const auto& b) {
            return ClaimArrival{a.time, a.drone} < ClaimArrival{b.time, b.drone};
        });
        std::vector<ClaimOutcome> out;
        out.reserve(batch.size());
        for (const auto& r : batch) out.push_back(claim(r.task, r.drone, r.observed_version, r.time));
        return out;
    }

    void start_execution(TaskId task, DroneId drone, SimTime now) {
        Entry& e = lookup(task, "start_execution");
        auto* c = std::get_if<status::Claimed>(&e.status.state);
        if (!c || c->drone != drone)
            throw InvariantViolation("start_execution: task " + std::to_string(task) +
                                     " not claimed by drone " + std::to_string(drone));
        set_status(task, e, status::Executing{drone, now}, now, drone);
    }

    void requeue(TaskId task, SimTime now) {
        Entry& e = lookup(task, "requeue");
        const auto holder = e.status.holder();
        if (!holder)
            throw InvariantViolation("requeue: task " + std::to_string(task) + " is " +
                                     std::string(to_string(tag_of(e.status))));
        set_status(task, e, status::Pending{}, now, *holder);
        ++e.status.reschedule_count;
        ++counters_.requeues;
        pending_.insert(task);
    }

    void complete(TaskId task, DroneId drone, SimTime now) {
        Entry& e = lookup(task, "complete");
        auto* x = std::get_if<status::Executing>(&e.status.state);
        if (!x || x->drone != drone)
            throw InvariantViolation("complete: task " + std::to_string(task) +
                                     " not executing on drone " + std::to_string(drone));
        set_status(task, e, status::Completed{now}, now, drone);
        ++counters_.completions;
    }

    /// Claimed/Executing -> Incomplete. Pending tasks may only be closed by the
    /// end-of-run sweep (`run_end`).
    void mark_incomplete(TaskId task, IncompleteReason reason, SimTime now, bool run_end) {
        Entry& e = lookup(task, "mark_incomplete");
        if (!legal_transition(tag_of(e.status), StatusTag::Incomplete, run_end))
            throw InvariantViolation("mark_incomplete: task " + std::to_string(task) + " is " +
                                     std::string(to_string(tag_of(e.status))));
        set_status(task, e, status::Incomplete{reason}, now, e.status.holder().value_or(0), run_end);
    }

    const TaskStatus& status_of(TaskId task) const { return lookup(task, "status_of").status; }
    const TaskSpec& spec_of(TaskId task) const { return lookup(task, "spec_of").spec; }
    bool contains(TaskId task) const { return entries_.count(task) != 0; }

    std::size_t pending_count() const { return pending_.size(); }
    std::size_t size() const { return entries_.size(); }
    const std::set<TaskId>& pending_ids() const { return pending_; }
    const PoolCounters& counters() const { return counters_; }

    template <class F>
    void for_each(F&& f) const {
        for (const auto& [id, e] : entries_) f(e.spec, e.status);
    }

private:
    struct Entry {
        TaskSpec spec;
        TaskStatus status;
    };

    Entry& lookup(TaskId task, const char* op) {
        auto it = entries_.find(task);
        if (it == entries_.end())
            throw InvariantViolation(std::string(op) + ": unknown task " + std::to_string(task));
        return it->second;
    }
    const Entry& lookup(TaskId task, const char* op) const {
        return const_cast<TaskPool*>(this)->lookup(task, op);
    }

    template <class S>
    void set_status(TaskId task, Entry& e, S next, SimTime now, DroneId drone,
                    bool run_end = false) {
        const StatusTag from = tag_of(e.status);
        const decltype(e.status.state) candidate = next;
        const auto to = static_cast<StatusTag>(candidate.index());
        if (!legal_transition(from, to, run_end))
            throw InvariantViolation("illegal transition " + std::string(to_string(from)) + " -> " +
                                     std::string(to_string(to)) + " for task " +
                                     std::to_string(task));
        e.status.state = candidate;
        ++e.status.version;
        if (from == StatusTag::Pending) pending_.erase(task);
        if (listener_) listener_({now, task, from, to, e.status.version, drone, run_end});
    }

    std::map<TaskId, Entry> entries_;
    std::set<TaskId> pending_;
    PoolCounters counters_;
    Listener listener_;
};

}  // namespace swarmsim
