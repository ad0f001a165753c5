#pragma once

#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "swarmsim/core.hpp"

namespace swarmsim {

enum class EventKind : std::uint8_t {
    ControllerWake,
    MessageArrive,
    TravelDone,
    ExecDone,
    Disconnect,
    Reconnect,
    GeneratorTick,
    TimeoutCheck,
    AgentWake,
    FailureWave,
};

inline std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::ControllerWake: return "ControllerWake";
        case EventKind::MessageArrive: return "MessageArrive";
        case EventKind::TravelDone: return "TravelDone";
        case EventKind::ExecDone: return "ExecDone";
        case EventKind::Disconnect: return "Disconnect";
        case EventKind::Reconnect: return "Reconnect";
        case EventKind::GeneratorTick: return "GeneratorTick";
        case EventKind::TimeoutCheck: return "TimeoutCheck";
        case EventKind::AgentWake: return "AgentWake";
        case EventKind::FailureWave: return "FailureWave";
    }
    return "?";
}

enum class MsgTag : std::uint8_t {
    None,
    FetchRequest,
    FetchResponse,
    ClaimRequest,
    ClaimResponse,
    Report,
    Mission,
};

inline std::string_view to_string(MsgTag t) {
    switch (t) {
        case MsgTag::None: return "-";
        case MsgTag::FetchRequest: return "FetchRequest";
        case MsgTag::FetchResponse: return "FetchResponse";
        case MsgTag::ClaimRequest: return "ClaimRequest";
        case MsgTag::ClaimResponse: return "ClaimResponse";
        case MsgTag::Report: return "Report";
        case MsgTag::Mission: return "Mission";
    }
    return "?";
}

/// A timestamped kernel event. Only the fields the kind uses are meaningful;
/// `epoch` lets handlers recognise events made stale by a later state change.
struct SimEvent {
    SimTime time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::GeneratorTick;
    MsgTag tag = MsgTag::None;
    bool to_drone = false;  // message direction: cloud -> drone when set
    bool flag = false;      // Disconnect: permanent; ClaimResponse: won
    DroneId drone = 0;
    std::uint32_t agent = 0;
    TaskId task = 0;
    std::uint64_t version = 0;
    std::uint64_t epoch = 0;
};

/// Min-heap on (time, seq). seq is assigned at emission, so simultaneous events
/// pop in the order they were scheduled.
class Kernel {
public:
    SimTime now() const { return now_; }
    bool empty() const { return queue_.empty(); }
    std::size_t size() const { return queue_.size(); }
    std::uint64_t emitted() const { return next_seq_; }

    const SimEvent& peek() const { return queue_.top(); }

    std::uint64_t schedule(SimEvent ev) {
        if (ev.time < now_)
            throw InvariantViolation("event scheduled in the past: " +
                                     std::string(to_string(ev.kind)));
        ev.seq = next_seq_++;
        queue_.push(ev);
        return ev.seq;
    }

    SimEvent pop() {
        SimEvent ev = queue_.top();
        queue_.pop();
        now_ = ev.time;
        return ev;
    }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
    SimTime now_ = 0.0;
    std::uint64_t next_seq_ = 0;
};

}  // namespace swarmsim
