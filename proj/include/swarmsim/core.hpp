#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace swarmsim {

using DroneId = std::uint32_t;
using TaskId = std::uint64_t;
using SimTime = double;  // seconds of simulated time

/// Raised when a run observes a state the transition rules forbid.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct Position {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(const Position& a, const Position& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// ---------------------------------------------------------------------------
// Sensors and task kinds
// ---------------------------------------------------------------------------

enum class SensorKind : std::uint8_t {
    CameraPeople = 0,
    CameraBuilding,
    CameraTree,
    CameraDrone,
    Rangefinder,
    Gps,
};
inline constexpr std::size_t kSensorKindCount = 6;

inline constexpr std::array<SensorKind, kSensorKindCount> kAllSensors = {
    SensorKind::CameraPeople, SensorKind::CameraBuilding, SensorKind::CameraTree,
    SensorKind::CameraDrone,  SensorKind::Rangefinder,    SensorKind::Gps,
};

/// Small bitset over SensorKind, iterated in ordinal order.
class SensorSet {
public:
    constexpr SensorSet() = default;
    constexpr SensorSet(std::initializer_list<SensorKind> kinds) {
        for (auto k : kinds) insert(k);
    }

    static constexpr SensorSet all() {
        SensorSet s;
        s.bits_ = (1u << kSensorKindCount) - 1u;
        return s;
    }

    constexpr void insert(SensorKind k) { bits_ |= bit(k); }
    constexpr void erase(SensorKind k) { bits_ &= ~bit(k); }
    constexpr bool contains(SensorKind k) const { return (bits_ & bit(k)) != 0; }
    constexpr bool contains_all(SensorSet other) const { return (bits_ & other.bits_) == other.bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::uint8_t bits() const { return bits_; }

    friend constexpr bool operator==(SensorSet, SensorSet) = default;

private:
    static constexpr std::uint8_t bit(SensorKind k) {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k));
    }
    std::uint8_t bits_ = 0;
};

enum class TaskKind : std::uint8_t {
    Routing = 0,
    RecognizePeople,
    RecognizeBuilding,
    RecognizeTree,
    RecognizeDrone,
    ObstacleAvoidance,
};
inline constexpr std::size_t kTaskKindCount = 6;

inline constexpr bool is_recognition(TaskKind k) {
    return k == TaskKind::RecognizePeople || k == TaskKind::RecognizeBuilding ||
           k == TaskKind::RecognizeTree || k == TaskKind::RecognizeDrone;
}

inline constexpr SensorSet required_sensors(TaskKind k) {
    switch (k) {
        case TaskKind::Routing: return {SensorKind::Gps};
        case TaskKind::RecognizePeople: return {SensorKind::CameraPeople};
        case TaskKind::RecognizeBuilding: return {SensorKind::CameraBuilding};
        case TaskKind::RecognizeTree: return {SensorKind::CameraTree};
        case TaskKind::RecognizeDrone: return {SensorKind::CameraDrone};
        case TaskKind::ObstacleAvoidance: return {SensorKind::Rangefinder};
    }
    return {};
}

inline std::string_view to_string(SensorKind k) {
    switch (k) {
        case SensorKind::CameraPeople: return "CameraPeople";
        case SensorKind::CameraBuilding: return "CameraBuilding";
        case SensorKind::CameraTree: return "CameraTree";
        case SensorKind::CameraDrone: return "CameraDrone";
        case SensorKind::Rangefinder: return "Rangefinder";
        case SensorKind::Gps: return "Gps";
    }
    return "?";
}

inline std::string_view to_string(TaskKind k) {
    switch (k) {
        case TaskKind::Routing: return "Routing";
        case TaskKind::RecognizePeople: return "RecognizePeople";
        case TaskKind::RecognizeBuilding: return "RecognizeBuilding";
        case TaskKind::RecognizeTree: return "RecognizeTree";
        case TaskKind::RecognizeDrone: return "RecognizeDrone";
        case TaskKind::ObstacleAvoidance: return "ObstacleAvoidance";
    }
    return "?";
}

inline std::optional<TaskKind> task_kind_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kTaskKindCount; ++i) {
        auto k = static_cast<TaskKind>(i);
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Drones
// ---------------------------------------------------------------------------

struct Idle {
    friend bool operator==(const Idle&, const Idle&) = default;
};
struct Busy {
    TaskId task = 0;
    friend bool operator==(const Busy&, const Busy&) = default;
};
struct Disconnected {
    SimTime since = 0.0;
    bool permanent = false;
    std::variant<Idle, Busy> saved = Idle{};
    friend bool operator==(const Disconnected&, const Disconnected&) = default;
};
using DroneStatus = std::variant<Idle, Busy, Disconnected>;

struct DroneState {
    DroneId id = 0;
    Position position;
    double speed = 2.0;  // m/s
    SensorSet sensors = SensorSet::all();
    double battery_capacity = 0.0;  // J
    double battery_level = 0.0;     // J
    double cpu_scale = 1.0;         // (0,1]
    DroneStatus status = Idle{};

    bool idle() const { return std::holds_alternative<Idle>(status); }
    bool connected() const { return !std::holds_alternative<Disconnected>(status); }
};

// ---------------------------------------------------------------------------
// Tasks
// ---------------------------------------------------------------------------

struct TaskSpec {
    TaskId id = 0;
    TaskKind kind = TaskKind::Routing;
    Position location;
    SensorSet required_sensors;
    double compute_work = 1.0;  // reference-seconds
    double payload_bytes = 0.0;
    SimTime arrival_time = 0.0;
    std::optional<TaskId> parent_task;
};

enum class IncompleteReason : std::uint8_t { RunEnd, HolderLost, Unassignable };

inline std::string_view to_string(IncompleteReason r) {
    switch (r) {
        case IncompleteReason::RunEnd: return "run_end";
        case IncompleteReason::HolderLost: return "holder_lost";
        case IncompleteReason::Unassignable: return "unassignable";
    }
    return "?";
}

namespace status {
struct Pending {};
struct Claimed {
    DroneId drone = 0;
    SimTime at = 0.0;
};
struct Executing {
    DroneId drone = 0;
    SimTime since = 0.0;
};
struct Completed {
    SimTime at = 0.0;
};
struct Incomplete {
    IncompleteReason reason = IncompleteReason::RunEnd;
};
}  // namespace status

struct TaskStatus {
    std::variant<status::Pending, status::Claimed, status::Executing, status::Completed,
                 status::Incomplete>
        state = status::Pending{};
    std::uint64_t version = 0;
    std::uint32_t reschedule_count = 0;

    bool pending() const { return std::holds_alternative<status::Pending>(state); }
    bool terminal() const {
        return std::holds_alternative<status::Completed>(state) ||
               std::holds_alternative<status::Incomplete>(state);
    }
    std::optional<DroneId> holder() const {
        if (auto* c = std::get_if<status::Claimed>(&state)) return c->drone;
        if (auto* e = std::get_if<status::Executing>(&state)) return e->drone;
        return std::nullopt;
    }
};

enum class StatusTag : std::uint8_t { Pending, Claimed, Executing, Completed, Incomplete };

inline StatusTag tag_of(const TaskStatus& s) { return static_cast<StatusTag>(s.state.index()); }

inline std::string_view to_string(StatusTag t) {
    switch (t) {
        case StatusTag::Pending: return "Pending";
        case StatusTag::Claimed: return "Claimed";
        case StatusTag::Executing: return "Executing";
        case StatusTag::Completed: return "Completed";
        case StatusTag::Incomplete: return "Incomplete";
    }
    return "?";
}

/// The legal task lifecycle. `from_run_end` admits Pending -> Incomplete, which
/// only the end-of-run sweep performs.
inline bool legal_transition(StatusTag from, StatusTag to, bool from_run_end = false) {
    using S = StatusTag;
    switch (from) {
        case S::Pending: return to == S::Claimed || (from_run_end && to == S::Incomplete);
        case S::Claimed: return to == S::Executing || to == S::Pending || to == S::Incomplete;
        case S::Executing: return to == S::Completed || to == S::Pending || to == S::Incomplete;
        case S::Completed:
        case S::Incomplete: return false;
    }
    return false;
}

}  // namespace swarmsim
