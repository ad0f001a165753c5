#pragma once

#include <array>

#include "swarmsim/core.hpp"

namespace swarmsim {

enum class ExecutionSite : std::uint8_t { Edge, CloudNative, CloudServerless };

inline std::string_view to_string(ExecutionSite s) {
    switch (s) {
        case ExecutionSite::Edge: return "edge";
        case ExecutionSite::CloudNative: return "cloud_native";
        case ExecutionSite::CloudServerless: return "cloud_serverless";
    }
    return "?";
}

using PerKind = std::array<double, kTaskKindCount>;

inline double& at(PerKind& table, TaskKind k) { return table[static_cast<std::size_t>(k)]; }
inline double at(const PerKind& table, TaskKind k) { return table[static_cast<std::size_t>(k)]; }

/// Closed-form performance and power models shared by both controllers.
/// The magnitudes are calibration constants, not measured coefficients.
struct ModelParams {
    double drone_speed = 3.5;          // m/s
    double travel_energy = 40.0;       // J/m
    double compute_power_edge = 2.0;   // W
    double edge_ref_speed = 1.0;
    double cloud_speedup = 4.0;
    double serverless_multiplier = 1.06;
    double uplink_bandwidth = 2'000'000.0;  // bytes/s
    double battery_capacity = 100'000.0;    // J
    // Routing, RecognizePeople, RecognizeBuilding, RecognizeTree, RecognizeDrone, ObstacleAvoidance
    PerKind kind_work = {20.0, 60.0, 60.0, 60.0, 60.0, 10.0};
    // Kinds whose cloud execution runs no faster than at the edge. Zero means "use cloud_speedup".
    PerKind kind_cloud_speedup_override = {1.0, 0.0, 0.0, 0.0, 0.0, 1.0};
    PerKind payload_bytes_by_kind = {1'000.0, 500'000.0, 500'000.0, 500'000.0, 500'000.0, 1'000.0};

    double effective_cloud_speedup(TaskKind k) const {
        const double o = at(kind_cloud_speedup_override, k);
        return o > 0.0 ? o : cloud_speedup;
    }
};

inline double travel_time(const Position& from, const Position& to, double speed) {
    return distance(from, to) / speed;
}

inline double exec_time(const TaskSpec& task, ExecutionSite site, const DroneState& drone,
                        const ModelParams& p) {
    switch (site) {
        case ExecutionSite::Edge:
            return task.compute_work / (p.edge_ref_speed * drone.cpu_scale);
        case ExecutionSite::CloudNative:
            return task.compute_work / p.effective_cloud_speedup(task.kind) +
                   task.payload_bytes / p.uplink_bandwidth;
        case ExecutionSite::CloudServerless:
            return exec_time(task, ExecutionSite::CloudNative, drone, p) * p.serverless_multiplier;
    }
    return 0.0;
}

/// Energy the drone spends on `task`: flying to its location plus on-board
/// compute when the work runs at the edge.
inline double battery_cost(const DroneState& drone, const TaskSpec& task, ExecutionSite site,
                           const ModelParams& p) {
    double cost = distance(drone.position, task.location) * p.travel_energy;
    if (site == ExecutionSite::Edge) cost += exec_time(task, site, drone, p) * p.compute_power_edge;
    return cost;
}

/// Sensors and battery only; the caller decides whether the drone is free.
inline bool capable(const DroneState& drone, const TaskSpec& task, ExecutionSite site,
                    const ModelParams& p) {
    return drone.sensors.contains_all(task.required_sensors) &&
           battery_cost(drone, task, site, p) <= drone.battery_level;
}

inline bool feasible(const DroneState& drone, const TaskSpec& task, ExecutionSite site,
                     const ModelParams& p) {
    return drone.idle() && capable(drone, task, site, p);
}

}  // namespace swarmsim
