#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "swarmsim/kernel.hpp"
#include "swarmsim/rng.hpp"
#include "swarmsim/scenario.hpp"
#include "swarmsim/taskpool.hpp"

namespace swarmsim {

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

/// Lognormal round-trip times, scaled by the scenario's latency multiplier.
class NetworkModel {
public:
    NetworkModel(NetworkParams params, double multiplier)
        : params_(params), multiplier_(multiplier) {}

    double sample_rtt(std::mt19937_64& stream) {
        const double z = normal_(stream);
        return params_.rtt_median * std::exp(params_.rtt_sigma * z) * multiplier_;
    }
    double sample_one_way(std::mt19937_64& stream) { return 0.5 * sample_rtt(stream); }

    const NetworkParams& params() const { return params_; }
    double multiplier() const { return multiplier_; }

private:
    NetworkParams params_;
    double multiplier_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// ---------------------------------------------------------------------------
// Arena and fleet
// ---------------------------------------------------------------------------

struct Arena {
    double radius = 50.0;
    double height = 20.0;

    Position sample(std::mt19937_64& g) const {
        const double r = radius * std::sqrt(unit(g));
        const double theta = 2.0 * std::numbers::pi * unit(g);
        const double z = height * unit(g);
        return {r * std::cos(theta), r * std::sin(theta), z};
    }
    bool contains(const Position& p) const {
        return std::hypot(p.x, p.y) <= radius + 1e-9 && p.z >= 0.0 && p.z <= height + 1e-9;
    }
};

inline Arena arena_of(const Scenario& s) { return {s.effective_arena_radius(), s.arena_height}; }

inline double pick_cpu_scale(const std::vector<CpuScaleChoice>& choices, double u) {
    double total = 0.0;
    for (const auto& c : choices) total += c.weight;
    double acc = 0.0;
    for (const auto& c : choices) {
        acc += c.weight / total;
        if (u < acc) return c.scale;
    }
    return choices.back().scale;
}

/// Positions come from the topology stream, everything heterogeneous from the
/// heterogeneity stream. Gps is never dropped.
inline std::vector<DroneState> generate_fleet(const Scenario& s, RngStreams& rng) {
    const Arena arena = arena_of(s);
    const auto& p = s.model_params;
    const auto& h = s.heterogeneity;
    std::vector<DroneState> fleet(s.fleet_size);
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        DroneState& d = fleet[i];
        d.id = static_cast<DroneId>(i);
        d.position = arena.sample(rng.topology);
        d.speed = p.drone_speed;
        d.battery_capacity = p.battery_capacity;
        d.battery_level = p.battery_capacity;
        d.cpu_scale = 1.0;
        d.sensors = SensorSet::all();
        if (!h.enabled) continue;
        for (SensorKind k : kAllSensors) {
            if (k == SensorKind::Gps) continue;
            if (unit(rng.heterogeneity) < h.sensor_drop_prob) d.sensors.erase(k);
        }
        const double frac =
            h.battery_init_lo + (h.battery_init_hi - h.battery_init_lo) * unit(rng.heterogeneity);
        d.battery_level = frac * p.battery_capacity;
        d.cpu_scale = pick_cpu_scale(h.cpu_scale_choices, unit(rng.heterogeneity));
    }
    return fleet;
}

// ---------------------------------------------------------------------------
// Failure injection
// ---------------------------------------------------------------------------

/// One wave: floor(fraction x fleet) distinct connected drones go dark now; each
/// comes back after the outage unless the permanence draw says otherwise.
/// `connected[i]` excludes drones that are already disconnected.
inline std::vector<SimEvent> inject_failures(const FailureConfig& cfg, std::size_t fleet_size,
                                             const std::vector<bool>& connected,
                                             std::mt19937_64& stream, SimTime now) {
    std::vector<DroneId> candidates;
    for (std::size_t i = 0; i < connected.size(); ++i)
        if (connected[i]) candidates.push_back(static_cast<DroneId>(i));
    const auto wanted = static_cast<std::size_t>(
        std::floor(cfg.fraction * static_cast<double>(fleet_size) + 1e-9));
    const std::size_t count = std::min(wanted, candidates.size());

    // partial Fisher-Yates
    for (std::size_t i = 0; i < count; ++i) {
        const auto span = static_cast<double>(candidates.size() - i);
        const std::size_t j = i + static_cast<std::size_t>(unit(stream) * span);
        std::swap(candidates[i], candidates[std::min(j, candidates.size() - 1)]);
    }
    std::vector<DroneId> chosen(candidates.begin(), candidates.begin() + static_cast<long>(count));
    std::sort(chosen.begin(), chosen.end());

    std::vector<SimEvent> out;
    for (DroneId d : chosen) {
        const bool permanent = unit(stream) < cfg.permanent_prob;
        SimEvent down;
        down.time = now;
        down.kind = EventKind::Disconnect;
        down.drone = d;
        down.flag = permanent;
        out.push_back(down);
        if (!permanent) {
            SimEvent up;
            up.time = now + cfg.outage_duration;
            up.kind = EventKind::Reconnect;
            up.drone = d;
            out.push_back(up);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Workload
// ---------------------------------------------------------------------------

/// Keeps the pool topped up to the backlog target and spawns conditional
/// obstacle-avoidance follow-ups.
class WorkloadGenerator {
public:
    WorkloadGenerator(const Scenario& s, std::uint64_t obstacle_seed)
        : cfg_(s.workload),
          params_(s.model_params),
          arena_(arena_of(s)),
          target_(s.effective_backlog_target()),
          obstacle_seed_(obstacle_seed) {
        mix_ = {TaskKind::Routing, TaskKind::RecognizePeople, TaskKind::RecognizeBuilding,
                TaskKind::RecognizeDrone};
        if (cfg_.include_tree) mix_.push_back(TaskKind::RecognizeTree);
    }

    TaskSpec make_task(TaskKind kind, Position where, SimTime now) {
        TaskSpec t;
        t.id = next_id_++;
        t.kind = kind;
        t.location = where;
        t.required_sensors = required_sensors(kind);
        t.compute_work = at(params_.kind_work, kind);
        t.payload_bytes = at(params_.payload_bytes_by_kind, kind);
        t.arrival_time = now;
        return t;
    }

    /// Enqueues fresh tasks until the pool holds `target` pending entries.
    std::vector<TaskSpec> tick(TaskPool& pool, std::mt19937_64& stream, SimTime now) {
        std::vector<TaskSpec> added;
        while (pool.pending_count() < target_) {
            const auto idx = static_cast<std::size_t>(unit(stream) * static_cast<double>(mix_.size()));
            const TaskKind kind = mix_[std::min(idx, mix_.size() - 1)];
            const Position where = arena_.sample(stream);
            TaskSpec t = make_task(kind, where, now);
            pool.enqueue(t);
            added.push_back(std::move(t));
        }
        return added;
    }

    /// The obstacle draw is keyed by the parent id, so it is the same whichever
    /// controller ran the parent and whenever it finished.
    std::optional<TaskSpec> on_completion(const TaskSpec& done, TaskPool& pool, SimTime now) {
        if (!is_recognition(done.kind)) return std::nullopt;
        if (keyed_unit(obstacle_seed_, done.id) >= cfg_.obstacle_prob) return std::nullopt;
        TaskSpec child = make_task(TaskKind::ObstacleAvoidance, done.location, now);
        child.parent_task = done.id;
        pool.enqueue(child);
        return child;
    }

    std::size_t target() const { return target_; }
    TaskId next_id() const { return next_id_; }

private:
    WorkloadConfig cfg_;
    ModelParams params_;
    Arena arena_;
    std::size_t target_;
    std::uint64_t obstacle_seed_;
    std::vector<TaskKind> mix_;
    TaskId next_id_ = 0;
};

}  // namespace swarmsim
