#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarmsim/models.hpp"

namespace swarmsim {

enum class ControllerMode : std::uint8_t { Centralized, Distributed };

inline std::string_view to_string(ControllerMode m) {
    return m == ControllerMode::Centralized ? "centralized" : "distributed";
}

struct CpuScaleChoice {
    double scale = 1.0;
    double weight = 1.0;
};

struct HeterogeneityConfig {
    bool enabled = false;
    double sensor_drop_prob = 0.3;
    double battery_init_lo = 0.4;
    double battery_init_hi = 1.0;
    std::vector<CpuScaleChoice> cpu_scale_choices = {{0.4, 1.0}, {0.6, 1.0}, {0.8, 1.0}};
};

struct FailureConfig {
    bool enabled = false;
    double interval = 40.0;
    double fraction = 0.10;
    double outage_duration = 15.0;
    double permanent_prob = 0.3;
    double detect_timeout = 2.0;
};

struct WorkloadConfig {
    std::optional<std::size_t> backlog_target;  // unset: 2 x fleet_size
    bool include_tree = false;
    double obstacle_prob = 0.3;
    double generator_period = 1.0;
};

struct NetworkParams {
    double rtt_median = 0.048;
    double rtt_sigma = 0.15;
};

struct CentralParams {
    double per_drone_scan_cost = 54e-6;  // s per drone examined
};

struct DistributedParams {
    std::size_t snapshot_limit = 64;
    double backoff_interval = 0.5;
};

struct Scenario {
    std::size_t fleet_size = 1000;
    std::optional<double> arena_radius;  // unset: 50 m scaled to constant density
    double arena_height = 20.0;
    ControllerMode controller_mode = ControllerMode::Centralized;
    std::size_t scheduler_agents = 1;
    double net_latency_multiplier = 1.0;
    ExecutionSite execution_site = ExecutionSite::Edge;
    HeterogeneityConfig heterogeneity;
    FailureConfig failures;
    WorkloadConfig workload;
    ModelParams model_params;
    NetworkParams network;
    CentralParams central;
    DistributedParams distributed;
    double duration = 600.0;
    double latency_warmup = 60.0;  // assignments before this instant yield no latency sample
    std::uint64_t seed = 1;

    double effective_arena_radius() const {
        if (arena_radius) return *arena_radius;
        return 50.0 * std::sqrt(static_cast<double>(fleet_size) / 12.0);
    }
    std::size_t effective_backlog_target() const {
        return workload.backlog_target.value_or(2 * fleet_size);
    }
};

struct Violation {
    std::string field;
    std::string constraint;

    friend bool operator==(const Violation&, const Violation&) = default;
};

namespace detail {
inline bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }
inline bool probability(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }
}  // namespace detail

/// Every field constraint that `s` breaks; empty means the scenario is runnable.
inline std::vector<Violation> validate_scenario(const Scenario& s) {
    using detail::finite_positive;
    using detail::probability;
    std::vector<Violation> out;
    auto require = [&](bool ok, std::string field, std::string constraint) {
        if (!ok) out.push_back({std::move(field), std::move(constraint)});
    };

    require(s.fleet_size >= 1, "fleet_size", ">= 1");
    if (s.arena_radius) require(finite_positive(*s.arena_radius), "arena_radius", "> 0");
    require(finite_positive(s.arena_height), "arena_height", "> 0");
    require(s.scheduler_agents >= 1, "scheduler_agents", ">= 1");
    require(std::isfinite(s.net_latency_multiplier) && s.net_latency_multiplier > 0.0 &&
                s.net_latency_multiplier <= 1.0,
            "net_latency_multiplier", "in (0, 1]");
    require(std::isfinite(s.duration) && s.duration >= 0.0, "duration", ">= 0");
    require(std::isfinite(s.latency_warmup) && s.latency_warmup >= 0.0, "latency_warmup", ">= 0");

    const auto& h = s.heterogeneity;
    require(probability(h.sensor_drop_prob), "heterogeneity.sensor_drop_prob", "in [0, 1]");
    require(probability(h.battery_init_lo), "heterogeneity.battery_init_range", "lo in [0, 1]");
    require(probability(h.battery_init_hi), "heterogeneity.battery_init_range", "hi in [0, 1]");
    require(h.battery_init_lo <= h.battery_init_hi, "heterogeneity.battery_init_range", "lo <= hi");
    require(!h.cpu_scale_choices.empty(), "heterogeneity.cpu_scale_choices", "non-empty");
    double total_weight = 0.0;
    for (const auto& c : h.cpu_scale_choices) {
        require(std::isfinite(c.scale) && c.scale > 0.0 && c.scale <= 1.0,
                "heterogeneity.cpu_scale_choices", "scale in (0, 1]");
        require(std::isfinite(c.weight) && c.weight >= 0.0, "heterogeneity.cpu_scale_choices",
                "weight >= 0");
        total_weight += c.weight;
    }
    if (!h.cpu_scale_choices.empty())
        require(total_weight > 0.0, "heterogeneity.cpu_scale_choices", "total weight > 0");

    const auto& f = s.failures;
    require(finite_positive(f.interval), "failures.interval", "> 0");
    require(probability(f.fraction), "failures.fraction", "in [0, 1]");
    require(finite_positive(f.outage_duration), "failures.outage_duration", "> 0");
    require(probability(f.permanent_prob), "failures.permanent_prob", "in [0, 1]");
    require(finite_positive(f.detect_timeout), "failures.detect_timeout", "> 0");

    const auto& w = s.workload;
    if (w.backlog_target)
        require(*w.backlog_target >= s.fleet_size, "workload.backlog_target", ">= fleet_size");
    require(probability(w.obstacle_prob), "workload.obstacle_prob", "in [0, 1]");
    require(finite_positive(w.generator_period), "workload.generator_period", "> 0");

    const auto& p = s.model_params;
    require(finite_positive(p.drone_speed), "model_params.drone_speed", "> 0");
    require(finite_positive(p.travel_energy), "model_params.travel_energy", "> 0");
    require(finite_positive(p.compute_power_edge), "model_params.compute_power_edge", "> 0");
    require(finite_positive(p.edge_ref_speed), "model_params.edge_ref_speed", "> 0");
    require(finite_positive(p.cloud_speedup), "model_params.cloud_speedup", "> 0");
    require(std::isfinite(p.serverless_multiplier) && p.serverless_multiplier >= 1.0,
            "model_params.serverless_multiplier", ">= 1");
    require(finite_positive(p.uplink_bandwidth), "model_params.uplink_bandwidth", "> 0");
    require(finite_positive(p.battery_capacity), "model_params.battery_capacity", "> 0");
    for (std::size_t i = 0; i < kTaskKindCount; ++i) {
        const auto kind = std::string(to_string(static_cast<TaskKind>(i)));
        require(finite_positive(p.kind_work[i]), "model_params.kind_work." + kind, "> 0");
        require(std::isfinite(p.kind_cloud_speedup_override[i]) &&
                    p.kind_cloud_speedup_override[i] >= 0.0,
                "model_params.kind_cloud_speedup_override." + kind, ">= 0 (0 = default)");
        require(std::isfinite(p.payload_bytes_by_kind[i]) && p.payload_bytes_by_kind[i] >= 0.0,
                "model_params.payload_bytes_by_kind." + kind, ">= 0");
    }

    require(finite_positive(s.network.rtt_median), "network.rtt_median", "> 0");
    require(std::isfinite(s.network.rtt_sigma) && s.network.rtt_sigma >= 0.0, "network.rtt_sigma",
            ">= 0");
    require(finite_positive(s.central.per_drone_scan_cost), "central.per_drone_scan_cost", "> 0");
    require(s.distributed.snapshot_limit >= 1, "distributed.snapshot_limit", ">= 1");
    require(finite_positive(s.distributed.backoff_interval), "distributed.backoff_interval", "> 0");
    return out;
}

}  // namespace swarmsim
