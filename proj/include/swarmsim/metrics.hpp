#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "swarmsim/core.hpp"

namespace swarmsim {

enum class Outcome : std::uint8_t { Open, Completed, Incomplete };

inline std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::Open: return "open";
        case Outcome::Completed: return "completed";
        case Outcome::Incomplete: return "incomplete";
    }
    return "?";
}

/// Per-task timeline. `eligible_time` is when the task and the drone that
/// eventually took it were both available; scheduling latency runs from there
/// to the moment that drone learned of its assignment, plus, for every
/// requeue, the gap between the holder going silent and the next assignment.
struct TaskRecord {
    TaskId id = 0;
    TaskKind kind = TaskKind::Routing;
    SimTime arrival_time = 0.0;
    std::optional<SimTime> eligible_time;
    std::optional<SimTime> first_assign_time;
    std::optional<SimTime> final_assign_time;
    std::optional<SimTime> exec_start;
    std::optional<SimTime> completion_time;
    Outcome outcome = Outcome::Open;
    std::optional<IncompleteReason> reason;
    std::uint32_t reschedules = 0;
    std::uint32_t conflicts_encountered = 0;
    std::vector<DroneId> assigned_drones;
    double reschedule_wait = 0.0;
    std::optional<SimTime> orphaned_since;  // holder went silent, no new holder yet

    std::optional<double> scheduling_latency() const {
        if (!first_assign_time || !eligible_time) return std::nullopt;
        return *first_assign_time - *eligible_time + reschedule_wait;
    }
    std::optional<double> execution_time() const {
        if (outcome != Outcome::Completed || !final_assign_time || !completion_time)
            return std::nullopt;
        return *completion_time - *final_assign_time;
    }
    bool started() const { return first_assign_time.has_value(); }
};

struct Percentiles {
    double p50 = 0.0;
    double p90 = 0.0;
    double p95 = 0.0;
    double p99 = 0.0;
};

struct MetricsReport {
    std::vector<double> scheduling_latency;
    std::vector<double> task_execution;

    std::size_t total_tasks = 0;
    std::size_t completed = 0;
    std::size_t started = 0;
    std::size_t incomplete_started = 0;  // assigned at least once, never completed
    std::size_t residual_pending = 0;    // never assigned
    std::map<std::string, std::size_t> incomplete_by_reason;

    double completion_fraction = 0.0;
    double incomplete_fraction = 0.0;
    double residual_pending_fraction = 0.0;
    double started_incomplete_fraction = 0.0;  // incomplete_started / started

    std::uint64_t claim_attempts = 0;
    std::uint64_t claims_won = 0;
    std::uint64_t conflicts = 0;
    double conflict_rate = 0.0;  // conflicts / attempts
    std::uint64_t requeues = 0;

    double busy_time_network = 0.0;
    double busy_time_compute = 0.0;
    double network_fraction = 0.0;
    double compute_fraction = 0.0;

    std::optional<Percentiles> scheduling_pct;
    std::optional<Percentiles> execution_pct;
    double mean_scheduling_latency = 0.0;
    double mean_task_execution = 0.0;
    double throughput = 0.0;  // first assignments per simulated second
};

/// Nearest rank: the value at 1-based index ceil(p * n) of the sorted samples.
inline std::optional<double> percentile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return std::nullopt;
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percentile: p outside [0,1]");
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n));
    if (rank == 0) rank = 1;
    return sorted[std::min(rank, sorted.size()) - 1];
}

inline std::optional<double> percentile(std::vector<double> samples, double p) {
    std::sort(samples.begin(), samples.end());
    return percentile_sorted(samples, p);
}

inline std::optional<Percentiles> summarize(std::vector<double> samples) {
    if (samples.empty()) return std::nullopt;
    std::sort(samples.begin(), samples.end());
    return Percentiles{*percentile_sorted(samples, 0.50), *percentile_sorted(samples, 0.90),
                       *percentile_sorted(samples, 0.95), *percentile_sorted(samples, 0.99)};
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Mass of the slow mode: fraction of samples strictly above `threshold`.
inline double bimodality_fraction(const std::vector<double>& samples, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("bimodality_fraction: threshold <= 0");
    if (samples.empty()) return 0.0;
    const auto above = std::count_if(samples.begin(), samples.end(),
                                     [&](double s) { return s > threshold; });
    return static_cast<double>(above) / static_cast<double>(samples.size());
}

// ---------------------------------------------------------------------------
// CSV exports
// ---------------------------------------------------------------------------

inline std::string fmt_num(double v) { return fmt::format("{:.9g}", v); }

inline void write_cdf(std::ostream& out, std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("export_cdf: no samples");
    std::sort(samples.begin(), samples.end());
    out << "value,cumulative_fraction\n";
    const std::size_t n = samples.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double frac = (i + 1 == n) ? 1.0 : static_cast<double>(i + 1) / static_cast<double>(n);
        out << fmt_num(samples[i]) << ',' << fmt::format("{:.12g}", frac) << '\n';
    }
}

struct LabeledSamples {
    std::string label;
    std::vector<double> samples;
};

inline void write_violin(std::ostream& out, const std::vector<LabeledSamples>& sets) {
    if (sets.empty()) throw std::invalid_argument("export_violin: no labeled sets");
    out << "label,value\n";
    for (const auto& s : sets)
        for (double v : s.samples) out << s.label << ',' << fmt_num(v) << '\n';
}

namespace detail {
inline std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}
}  // namespace detail

inline void export_cdf(const std::vector<double>& samples, const std::string& path) {
    auto out = detail::open_for_write(path);
    write_cdf(out, samples);
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void export_violin(const std::vector<LabeledSamples>& sets, const std::string& path) {
    auto out = detail::open_for_write(path);
    write_violin(out, sets);
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string opt_num(const std::optional<double>& v) { return v ? fmt_num(*v) : ""; }

inline void write_task_records(std::ostream& out, const std::vector<TaskRecord>& records) {
    out << "task_id,kind,arrival_time,eligible_time,first_assign_time,final_assign_time,"
           "exec_start,completion_time,outcome,reason,reschedules,conflicts,drones\n";
    for (const auto& r : records) {
        std::string drones;
        for (std::size_t i = 0; i < r.assigned_drones.size(); ++i) {
            if (i) drones += ';';
            drones += std::to_string(r.assigned_drones[i]);
        }
        out << r.id << ',' << to_string(r.kind) << ',' << fmt_num(r.arrival_time) << ','
            << opt_num(r.eligible_time) << ',' << opt_num(r.first_assign_time) << ','
            << opt_num(r.final_assign_time) << ',' << opt_num(r.exec_start) << ','
            << opt_num(r.completion_time) << ',' << to_string(r.outcome) << ','
            << (r.reason ? to_string(*r.reason) : std::string_view{}) << ',' << r.reschedules
            << ',' << r.conflicts_encountered << ',' << drones << '\n';
    }
}

inline void write_summary(std::ostream& out, const MetricsReport& m) {
    auto line = [&](std::string_view key, const std::string& value) {
        out << key << ": " << value << '\n';
    };
    auto pct = [&](std::string_view prefix, const std::optional<Percentiles>& p) {
        line(std::string(prefix) + "_p50", p ? fmt_num(p->p50) : "absent");
        line(std::string(prefix) + "_p90", p ? fmt_num(p->p90) : "absent");
        line(std::string(prefix) + "_p95", p ? fmt_num(p->p95) : "absent");
        line(std::string(prefix) + "_p99", p ? fmt_num(p->p99) : "absent");
    };
    line("total_tasks", std::to_string(m.total_tasks));
    line("started_tasks", std::to_string(m.started));
    line("completed_tasks", std::to_string(m.completed));
    line("incomplete_started_tasks", std::to_string(m.incomplete_started));
    line("residual_pending_tasks", std::to_string(m.residual_pending));
    line("completion_fraction", fmt_num(m.completion_fraction));
    line("incomplete_fraction", fmt_num(m.incomplete_fraction));
    line("residual_pending_fraction", fmt_num(m.residual_pending_fraction));
    line("started_incomplete_fraction", fmt_num(m.started_incomplete_fraction));
    for (const auto& [reason, n] : m.incomplete_by_reason)
        line("incomplete_reason_" + reason, std::to_string(n));
    line("claim_attempts", std::to_string(m.claim_attempts));
    line("claims_won", std::to_string(m.claims_won));
    line("conflicts", std::to_string(m.conflicts));
    line("conflict_rate", fmt_num(m.conflict_rate));
    line("requeues", std::to_string(m.requeues));
    line("controller_busy_network_s", fmt_num(m.busy_time_network));
    line("controller_busy_compute_s", fmt_num(m.busy_time_compute));
    line("controller_network_fraction", fmt_num(m.network_fraction));
    line("controller_compute_fraction", fmt_num(m.compute_fraction));
    line("scheduling_latency_samples", std::to_string(m.scheduling_latency.size()));
    line("scheduling_latency_mean", fmt_num(m.mean_scheduling_latency));
    pct("scheduling_latency", m.scheduling_pct);
    line("task_execution_samples", std::to_string(m.task_execution.size()));
    line("task_execution_mean", fmt_num(m.mean_task_execution));
    pct("task_execution", m.execution_pct);
    line("assignment_throughput_per_s", fmt_num(m.throughput));
}

}  // namespace swarmsim
